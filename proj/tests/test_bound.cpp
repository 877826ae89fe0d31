#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "sharpbound/bound.hpp"
#include "sharpbound/oracle.hpp"

using namespace sharpbound;

TEST_CASE("closed form on hand-checkable spectra") {
    // zero matrix
    const EigenvalueBound zero = lambda_sup_closed_form(0.0, 0.0, 9);
    CHECK(zero.lambda_sup == 0.0);

    // one nonzero eigenvalue: bound collapses onto it
    for (int dim : {2, 5, 13}) {
        const double top = 3.5;
        const EigenvalueBound b = lambda_sup_closed_form(top, top * top, dim);
        CHECK(b.lambda_sup == doctest::Approx(top).epsilon(1e-12));
    }

    // spectrum {3, 1}: mu = 2, sigma^2 = 1, bound = 3 exactly
    const EigenvalueBound two = lambda_sup_closed_form(4.0, 10.0, 2);
    CHECK(two.mu == 2.0);
    CHECK(two.sigma2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two.lambda_sup == doctest::Approx(3.0).epsilon(1e-15));

    CHECK_THROWS_AS(lambda_sup_closed_form(1.0, 1.0, 0), std::domain_error);
}

TEST_CASE("variance clamp stays tiny") {
    // tr^2/D slightly above tr2/D by round-off: raw sigma2 below zero
    const double tr = 1.0 + 1e-16;
    const EigenvalueBound b = lambda_sup_closed_form(tr, tr * tr / 3.0 * 3.0, 3);
    CHECK(b.sigma2 >= 0.0);
    CHECK(b.clamp <= 1e-8 * std::max(1.0, tr * tr));
}

TEST_CASE("jacobi eigensolver against known matrices") {
    Matrix diag(4, 4);
    diag(0, 0) = -1.0;
    diag(1, 1) = 7.0;
    diag(2, 2) = 0.5;
    diag(3, 3) = 7.0;
    const std::vector<double> eig = jacobi_eigenvalues(diag);
    CHECK(eig == std::vector<double>{7.0, 7.0, 0.5, -1.0});

    // 2x2 with known closed-form spectrum {3, 1}
    Matrix two(2, 2);
    two(0, 0) = 2.0;
    two(0, 1) = 1.0;
    two(1, 0) = 1.0;
    two(1, 1) = 2.0;
    const EigenSystem sys = jacobi_eigensystem(two);
    CHECK(sys.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(sys.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    // eigenvector residual ||A u - lambda u||
    for (int which : {0, 1}) {
        for (int row = 0; row < 2; ++row) {
            double av = 0.0;
            for (int col = 0; col < 2; ++col) av += two(row, col) * sys.vectors(col, which);
            CHECK(av == doctest::Approx(sys.values[which] * sys.vectors(row, which))
                            .epsilon(1e-12));
        }
    }
}

TEST_CASE("jacobi handles random symmetric matrices") {
    Rng rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_u64() % 20);
        Matrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const double v = rng.uniform(-2.0, 2.0);
                a(i, j) = v;
                a(j, i) = v;
            }
        const EigenSystem sys = jacobi_eigensystem(a);
        double sum = 0.0, sum_sq = 0.0;
        for (double v : sys.values) {
            sum += v;
            sum_sq += v * v;
        }
        CHECK(sum == doctest::Approx(matrix_trace(a)).epsilon(1e-9));
        CHECK(sum_sq == doctest::Approx(matrix_sq_trace(a)).epsilon(1e-9));
        for (std::size_t d = 1; d < sys.values.size(); ++d)
            CHECK(sys.values[d - 1] >= sys.values[d]);

        // residual of a middle eigenpair
        const int which = dim / 2;
        for (int row = 0; row < dim; ++row) {
            double av = 0.0;
            for (int col = 0; col < dim; ++col) av += a(row, col) * sys.vectors(col, which);
            CHECK(std::abs(av - sys.values[which] * sys.vectors(row, which)) <= 1e-9);
        }
    }
}

TEST_CASE("spectrum report on simple matrices") {
    Matrix eye(5, 5);
    for (int i = 0; i < 5; ++i) eye(i, i) = 1.0;
    const SpectrumReport id_report = spectrum_report(eye, 5.0, 5.0);
    CHECK(id_report.lambda1 == 1.0);
    CHECK(id_report.lambda_sup == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(id_report.psd);

    Matrix rank1(4, 4);
    rank1(0, 0) = 1.0;
    const SpectrumReport r1 = spectrum_report(rank1, 1.0, 1.0);
    CHECK(r1.lambda_sup == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.lambda1 == doctest::Approx(1.0).epsilon(1e-12));

    Matrix skewed(2, 2);
    skewed(0, 1) = 1.0;  // asymmetric on purpose
    CHECK_THROWS_AS(spectrum_report(skewed, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("bound dominates the top eigenvalue on random symmetric matrices") {
    Rng rng(109);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_u64() % 16);
        Matrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const double v = rng.uniform(-3.0, 3.0);
                a(i, j) = v;
                a(j, i) = v;
            }
        const SpectrumReport report =
            spectrum_report(a, matrix_trace(a), matrix_sq_trace(a));
        CHECK(report.lambda1 <=
              report.lambda_sup + 1e-9 * std::max(1.0, std::abs(report.lambda_sup)));

        // closed-form mu/sigma2 agree with the eigenvalue mean and variance
        double mean = 0.0;
        for (double v : report.eigenvalues) mean += v;
        mean /= dim;
        double var = 0.0;
        for (double v : report.eigenvalues) var += (v - mean) * (v - mean);
        var /= dim;
        CHECK(report.mu == doctest::Approx(mean).epsilon(1e-9));
        CHECK(report.sigma2 == doctest::Approx(var).epsilon(1e-9));
    }
}

TEST_CASE("equality on rank-1 PSD matrices") {
    Rng rng(113);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_u64() % 19);
        std::vector<double> u(dim);
        for (double& x : u) x = rng.uniform(-1.0, 1.0);
        Matrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = u[i] * u[j];
        const SpectrumReport report =
            spectrum_report(a, matrix_trace(a), matrix_sq_trace(a));
        CHECK(std::abs(report.lambda_sup - report.lambda1) <= 1e-9 * report.lambda1);
    }
}

TEST_CASE("synthetic zero residuals give a zero bound") {
    Rng rng(127);
    auto inst = testing::random_instance(rng, ActivationKind::Sigmoid, 2, 3, 5);
    BatchTrace batch = forward_batch(inst.params, inst.kind, inst.data);
    for (ForwardTrace& t : batch.samples) {
        t.residual = 0.0;
        t.prob_slope = 0.0;
    }
    for (int i = 0; i < batch.sample_count(); ++i) {
        batch.residuals[i] = 0.0;
        batch.prob_slopes[i] = 0.0;
    }
    const TraceBundle traces = trace_bundle(batch, inst.params, inst.data);
    CHECK(traces.parts.total == 0.0);
    CHECK(traces.squared.sq_total == 0.0);
    const EigenvalueBound b = lambda_sup_closed_form(traces.parts.total,
                                                     traces.squared.sq_total,
                                                     inst.params.shape.param_dim());
    CHECK(b.lambda_sup == 0.0);
    CHECK(asymptotic_flatness_check(batch, inst.params, inst.data, 1e-6));
}

TEST_CASE("bound shrinks linearly along a residual scaling sweep") {
    Rng rng(131);
    auto inst = testing::random_instance(rng, ActivationKind::Tanh, 2, 3, 6);
    const BatchTrace base = forward_batch(inst.params, inst.kind, inst.data);

    double previous = 1e300;
    for (int k = 1; k <= 6; ++k) {
        const double scale = std::pow(10.0, -k);
        BatchTrace scaled = base;
        for (int i = 0; i < scaled.sample_count(); ++i) {
            scaled.samples[i].residual = base.samples[i].residual * scale;
            scaled.samples[i].prob_slope = base.samples[i].prob_slope * scale;
            scaled.residuals[i] = base.residuals[i] * scale;
            scaled.prob_slopes[i] = base.prob_slopes[i] * scale;
        }
        const TraceBundle traces = trace_bundle(scaled, inst.params, inst.data);
        const EigenvalueBound b = lambda_sup_closed_form(
            traces.parts.total, traces.squared.sq_total, inst.params.shape.param_dim());
        CHECK(std::abs(b.lambda_sup) < previous);
        previous = std::abs(b.lambda_sup);

        double max_res = 0.0;
        for (double r : scaled.residuals) max_res = std::max(max_res, std::abs(r));
        CHECK(asymptotic_flatness_check(scaled, inst.params, inst.data,
                                        max_res * 1.01 + 1e-300));
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("flatness check returns vacuously true when residuals are large") {
    Rng rng(137);
    const auto inst = testing::random_instance(rng, ActivationKind::Sigmoid);
    const BatchTrace batch = forward_batch(inst.params, inst.kind, inst.data);
    double max_res = 0.0;
    for (double r : batch.residuals) max_res = std::max(max_res, std::abs(r));
    CHECK(asymptotic_flatness_check(batch, inst.params, inst.data, max_res * 0.5));
    CHECK_THROWS_AS(asymptotic_flatness_check(batch, inst.params, inst.data, 0.0),
                    std::domain_error);
}

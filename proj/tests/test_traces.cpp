#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "sharpbound/hessian.hpp"
#include "sharpbound/oracle.hpp"
#include "sharpbound/traces.hpp"

using namespace sharpbound;

TEST_CASE("zero output weights: tr_ww vanishes, tr_vv is the slope sum") {
    NetworkParams params = zero_params({2, 3});
    Rng rng(71);
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) params.hidden(row, col) = rng.uniform(-2.0, 2.0);
    Dataset data;
    data.inputs = Matrix(2, 4);
    data.labels = {0, 1, 0, 1};
    for (int i = 0; i < 4; ++i) {
        data.inputs(0, i) = rng.normal();
        data.inputs(1, i) = rng.normal();
    }
    const BatchTrace batch = forward_batch(params, ActivationKind::Sigmoid, data);
    const TraceParts parts = trace_closed_form(batch, params, data);
    CHECK(parts.ww == 0.0);
    // z = 0 for every sample, so each slope is exactly 1/4
    double expected = 0.0;
    for (int i = 0; i < 4; ++i) {
        double r2 = 0.0;
        for (int row = 0; row < 3; ++row)
            r2 += batch.hidden_cols(row, i) * batch.hidden_cols(row, i);
        expected += 0.25 * (1.0 + r2);
    }
    CHECK(parts.vv == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single-sample linear instance agrees with the matrix trace") {
    Rng rng(73);
    const NetworkShape shape{2, 2};
    std::vector<double> theta(shape.param_dim());
    for (double& v : theta) v = rng.uniform(-2.0, 2.0);
    const NetworkParams params = unflatten(theta, shape);
    Dataset data;
    data.inputs = Matrix(2, 1);
    data.inputs(0, 0) = 0.4;
    data.inputs(1, 0) = -1.1;
    data.labels = {1};

    const BatchTrace batch = forward_batch(params, ActivationKind::Linear, data);
    const TraceParts parts = trace_closed_form(batch, params, data);
    const HessianBundle hess = hessian_total(params, ActivationKind::Linear, data);
    CHECK(parts.total == doctest::Approx(matrix_trace(hess.assembled)).epsilon(1e-12));
}

TEST_CASE("closed-form traces equal matrix traces across kinds") {
    Rng rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = testing::random_instance(rng, testing::kind_for(trial));
        const BatchTrace batch = forward_batch(inst.params, inst.kind, inst.data);
        const TraceBundle traces = trace_bundle(batch, inst.params, inst.data);
        const HessianBundle hess = hessian_total(inst.params, inst.kind, inst.data);

        const double tr_mat = matrix_trace(hess.assembled);
        const double tr2_mat = matrix_sq_trace(hess.assembled);
        CHECK(std::abs(traces.parts.total - tr_mat) <=
              1e-8 * std::max(1.0, std::abs(tr_mat)));
        CHECK(std::abs(traces.squared.sq_total - tr2_mat) <=
              1e-8 * std::max(1.0, std::abs(tr2_mat)));

        // the matrix (Frobenius inner product) route is the same number
        const double via_matrix_form =
            trace_sq_matrix_form(traces.squared, inst.data, batch.hidden_cols);
        CHECK(via_matrix_form ==
              doctest::Approx(traces.squared.sq_total).epsilon(1e-12));
    }
}

TEST_CASE("bilinear coefficient matrices have the advertised structure") {
    Rng rng(83);
    for (int trial = 0; trial < 25; ++trial) {
        const auto inst = testing::random_instance(rng, testing::kind_for(trial));
        const BatchTrace batch = forward_batch(inst.params, inst.kind, inst.data);
        const TraceSquared sq = trace_sq_closed_form(batch, inst.params, inst.data);
        const int count = inst.data.sample_count();
        for (int i = 0; i < count; ++i) {
            CHECK(sq.phi(i, i) >= -1e-15);  // diagonal is a squared-matrix trace
            for (int j = 0; j < count; ++j) {
                CHECK(sq.omega(i, j) ==
                      batch.prob_slopes[i] * batch.prob_slopes[j]);
                CHECK(sq.omega(i, j) > 0.0);
                CHECK(sq.omega(i, j) <= 1.0 / 16.0);
            }
        }
    }
}

TEST_CASE("omega caps at 1/16 when both logits vanish") {
    const NetworkParams zero = zero_params({2, 3});
    Dataset data;
    data.inputs = Matrix(2, 2);
    data.inputs(0, 0) = 1.0;
    data.inputs(1, 1) = -1.0;
    data.labels = {0, 1};
    const BatchTrace batch = forward_batch(zero, ActivationKind::Tanh, data);
    const TraceSquared sq = trace_sq_closed_form(batch, zero, data);
    CHECK(sq.omega(0, 1) == 1.0 / 16.0);
    CHECK(sq.omega(1, 1) == 1.0 / 16.0);
}

TEST_CASE("bounds dominate the traces on random instances") {
    Rng rng(89);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inst = testing::random_instance(rng, testing::kind_for(trial));
        const BatchTrace batch = forward_batch(inst.params, inst.kind, inst.data);
        const TraceBundle traces = trace_bundle(batch, inst.params, inst.data);
        const TraceBounds bounds =
            trace_bounds(profile(inst.kind), inst.params, inst.data, batch);
        CHECK(traces.parts.vv <= bounds.ub_tr_vv);
        CHECK(traces.parts.ww <= bounds.ub_tr_ww + 1e-12);
        CHECK(traces.squared.sq_total <= bounds.ub_tr_sq + 1e-12);
        CHECK(bounds.phi_max >= 0.0);
    }
}

TEST_CASE("mixed-sign output weights need the l1 norm in the ww bound") {
    // curvatures of opposite sign at the two hidden units line up with
    // the signs of (c, -c), so the signed-sum form |vt . 1| = 0 would
    // undercount while the l1 form keeps dominating
    const double f_star = (3.0 - std::sqrt(3.0)) / 6.0;  // f'' of sigmoid peaks here
    const double y_star = std::log(f_star / (1.0 - f_star));
    NetworkParams params = zero_params({1, 2});
    params.hidden(0, 0) = y_star;
    params.hidden(1, 0) = -y_star;
    params.output = {0.0, 1.0, -1.0};
    Dataset data;
    data.inputs = Matrix(1, 1);
    data.inputs(0, 0) = 0.0;
    data.labels = {0};

    const BatchTrace batch = forward_batch(params, ActivationKind::Sigmoid, data);
    const TraceParts parts = trace_closed_form(batch, params, data);
    const TraceBounds bounds =
        trace_bounds(profile(ActivationKind::Sigmoid), params, data, batch);

    const double signed_sum_form = 0.25 * (1.0 / 16.0) * 2.0;  // zeta2 term vanishes
    CHECK(parts.ww > signed_sum_form);        // the weaker form fails here
    CHECK(parts.ww <= bounds.ub_tr_ww);       // the shipped bound holds
}

TEST_CASE("saturating bound value on the 50-sample sigmoid shape") {
    Rng rng(97);
    NetworkShape shape{2, 3};
    std::vector<double> theta(shape.param_dim());
    for (double& v : theta) v = rng.uniform(-2.0, 2.0);
    const NetworkParams params = unflatten(theta, shape);
    Dataset data;
    data.inputs = Matrix(2, 50);
    data.labels.resize(50);
    for (int i = 0; i < 50; ++i) {
        data.inputs(0, i) = rng.normal();
        data.inputs(1, i) = rng.normal();
        data.labels[i] = i % 2;
    }
    const BatchTrace batch = forward_batch(params, ActivationKind::Sigmoid, data);
    const TraceBounds bounds =
        trace_bounds(profile(ActivationKind::Sigmoid), params, data, batch);
    CHECK(bounds.ub_tr_vv == 50.0);  // I(N+1)/4 with I=50, N=3

    const TraceBounds unbounded =
        trace_bounds(profile(ActivationKind::Gelu), params, data,
                     forward_batch(params, ActivationKind::Gelu, data));
    CHECK(std::isinf(unbounded.ub_tr_vv));
}

TEST_CASE("normalized-input maxima") {
    const NormalizedMaxima m = normalized_input_maxima(2, 3, 50, ActivationKind::Sigmoid);
    CHECK(m.max_sum_x == 150.0);
    CHECK(m.max_fro_x == 50.0 * 50.0 * 9.0);
    CHECK(m.sup_fro_r == 50.0 * 50.0 * 16.0);
    CHECK(std::isinf(
        normalized_input_maxima(2, 3, 50, ActivationKind::Gelu).sup_fro_r));

    // all-ones inputs achieve the sum form; random [0,1] draws never exceed it
    Rng rng(101);
    const NormalizedMaxima small = normalized_input_maxima(2, 1, 4, ActivationKind::Tanh);
    double best_sum = 0.0, best_fro = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        Matrix inputs(2, 4);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                inputs(r, c) = trial == 0 ? 1.0 : rng.uniform();
        double sum = 0.0, fro = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double dot = 1.0;
                for (int r = 0; r < 2; ++r) dot += inputs(r, i) * inputs(r, j);
                fro += dot * dot;
                if (i == j) sum += dot;
            }
        }
        best_sum = std::max(best_sum, sum);
        best_fro = std::max(best_fro, fro);
    }
    CHECK(best_sum == doctest::Approx(small.max_sum_x));  // the ones matrix hits it
    CHECK(best_sum <= small.max_sum_x + 1e-12);
    CHECK(best_fro <= small.max_fro_x + 1e-12);
}

TEST_CASE("trace sandwich") {
    // equal spectrum: lower inequality tight
    CHECK(trace_sandwich_check(13.0, 13.0, 13, true));
    // rank-1 PSD: upper tight
    CHECK(trace_sandwich_check(5.0, 25.0, 7, true));
    // indefinite matrices may break the upper bound, which then is not asserted
    CHECK(trace_sandwich_check(0.0, 8.0, 4, false));
    CHECK_FALSE(trace_sandwich_check(4.0, 1.0, 4, false));  // lower fails

    Rng rng(103);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_u64() % 12);
        std::vector<double> eig(dim);
        for (double& v : eig) v = rng.uniform(0.0, 3.0);
        double tr = 0.0, tr2 = 0.0;
        for (double v : eig) {
            tr += v;
            tr2 += v * v;
        }
        CHECK(trace_sandwich_check(tr, tr2, dim, true));
    }
}

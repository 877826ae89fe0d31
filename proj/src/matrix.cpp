#include "sharpbound/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sharpbound {

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("multiply: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j)));
    return m;
}

double symmetry_gap(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("symmetry_gap: matrix is not square");
    double gap = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            gap = std::max(gap, std::abs(a(i, j) - a(j, i)));
    return gap;
}

namespace {

double offdiag_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            sum += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(sum);
}

}  // namespace

EigenSystem jacobi_eigensystem(Matrix a, bool want_vectors) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("jacobi_eigensystem: matrix is not square");
    const std::size_t n = a.rows();

    EigenSystem out;
    if (want_vectors) {
        out.vectors = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, i) = 1.0;
    }
    if (n == 0) return out;

    const double total_norm = frobenius_norm(a);
    const double target = 1e-12 * total_norm;

    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    while (sweep < kMaxSweeps && offdiag_norm(a) > target) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that annihilates a(p,q), in the stable
                // t = sign(theta) / (|theta| + sqrt(theta^2 + 1)) form.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = out.vectors(k, p);
                        const double vkq = out.vectors(k, q);
                        out.vectors(k, p) = vkp - s * (vkq + tau * vkp);
                        out.vectors(k, q) = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
    }
    out.sweeps = sweep;

    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return out.values[x] > out.values[y]; });

    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = out.values[order[i]];
    out.values = std::move(sorted);
    if (want_vectors) {
        Matrix v(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                v(i, j) = out.vectors(i, order[j]);
        out.vectors = std::move(v);
    }
    return out;
}

std::vector<double> jacobi_eigenvalues(Matrix a) {
    return jacobi_eigensystem(std::move(a), /*want_vectors=*/false).values;
}

}  // namespace sharpbound

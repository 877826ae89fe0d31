#include "sharpbound/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharpbound {

namespace {

void check_cfg(const FdConfig& cfg) {
    if (!(cfg.h_grad > 0.0) || !(cfg.h_hess > 0.0))
        throw std::domain_error("fd config: steps must be positive");
}

double eval_at(const ScalarFn& fn, std::vector<double>& theta, std::size_t coord) {
    const double v = fn(theta);
    if (!std::isfinite(v))
        throw std::runtime_error("fd: non-finite loss near coordinate " +
                                 std::to_string(coord));
    return v;
}

}  // namespace

std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> theta,
                                FdConfig cfg) {
    check_cfg(cfg);
    const double h = cfg.h_grad;
    std::vector<double> point(theta.begin(), theta.end());
    std::vector<double> grad(theta.size());
    for (std::size_t d = 0; d < theta.size(); ++d) {
        point[d] = theta[d] + h;
        const double up = eval_at(fn, point, d);
        point[d] = theta[d] - h;
        const double down = eval_at(fn, point, d);
        point[d] = theta[d];
        grad[d] = (up - down) / (2.0 * h);
    }
    return grad;
}

FdHessian fd_hessian_full(const ScalarFn& fn, std::span<const double> theta,
                          FdConfig cfg) {
    check_cfg(cfg);
    const double h = cfg.h_hess;
    const std::size_t dim = theta.size();
    std::vector<double> point(theta.begin(), theta.end());
    FdHessian out;
    out.hessian = Matrix(dim, dim);

    const double center = eval_at(fn, point, 0);
    for (std::size_t a = 0; a < dim; ++a) {
        point[a] = theta[a] + h;
        const double up = eval_at(fn, point, a);
        point[a] = theta[a] - h;
        const double down = eval_at(fn, point, a);
        point[a] = theta[a];
        out.hessian(a, a) = (up - 2.0 * center + down) / (h * h);

        for (std::size_t b = a + 1; b < dim; ++b) {
            point[a] = theta[a] + h;
            point[b] = theta[b] + h;
            const double pp = eval_at(fn, point, b);
            point[b] = theta[b] - h;
            const double pm = eval_at(fn, point, b);
            point[a] = theta[a] - h;
            point[b] = theta[b] + h;
            const double mp = eval_at(fn, point, b);
            point[b] = theta[b] - h;
            const double mm = eval_at(fn, point, b);
            point[a] = theta[a];
            point[b] = theta[b];
            const double cross_ab = (pp - pm - mp + mm) / (4.0 * h * h);
            const double cross_ba = (pp - mp - pm + mm) / (4.0 * h * h);
            out.max_asymmetry = std::max(out.max_asymmetry,
                                         std::abs(cross_ab - cross_ba));
            const double averaged = 0.5 * (cross_ab + cross_ba);
            out.hessian(a, b) = averaged;
            out.hessian(b, a) = averaged;
        }
    }
    return out;
}

Matrix fd_hessian(const ScalarFn& fn, std::span<const double> theta, FdConfig cfg) {
    return fd_hessian_full(fn, theta, cfg).hessian;
}

double matrix_trace(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("matrix_trace: matrix is not square");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, i);
    return acc;
}

double matrix_sq_trace(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("matrix_sq_trace: matrix is not square");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * a(j, i);
    return acc;
}

double frobenius_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("frobenius_diff: shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            acc += d * d;
        }
    return std::sqrt(acc);
}

}  // namespace sharpbound

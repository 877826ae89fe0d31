#pragma once

#include <functional>
#include <span>

#include "sharpbound/matrix.hpp"

namespace sharpbound {

// Independent numerical ground truth for the analytic derivative paths.
// Central differences only; nothing here shares code with the closed
// forms it is used to check.

struct FdConfig {
    double h_grad = 1e-6;
    double h_hess = 1e-4;  // second differences keep ~half the mantissa
};

using ScalarFn = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> theta,
                                FdConfig cfg = {});

// Four-point cross differences off the diagonal, three-point second
// difference on it. The result is symmetrized by averaging -- allowed
// here and only here, since this path is pure measurement.
// max_asymmetry records the worst |(a,b) - (b,a)| before averaging; a
// large value means the steps are unsuited to the loss.
struct FdHessian {
    Matrix hessian;
    double max_asymmetry = 0.0;
};

FdHessian fd_hessian_full(const ScalarFn& fn, std::span<const double> theta,
                          FdConfig cfg = {});
Matrix fd_hessian(const ScalarFn& fn, std::span<const double> theta, FdConfig cfg = {});

double matrix_trace(const Matrix& a);
// sum_ab A_ab * A_ba without forming the square
double matrix_sq_trace(const Matrix& a);
double frobenius_diff(const Matrix& a, const Matrix& b);

}  // namespace sharpbound

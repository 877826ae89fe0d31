#pragma once

#include <span>

#include "sharpbound/network.hpp"

namespace sharpbound {

// The 2x2 block partition of the loss Hessian in the flatten layout,
// plus the assembled D x D matrix. `vw` always equals the transpose of
// `wv`; both are kept because they come from independent formulas and
// the tests compare them. `assembled` mirrors the upper triangle into
// the lower one, so its symmetry gap is exactly zero.
struct HessianBundle {
    Matrix ww;         // (M+1)N x (M+1)N
    Matrix wv;         // (M+1)N x (N+1)
    Matrix vw;         // (N+1) x (M+1)N
    Matrix vv;         // (N+1) x (N+1)
    Matrix assembled;  // D x D
};

HessianBundle hessian_single(const NetworkParams& params, ActivationKind kind,
                             std::span<const double> input, int label);

// Sample-wise sum in index order.
HessianBundle hessian_total(const NetworkParams& params, ActivationKind kind,
                            const Dataset& data);

}  // namespace sharpbound

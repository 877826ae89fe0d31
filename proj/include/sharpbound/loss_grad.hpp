#pragma once

#include <span>
#include <vector>

#include "sharpbound/network.hpp"

namespace sharpbound {

// Cross-entropy of one sample, computed from the logit as
// softplus(z) - q*z so large |z| never cancels catastrophically.
double loss(const ForwardTrace& trace, int label);

// Sum over the dataset, accumulated in sample order.
double total_loss(const NetworkParams& params, ActivationKind kind,
                  const Dataset& data);

// Gradient in the flatten layout: hidden-weight part of length (M+1)*N
// followed by the output-weight part of length N+1.
std::vector<double> grad_single(const NetworkParams& params, ActivationKind kind,
                                std::span<const double> input, int label);

std::vector<double> grad_total(const NetworkParams& params, ActivationKind kind,
                               const Dataset& data);

// One pass over the data for the training loop.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};
LossGrad loss_and_grad_total(const NetworkParams& params, ActivationKind kind,
                             const Dataset& data);

}  // namespace sharpbound

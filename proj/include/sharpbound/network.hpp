#pragma once

#include <span>
#include <vector>

#include "sharpbound/activation.hpp"
#include "sharpbound/matrix.hpp"

namespace sharpbound {

// Parameter count of the two-layer map: hidden weights take (M+1)*N
// entries (bias column included), output weights N+1.
int param_dim(int input_dim, int hidden_dim);

struct NetworkShape {
    int input_dim = 0;   // M
    int hidden_dim = 0;  // N

    int param_dim() const { return sharpbound::param_dim(input_dim, hidden_dim); }
    bool operator==(const NetworkShape&) const = default;
};

// Weights of the 3-layer network with biases absorbed: `hidden` is
// N x (M+1) with column 0 the hidden bias, `output` has N+1 entries
// with entry 0 the output bias.
struct NetworkParams {
    NetworkShape shape;
    Matrix hidden;                // N x (M+1)
    std::vector<double> output;   // N+1

    // output weights without the bias entry, as used in all curvature formulas
    std::span<const double> output_tail() const {
        return std::span<const double>(output).subspan(1);
    }
};

NetworkParams zero_params(NetworkShape shape);

// Flatten layout contract, shared by gradients and Hessian blocks:
// columns of `hidden` stacked first (column 0 through column M, each of
// length N), then the output weights. Round-trips exactly.
std::vector<double> flatten(const NetworkParams& params);
NetworkParams unflatten(std::span<const double> theta, NetworkShape shape);

struct Dataset {
    Matrix inputs;            // M x I, one column per sample
    std::vector<int> labels;  // entries in {0, 1}

    int sample_count() const { return static_cast<int>(labels.size()); }
    int input_dim() const { return static_cast<int>(inputs.rows()); }
    std::vector<double> input_column(int i) const;
};

void validate(const Dataset& data);

// Everything the closed-form derivative formulas consume, for one sample.
struct ForwardTrace {
    std::vector<double> preact;     // W h(x)
    std::vector<double> hidden;     // f(preact)
    double logit = 0.0;             // V h(hidden)
    double prob = 0.0;              // sigmoid(logit), strictly inside (0,1)
    double residual = 0.0;          // prob - label
    double prob_slope = 0.0;        // prob * (1 - prob), <= 1/4
    std::vector<double> act_slope;  // f'(preact)
    std::vector<double> act_curve;  // f''(preact)
};

ForwardTrace forward(const NetworkParams& params, ActivationKind kind,
                     std::span<const double> input, int label);

// Column-wise forward over a dataset plus the batch aggregates.
struct BatchTrace {
    std::vector<ForwardTrace> samples;
    Matrix hidden_cols;                 // N x I, column i = samples[i].hidden
    Matrix act_slopes;                  // I x N
    Matrix act_curves;                  // I x N
    std::vector<double> prob_slopes;    // length I
    std::vector<double> residuals;      // length I

    int sample_count() const { return static_cast<int>(samples.size()); }
};

BatchTrace forward_batch(const NetworkParams& params, ActivationKind kind,
                         const Dataset& data);

}  // namespace sharpbound

#include "sharpbound/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sharpbound {

int param_dim(int input_dim, int hidden_dim) {
    if (input_dim < 1 || hidden_dim < 1)
        throw std::domain_error("param_dim: dimensions must be positive");
    return input_dim * hidden_dim + 2 * hidden_dim + 1;
}

NetworkParams zero_params(NetworkShape shape) {
    NetworkParams p;
    p.shape = shape;
    p.hidden = Matrix(static_cast<std::size_t>(shape.hidden_dim),
                      static_cast<std::size_t>(shape.input_dim) + 1);
    p.output.assign(static_cast<std::size_t>(shape.hidden_dim) + 1, 0.0);
    return p;
}

std::vector<double> flatten(const NetworkParams& params) {
    const int m1 = params.shape.input_dim + 1;
    const int n = params.shape.hidden_dim;
    std::vector<double> theta;
    theta.reserve(static_cast<std::size_t>(params.shape.param_dim()));
    for (int m = 0; m < m1; ++m)
        for (int row = 0; row < n; ++row)
            theta.push_back(params.hidden(row, m));
    theta.insert(theta.end(), params.output.begin(), params.output.end());
    return theta;
}

NetworkParams unflatten(std::span<const double> theta, NetworkShape shape) {
    const int expected = shape.param_dim();
    if (static_cast<int>(theta.size()) != expected)
        throw std::invalid_argument("unflatten: theta has length " +
                                    std::to_string(theta.size()) + ", expected " +
                                    std::to_string(expected));
    NetworkParams p = zero_params(shape);
    std::size_t k = 0;
    for (int m = 0; m <= shape.input_dim; ++m)
        for (int row = 0; row < shape.hidden_dim; ++row)
            p.hidden(row, m) = theta[k++];
    for (int j = 0; j <= shape.hidden_dim; ++j) p.output[j] = theta[k++];
    return p;
}

std::vector<double> Dataset::input_column(int i) const {
    std::vector<double> x(inputs.rows());
    for (std::size_t row = 0; row < inputs.rows(); ++row) x[row] = inputs(row, i);
    return x;
}

void validate(const Dataset& data) {
    if (data.labels.empty())
        throw std::invalid_argument("dataset: needs at least one sample");
    if (data.inputs.cols() != data.labels.size())
        throw std::invalid_argument("dataset: input columns and labels disagree");
    for (int q : data.labels)
        if (q != 0 && q != 1)
            throw std::invalid_argument("dataset: labels must be 0 or 1");
}

namespace {

double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void require_finite(std::span<const double> v, const char* stage) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string("forward: non-finite ") + stage);
}

}  // namespace

ForwardTrace forward(const NetworkParams& params, ActivationKind kind,
                     std::span<const double> input, int label) {
    const int m = params.shape.input_dim;
    const int n = params.shape.hidden_dim;
    if (static_cast<int>(input.size()) != m)
        throw std::invalid_argument("forward: input dimension mismatch");
    if (label != 0 && label != 1)
        throw std::invalid_argument("forward: label must be 0 or 1");
    require_finite(input, "input");

    ForwardTrace t;
    t.preact.resize(n);
    for (int row = 0; row < n; ++row) {
        double acc = params.hidden(row, 0);  // bias, h(x) starts with 1
        for (int col = 0; col < m; ++col) acc += params.hidden(row, col + 1) * input[col];
        t.preact[row] = acc;
    }
    require_finite(t.preact, "pre-activation");

    eval_vec(kind, t.preact, t.hidden, t.act_slope, t.act_curve);
    require_finite(t.hidden, "hidden activation");

    double z = params.output[0];
    for (int row = 0; row < n; ++row) z += params.output[row + 1] * t.hidden[row];
    if (!std::isfinite(z)) throw std::runtime_error("forward: non-finite logit");

    t.logit = z;
    t.prob = stable_sigmoid(z);
    t.prob_slope = t.prob * (1.0 - t.prob);
    t.residual = t.prob - label;
    return t;
}

BatchTrace forward_batch(const NetworkParams& params, ActivationKind kind,
                         const Dataset& data) {
    validate(data);
    if (data.input_dim() != params.shape.input_dim)
        throw std::invalid_argument("forward_batch: dataset dimension mismatch");

    const int count = data.sample_count();
    const int n = params.shape.hidden_dim;

    BatchTrace batch;
    batch.samples.reserve(count);
    batch.hidden_cols = Matrix(n, count);
    batch.act_slopes = Matrix(count, n);
    batch.act_curves = Matrix(count, n);
    batch.prob_slopes.resize(count);
    batch.residuals.resize(count);

    for (int i = 0; i < count; ++i) {
        ForwardTrace t = forward(params, kind, data.input_column(i), data.labels[i]);
        for (int row = 0; row < n; ++row) {
            batch.hidden_cols(row, i) = t.hidden[row];
            batch.act_slopes(i, row) = t.act_slope[row];
            batch.act_curves(i, row) = t.act_curve[row];
        }
        batch.prob_slopes[i] = t.prob_slope;
        batch.residuals[i] = t.residual;
        batch.samples.push_back(std::move(t));
    }
    return batch;
}

}  // namespace sharpbound

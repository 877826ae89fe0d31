#include "sharpbound/loss_grad.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpbound {

namespace {

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// grad of one sample, accumulated into `out` (flatten layout)
void accumulate_grad(const NetworkParams& params, const ForwardTrace& t,
                     std::span<const double> input, std::vector<double>& out) {
    const int m = params.shape.input_dim;
    const int n = params.shape.hidden_dim;
    const double res = t.residual;
    const auto vt = params.output_tail();

    // hidden part: block m is res * h(x)_m * (f'(y) .* output_tail)
    for (int col = 0; col <= m; ++col) {
        const double hx = (col == 0) ? 1.0 : input[col - 1];
        const double scale = res * hx;
        for (int row = 0; row < n; ++row)
            out[static_cast<std::size_t>(col) * n + row] += scale * t.act_slope[row] * vt[row];
    }
    // output part: res * h(r)
    const std::size_t base = static_cast<std::size_t>(m + 1) * n;
    out[base] += res;
    for (int row = 0; row < n; ++row) out[base + 1 + row] += res * t.hidden[row];
}

}  // namespace

// Works off the logit, so a probability that rounds to 0.0 or 1.0 in
// floating point (|logit| > ~37) still yields the exact loss.
double loss(const ForwardTrace& trace, int label) {
    if (label != 0 && label != 1)
        throw std::invalid_argument("loss: label must be 0 or 1");
    if (!std::isfinite(trace.logit))
        throw std::runtime_error("loss: non-finite logit");
    return softplus(trace.logit) - label * trace.logit;
}

double total_loss(const NetworkParams& params, ActivationKind kind,
                  const Dataset& data) {
    validate(data);
    double sum = 0.0;
    for (int i = 0; i < data.sample_count(); ++i)
        sum += loss(forward(params, kind, data.input_column(i), data.labels[i]),
                    data.labels[i]);
    return sum;
}

std::vector<double> grad_single(const NetworkParams& params, ActivationKind kind,
                                std::span<const double> input, int label) {
    std::vector<double> g(static_cast<std::size_t>(params.shape.param_dim()), 0.0);
    const ForwardTrace t = forward(params, kind, input, label);
    accumulate_grad(params, t, input, g);
    return g;
}

std::vector<double> grad_total(const NetworkParams& params, ActivationKind kind,
                               const Dataset& data) {
    return loss_and_grad_total(params, kind, data).grad;
}

LossGrad loss_and_grad_total(const NetworkParams& params, ActivationKind kind,
                             const Dataset& data) {
    validate(data);
    LossGrad out;
    out.grad.assign(static_cast<std::size_t>(params.shape.param_dim()), 0.0);
    for (int i = 0; i < data.sample_count(); ++i) {
        const std::vector<double> x = data.input_column(i);
        const ForwardTrace t = forward(params, kind, x, data.labels[i]);
        out.loss += loss(t, data.labels[i]);
        accumulate_grad(params, t, x, out.grad);
    }
    return out;
}

}  // namespace sharpbound

#include "sharpbound/hessian.hpp"

#include <stdexcept>
#include <vector>

namespace sharpbound {

namespace {

HessianBundle zero_bundle(NetworkShape shape) {
    const std::size_t nw = static_cast<std::size_t>(shape.input_dim + 1) * shape.hidden_dim;
    const std::size_t nv = static_cast<std::size_t>(shape.hidden_dim) + 1;
    HessianBundle b;
    b.ww = Matrix(nw, nw);
    b.wv = Matrix(nw, nv);
    b.vw = Matrix(nv, nw);
    b.vv = Matrix(nv, nv);
    b.assembled = Matrix(nw + nv, nw + nv);
    return b;
}

void accumulate_sample(HessianBundle& b, const NetworkParams& params,
                       const ForwardTrace& t, std::span<const double> input) {
    const int m1 = params.shape.input_dim + 1;
    const int n = params.shape.hidden_dim;
    const auto vt = params.output_tail();
    const double slope = t.prob_slope;
    const double res = t.residual;

    std::vector<double> hx(m1);
    hx[0] = 1.0;
    for (int col = 1; col < m1; ++col) hx[col] = input[col - 1];
    std::vector<double> hr(n + 1);
    hr[0] = 1.0;
    for (int row = 0; row < n; ++row) hr[row + 1] = t.hidden[row];

    // N x N core of the ww block: slope * a a^T + res * diag(vt .* f'')
    std::vector<double> a(n);
    for (int row = 0; row < n; ++row) a[row] = t.act_slope[row] * vt[row];
    Matrix core(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) core(r, c) = slope * a[r] * a[c];
        core(r, r) += res * vt[r] * t.act_curve[r];
    }

    // ww = h(x) h(x)^T kron core, laid out so index m*N + row matches flatten
    for (int mi = 0; mi < m1; ++mi)
        for (int mj = 0; mj < m1; ++mj) {
            const double hh = hx[mi] * hx[mj];
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    b.ww(static_cast<std::size_t>(mi) * n + r,
                         static_cast<std::size_t>(mj) * n + c) += hh * core(r, c);
        }

    // vv = slope * h(r) h(r)^T
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) b.vv(j, k) += slope * hr[j] * hr[k];

    // mixed block: entry (j, m*N + row) = h(x)_m * cross(j, row) with
    // cross = slope * h(r) (vt .* f')^T + res * [0; diag(f')]
    Matrix cross(n + 1, n);
    for (int j = 0; j <= n; ++j)
        for (int row = 0; row < n; ++row) {
            double val = slope * hr[j] * a[row];
            if (j == row + 1) val += res * t.act_slope[row];
            cross(j, row) = val;
        }
    for (int mi = 0; mi < m1; ++mi)
        for (int j = 0; j <= n; ++j)
            for (int row = 0; row < n; ++row) {
                const double val = hx[mi] * cross(j, row);
                b.vw(j, static_cast<std::size_t>(mi) * n + row) += val;
                b.wv(static_cast<std::size_t>(mi) * n + row, j) += val;
            }
}

// Upper triangle is taken as computed; the lower triangle is a mirror
// copy, never an average, so a block bug cannot hide behind symmetrization.
void assemble(HessianBundle& b) {
    const std::size_t nw = b.ww.rows();
    const std::size_t dim = b.assembled.rows();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            double val;
            if (j < nw)
                val = b.ww(i, j);
            else if (i < nw)
                val = b.wv(i, j - nw);
            else
                val = b.vv(i - nw, j - nw);
            b.assembled(i, j) = val;
            b.assembled(j, i) = val;
        }
}

}  // namespace

HessianBundle hessian_single(const NetworkParams& params, ActivationKind kind,
                             std::span<const double> input, int label) {
    HessianBundle b = zero_bundle(params.shape);
    const ForwardTrace t = forward(params, kind, input, label);
    accumulate_sample(b, params, t, input);
    assemble(b);
    return b;
}

HessianBundle hessian_total(const NetworkParams& params, ActivationKind kind,
                            const Dataset& data) {
    validate(data);
    if (data.input_dim() != params.shape.input_dim)
        throw std::invalid_argument("hessian_total: dataset dimension mismatch");
    HessianBundle b = zero_bundle(params.shape);
    for (int i = 0; i < data.sample_count(); ++i) {
        const std::vector<double> x = data.input_column(i);
        const ForwardTrace t = forward(params, kind, x, data.labels[i]);
        accumulate_sample(b, params, t, x);
    }
    assemble(b);
    return b;
}

}  // namespace sharpbound

#include "sharpbound/traces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sharpbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_consistent(const BatchTrace& batch, const NetworkParams& params,
                      const Dataset& data) {
    if (batch.sample_count() != data.sample_count())
        throw std::invalid_argument("traces: batch and dataset sample counts differ");
    if (static_cast<int>(batch.hidden_cols.rows()) != params.shape.hidden_dim)
        throw std::invalid_argument("traces: batch and params hidden dims differ");
    if (data.input_dim() != params.shape.input_dim)
        throw std::invalid_argument("traces: dataset and params input dims differ");
}

double input_self_product(const Dataset& data, int i) {
    double acc = 0.0;
    for (std::size_t row = 0; row < data.inputs.rows(); ++row)
        acc += data.inputs(row, i) * data.inputs(row, i);
    return acc;
}

double input_pair_product(const Dataset& data, int i, int j) {
    double acc = 0.0;
    for (std::size_t row = 0; row < data.inputs.rows(); ++row)
        acc += data.inputs(row, i) * data.inputs(row, j);
    return acc;
}

double hidden_pair_product(const Matrix& hidden_cols, int i, int j) {
    double acc = 0.0;
    for (std::size_t row = 0; row < hidden_cols.rows(); ++row)
        acc += hidden_cols(row, i) * hidden_cols(row, j);
    return acc;
}

}  // namespace

TraceParts trace_closed_form(const BatchTrace& batch, const NetworkParams& params,
                             const Dataset& data) {
    check_consistent(batch, params, data);
    const int count = batch.sample_count();
    const int n = params.shape.hidden_dim;
    const auto vt = params.output_tail();

    TraceParts out;
    for (int i = 0; i < count; ++i) {
        const ForwardTrace& t = batch.samples[i];
        out.vv += t.prob_slope * (1.0 + hidden_pair_product(batch.hidden_cols, i, i));

        double slope_norm2 = 0.0;  // ||f'(y) .* vt||^2
        double curve_dot = 0.0;    // vt . f''(y)
        for (int row = 0; row < n; ++row) {
            const double av = t.act_slope[row] * vt[row];
            slope_norm2 += av * av;
            curve_dot += vt[row] * t.act_curve[row];
        }
        out.ww += (1.0 + input_self_product(data, i)) *
                  (t.prob_slope * slope_norm2 + t.residual * curve_dot);
    }
    out.total = out.ww + out.vv;
    return out;
}

TraceSquared trace_sq_closed_form(const BatchTrace& batch, const NetworkParams& params,
                                  const Dataset& data) {
    check_consistent(batch, params, data);
    const int count = batch.sample_count();
    const int n = params.shape.hidden_dim;
    const auto vt = params.output_tail();

    TraceSquared out;
    out.phi = Matrix(count, count);
    out.psi = Matrix(count, count);
    out.omega = Matrix(count, count);

    for (int i = 0; i < count; ++i) {
        const ForwardTrace& ti = batch.samples[i];
        for (int j = 0; j < count; ++j) {
            const ForwardTrace& tj = batch.samples[j];

            // entrywise sums standing in for the diagonal-matrix products
            double slope_pair = 0.0;   // vt F'(y_j) F'(y_i) vt
            double mix_ij = 0.0;       // vt F'(y_i) diag(vt) F''(y_j) F'(y_i) vt
            double mix_ji = 0.0;       // same with i and j swapped
            double curve_pair = 0.0;   // vt F''(y_i) F''(y_j) vt
            double hid_slope_i = 0.0;  // f(y_i) F'(y_j) F'(y_i) vt
            double hid_slope_j = 0.0;  // vt F'(y_j) F'(y_i) f(y_j)
            double slope_dot = 0.0;    // f'(y_i) . f'(y_j)
            for (int row = 0; row < n; ++row) {
                const double v = vt[row];
                const double si = ti.act_slope[row];
                const double sj = tj.act_slope[row];
                slope_pair += v * v * si * sj;
                mix_ij += v * v * v * si * si * tj.act_curve[row];
                mix_ji += v * v * v * sj * sj * ti.act_curve[row];
                curve_pair += v * v * ti.act_curve[row] * tj.act_curve[row];
                hid_slope_i += ti.hidden[row] * sj * si * v;
                hid_slope_j += v * sj * si * tj.hidden[row];
                slope_dot += si * sj;
            }
            const double hid_pair = hidden_pair_product(batch.hidden_cols, i, j);

            const double spi = ti.prob_slope, spj = tj.prob_slope;
            const double ri = ti.residual, rj = tj.residual;

            const double phi = spi * spj * slope_pair * slope_pair +
                               spi * rj * mix_ij + ri * spj * mix_ji +
                               ri * rj * curve_pair;
            const double psi = spi * spj * (1.0 + hid_pair) * slope_pair +
                               spi * rj * hid_slope_i + ri * spj * hid_slope_j +
                               ri * rj * slope_dot;
            const double omega = spi * spj;

            out.phi(i, j) = phi;
            out.psi(i, j) = psi;
            out.omega(i, j) = omega;

            const double xg = 1.0 + input_pair_product(data, i, j);
            const double rg = 1.0 + hid_pair;
            out.sq_total += phi * xg * xg + 2.0 * psi * xg + omega * rg * rg;
        }
    }
    return out;
}

double trace_sq_matrix_form(const TraceSquared& sq, const Dataset& data,
                            const Matrix& hidden_cols) {
    const int count = data.sample_count();
    double acc = 0.0;
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) {
            const double xg = 1.0 + input_pair_product(data, i, j);
            const double rg = 1.0 + hidden_pair_product(hidden_cols, i, j);
            acc += sq.phi(i, j) * xg * xg + 2.0 * sq.psi(i, j) * xg +
                   sq.omega(i, j) * rg * rg;
        }
    return acc;
}

TraceBundle trace_bundle(const BatchTrace& batch, const NetworkParams& params,
                         const Dataset& data) {
    return {trace_closed_form(batch, params, data),
            trace_sq_closed_form(batch, params, data)};
}

TraceBounds trace_bounds(const ActivationProfile& profile, const NetworkParams& params,
                         const Dataset& data, const BatchTrace& batch) {
    check_consistent(batch, params, data);
    const int count = data.sample_count();
    const auto vt = params.output_tail();

    TraceBounds out;
    out.ub_tr_vv = std::isfinite(profile.output_sup)
                       ? 0.25 * count * (params.shape.hidden_dim + 1)
                       : kInf;

    double vt_norm2 = 0.0, vt_l1 = 0.0;
    for (double v : vt) {
        vt_norm2 += v * v;
        vt_l1 += std::abs(v);
    }
    double sum_x = 0.0;
    for (int i = 0; i < count; ++i) sum_x += 1.0 + input_self_product(data, i);
    // l1 norm here: each |vt_n| pairs with its own worst-case f'' sign,
    // so the signed sum |vt . 1| would undercount mixed-sign weights.
    out.ub_tr_ww = (0.25 * profile.zeta1 * vt_norm2 + profile.zeta2 * vt_l1) * sum_x;

    const TraceSquared sq = trace_sq_closed_form(batch, params, data);
    double psi_fro2 = 0.0, x_fro2 = 0.0, r_fro2 = 0.0;
    out.phi_max = sq.phi(0, 0);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) {
            psi_fro2 += sq.psi(i, j) * sq.psi(i, j);
            const double xg = 1.0 + input_pair_product(data, i, j);
            const double rg = 1.0 + hidden_pair_product(batch.hidden_cols, i, j);
            x_fro2 += xg * xg;
            r_fro2 += rg * rg;
            out.phi_max = std::max(out.phi_max, sq.phi(i, j));
        }
    out.ub_tr_sq = psi_fro2 + (1.0 + out.phi_max) * x_fro2 + r_fro2 / 16.0;
    return out;
}

NormalizedMaxima normalized_input_maxima(int input_dim, int hidden_dim,
                                         int sample_count, ActivationKind kind) {
    NormalizedMaxima out;
    const double count = sample_count;
    out.max_sum_x = count * (1.0 + input_dim);
    out.max_fro_x = count * count * (1.0 + input_dim) * (1.0 + input_dim);
    out.sup_fro_r = std::isfinite(profile(kind).output_sup)
                        ? count * count * (1.0 + hidden_dim) * (1.0 + hidden_dim)
                        : kInf;
    return out;
}

bool trace_sandwich_check(double tr_total, double tr_sq_total, int dim, bool psd) {
    if (dim < 1) throw std::domain_error("trace_sandwich_check: dim must be positive");
    const double tr2 = tr_total * tr_total;
    const double slack = 1e-12 * std::max({1.0, std::abs(tr2), std::abs(tr_sq_total)});
    bool ok = tr2 / dim <= tr_sq_total + slack;
    if (psd) ok = ok && tr_sq_total <= tr2 + slack;
    return ok;
}

}  // namespace sharpbound

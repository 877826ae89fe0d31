#include "sharpbound/bound.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpbound {

EigenvalueBound lambda_sup_closed_form(double tr_total, double tr_sq_total, int dim) {
    if (dim < 1)
        throw std::domain_error("lambda_sup_closed_form: dimension must be positive");
    EigenvalueBound out;
    out.mu = tr_total / dim;
    const double raw = tr_sq_total / dim - out.mu * out.mu;
    // mathematically >= 0; round-off can dip a hair below
    out.sigma2 = std::max(raw, 0.0);
    out.clamp = raw < 0.0 ? -raw : 0.0;
    out.lambda_sup = out.mu + std::sqrt((dim - 1) * out.sigma2);
    return out;
}

SpectrumReport spectrum_report(const Matrix& symmetric, double tr_total,
                               double tr_sq_total) {
    if (symmetric.rows() != symmetric.cols())
        throw std::invalid_argument("spectrum_report: matrix is not square");
    if (symmetry_gap(symmetric) > 1e-12)
        throw std::invalid_argument("spectrum_report: matrix is not symmetric");

    SpectrumReport report;
    report.eigenvalues = jacobi_eigenvalues(symmetric);
    report.lambda1 = report.eigenvalues.front();

    const EigenvalueBound b = lambda_sup_closed_form(
        tr_total, tr_sq_total, static_cast<int>(symmetric.rows()));
    report.mu = b.mu;
    report.sigma2 = b.sigma2;
    report.lambda_sup = b.lambda_sup;

    const double tol = 1e-8 * std::max(1.0, std::abs(report.lambda1));
    report.psd = report.eigenvalues.back() >= -tol;
    return report;
}

SpectrumReport spectrum_report(const HessianBundle& hessian, const TraceBundle& traces) {
    return spectrum_report(hessian.assembled, traces.parts.total,
                           traces.squared.sq_total);
}

double flatness_constant(const BatchTrace& batch, const NetworkParams& params,
                         const Dataset& data) {
    const int count = batch.sample_count();
    const int n = params.shape.hidden_dim;
    const int dim = params.shape.param_dim();
    const auto vt = params.output_tail();

    // c1 bounds |tr(H)| / max_res, via prob_slope_i <= |residual_i|
    double c1 = 0.0;
    for (int i = 0; i < count; ++i) {
        const ForwardTrace& t = batch.samples[i];
        double hid2 = 0.0, slope_norm2 = 0.0, curve_l1 = 0.0, x2 = 0.0;
        for (int row = 0; row < n; ++row) {
            hid2 += t.hidden[row] * t.hidden[row];
            const double av = t.act_slope[row] * vt[row];
            slope_norm2 += av * av;
            curve_l1 += std::abs(vt[row] * t.act_curve[row]);
        }
        for (int row = 0; row < params.shape.input_dim; ++row)
            x2 += data.inputs(row, i) * data.inputs(row, i);
        c1 += (1.0 + hid2) + (1.0 + x2) * (slope_norm2 + curve_l1);
    }

    // c2 bounds tr(H^2) / max_res^2: every bilinear form is dominated by
    // max_res^2 times the entrywise l1 norm of its 2x2 coefficient block
    double c2 = 0.0;
    for (int i = 0; i < count; ++i) {
        const ForwardTrace& ti = batch.samples[i];
        for (int j = 0; j < count; ++j) {
            const ForwardTrace& tj = batch.samples[j];
            double slope_pair = 0.0, mix_ij = 0.0, mix_ji = 0.0, curve_pair = 0.0;
            double hid_slope_i = 0.0, hid_slope_j = 0.0, slope_dot = 0.0;
            double xg = 1.0, rg = 1.0;
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
                rg += ti.hidden[row] * tj.hidden[row];
            }
            for (int row = 0; row < params.shape.input_dim; ++row)
                xg += data.inputs(row, i) * data.inputs(row, j);

            const double phi_l1 = slope_pair * slope_pair + std::abs(mix_ij) +
                                  std::abs(mix_ji) + std::abs(curve_pair);
            const double psi_l1 = std::abs(rg * slope_pair) + std::abs(hid_slope_i) +
                                  std::abs(hid_slope_j) + std::abs(slope_dot);
            c2 += phi_l1 * xg * xg + 2.0 * psi_l1 * std::abs(xg) + rg * rg;
        }
    }
    return c1 / dim + std::sqrt((dim - 1) * c2 / dim);
}

bool asymptotic_flatness_check(const BatchTrace& batch, const NetworkParams& params,
                               const Dataset& data, double eps) {
    if (!(eps > 0.0))
        throw std::domain_error("asymptotic_flatness_check: eps must be positive");
    double max_res = 0.0;
    for (double r : batch.residuals) max_res = std::max(max_res, std::abs(r));
    if (max_res >= eps) return true;  // premise empty, nothing to check

    const TraceBundle traces = trace_bundle(batch, params, data);
    const EigenvalueBound b = lambda_sup_closed_form(
        traces.parts.total, traces.squared.sq_total, params.shape.param_dim());
    return b.lambda_sup < flatness_constant(batch, params, data) * eps;
}

}  // namespace sharpbound

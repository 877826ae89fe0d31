#pragma once

#include "sharpbound/hessian.hpp"
#include "sharpbound/matrix.hpp"
#include "sharpbound/network.hpp"
#include "sharpbound/traces.hpp"

namespace sharpbound {

// lambda_sup = mu + sqrt(D-1) * sigma, computed from the two traces.
// sigma2 holds the clamped value; `clamp` records how far below zero
// round-off pushed the raw variance (0 when no clamping happened).
struct EigenvalueBound {
    double mu = 0.0;
    double sigma2 = 0.0;
    double lambda_sup = 0.0;
    double clamp = 0.0;
};

EigenvalueBound lambda_sup_closed_form(double tr_total, double tr_sq_total, int dim);

struct SpectrumReport {
    std::vector<double> eigenvalues;  // descending
    double lambda1 = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double lambda_sup = 0.0;
    bool psd = false;  // smallest eigenvalue >= -1e-8 * max(1, |lambda1|)
};

// Numeric eigenvalues (the oracle side) next to the closed-form bound
// (the product). The matrix must be symmetric to 1e-12 in max norm.
SpectrumReport spectrum_report(const Matrix& symmetric, double tr_total,
                               double tr_sq_total);
SpectrumReport spectrum_report(const HessianBundle& hessian, const TraceBundle& traces);

// Instance constant C such that max_i |residual_i| < eps implies
// lambda_sup < C * eps. Follows from prob_slope_i <= |residual_i| and
// the bilinear structure of the trace forms.
double flatness_constant(const BatchTrace& batch, const NetworkParams& params,
                         const Dataset& data);

// True when the instance is consistent with the vanishing-residual
// limit: either some |residual| >= eps, or lambda_sup < C * eps.
bool asymptotic_flatness_check(const BatchTrace& batch, const NetworkParams& params,
                               const Dataset& data, double eps);

}  // namespace sharpbound

#pragma once

#include "sharpbound/activation.hpp"
#include "sharpbound/network.hpp"

namespace sharpbound {

// Closed forms for tr(H) and tr(H^2) evaluated from forward traces
// alone -- the Hessian itself is never materialized on this path.

struct TraceParts {
    double ww = 0.0;
    double vv = 0.0;
    double total = 0.0;
};

TraceParts trace_closed_form(const BatchTrace& batch, const NetworkParams& params,
                             const Dataset& data);

// tr(H^2) as the double sum over sample pairs of bilinear forms in
// o_i = [prob_slope_i; residual_i]. The three I x I coefficient
// matrices are returned for the bound computations.
struct TraceSquared {
    double sq_total = 0.0;
    Matrix phi;    // pairs the squared-input Gram weights
    Matrix psi;    // pairs the plain-input Gram weights
    Matrix omega;  // prob_slope outer product, entries in (0, 1/16]
};

TraceSquared trace_sq_closed_form(const BatchTrace& batch, const NetworkParams& params,
                                  const Dataset& data);

// Cross-check path: the same quantity as the Frobenius inner products
// <Phi,(J+X^T X)^(.2)> + 2<Psi,(J+X^T X)> + <Omega,(J+R^T R)^(.2)>.
double trace_sq_matrix_form(const TraceSquared& sq, const Dataset& data,
                            const Matrix& hidden_cols);

struct TraceBundle {
    TraceParts parts;
    TraceSquared squared;
};

TraceBundle trace_bundle(const BatchTrace& batch, const NetworkParams& params,
                         const Dataset& data);

// Upper bounds on the traces. ub_tr_vv is +infinity unless the
// activation saturates (finite output_sup). ub_tr_ww uses the l1 norm
// of the output weights; see the module tests for why the signed sum
// is not enough when the weights mix signs.
struct TraceBounds {
    double ub_tr_vv = 0.0;
    double ub_tr_ww = 0.0;
    double ub_tr_sq = 0.0;
    double phi_max = 0.0;
};

TraceBounds trace_bounds(const ActivationProfile& profile, const NetworkParams& params,
                         const Dataset& data, const BatchTrace& batch);

// Extremes of the data-dependent factors when inputs are normalized to
// [0,1]: sum form I(1+M), squared Gram form I^2(1+M)^2, and the hidden
// counterpart I^2(1+N)^2 for saturating activations (+infinity otherwise).
struct NormalizedMaxima {
    double max_sum_x = 0.0;
    double max_fro_x = 0.0;
    double sup_fro_r = 0.0;
};

NormalizedMaxima normalized_input_maxima(int input_dim, int hidden_dim,
                                         int sample_count, ActivationKind kind);

// tr^2/D <= tr(H^2) always; tr(H^2) <= tr^2 additionally when the
// matrix is PSD. Checked with a relative slack of 1e-12 for round-off.
bool trace_sandwich_check(double tr_total, double tr_sq_total, int dim, bool psd);

}  // namespace sharpbound

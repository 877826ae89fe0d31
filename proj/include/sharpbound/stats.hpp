#pragma once

#include <span>

namespace sharpbound {

// Unweighted mean of the per-class F1 scores for binary labels. A class
// absent from both predictions and truth counts as F1 = 1.
double macro_f1(std::span<const int> predictions, std::span<const int> truth);

// Two-sided Mann-Whitney U test with midranks for ties. U is the
// statistic of the first sample (pairs where a beats b). Exact
// enumeration when min(n_a, n_b) < 8 and the arrangement count stays
// below ~2e6; tie-corrected, continuity-corrected normal approximation
// otherwise.
struct MannWhitneyResult {
    double u = 0.0;
    double p_two_sided = 1.0;
};

MannWhitneyResult mann_whitney_u(std::span<const double> sample_a,
                                 std::span<const double> sample_b);

// Spearman rank correlation (midranks for ties); NaN for fewer than
// two points or zero rank variance.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

double median(std::span<const double> values);

}  // namespace sharpbound

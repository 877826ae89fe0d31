#include "sharpbound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sharpbound {

double macro_f1(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("macro_f1: length mismatch");
    double sum = 0.0;
    for (int cls : {0, 1}) {
        long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool pred_is = predictions[i] == cls;
            const bool true_is = truth[i] == cls;
            tp += pred_is && true_is;
            fp += pred_is && !true_is;
            fn += !pred_is && true_is;
        }
        if (tp + fp + fn == 0)
            sum += 1.0;  // class never appears on either side
        else
            sum += 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    }
    return sum / 2.0;
}

namespace {

// midranks of the pooled, sorted values
std::vector<double> midranks(const std::vector<double>& sorted) {
    std::vector<double> rank(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[k] = shared;
        i = j + 1;
    }
    return rank;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double acc = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    return acc;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> sample_a,
                                 std::span<const double> sample_b) {
    if (sample_a.empty() || sample_b.empty())
        throw std::invalid_argument("mann_whitney_u: samples must be nonempty");

    const std::size_t na = sample_a.size();
    const std::size_t nb = sample_b.size();
    const std::size_t total = na + nb;

    // pooled sort; membership travels with the value
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(total);
    for (double v : sample_a) pooled.emplace_back(v, 0);
    for (double v : sample_b) pooled.emplace_back(v, 1);
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<double> values(total);
    for (std::size_t i = 0; i < total; ++i) values[i] = pooled[i].first;
    const std::vector<double> rank = midranks(values);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < total; ++i)
        if (pooled[i].second == 0) rank_sum_a += rank[i];
    const double u_a = rank_sum_a - 0.5 * na * (na + 1);
    const double mean_u = 0.5 * static_cast<double>(na) * static_cast<double>(nb);

    MannWhitneyResult out;
    out.u = u_a;

    const std::size_t smaller = std::min(na, nb);
    const bool exact_feasible = binomial(total, smaller) <= 2e6;
    if (smaller < 8 && exact_feasible) {
        // enumerate which pooled positions belong to the smaller sample;
        // |U - mean| is the same seen from either sample
        const double offset = 0.5 * smaller * (smaller + 1);
        const double mean_small =
            0.5 * static_cast<double>(smaller) * static_cast<double>(total - smaller);
        double observed;
        {
            double rs = 0.0;
            const int tag = (na <= nb) ? 0 : 1;
            for (std::size_t i = 0; i < total; ++i)
                if (pooled[i].second == tag) rs += rank[i];
            observed = std::abs(rs - offset - mean_small);
        }
        std::vector<std::size_t> comb(smaller);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        double matched = 0.0, all = 0.0;
        while (true) {
            double rs = 0.0;
            for (std::size_t idx : comb) rs += rank[idx];
            all += 1.0;
            if (std::abs(rs - offset - mean_small) >= observed - 1e-9) matched += 1.0;
            // next combination
            std::size_t i = smaller;
            while (i > 0) {
                --i;
                if (comb[i] != i + total - smaller) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < smaller; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    out.p_two_sided = matched / all;
                    return out;
                }
            }
        }
    }

    // tie-corrected normal approximation with continuity correction
    double tie_sum = 0.0;
    {
        std::size_t i = 0;
        while (i < total) {
            std::size_t j = i;
            while (j + 1 < total && values[j + 1] == values[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
    }
    const double n = static_cast<double>(total);
    double var_u = (static_cast<double>(na) * nb / 12.0) *
                   (n + 1.0 - tie_sum / (n * (n - 1.0)));
    if (var_u <= 0.0) {
        out.p_two_sided = 1.0;  // all values tied
        return out;
    }
    const double z = std::max(std::abs(u_a - mean_u) - 0.5, 0.0) / std::sqrt(var_u);
    out.p_two_sided = std::min(1.0, 2.0 * normal_sf(z));
    return out;
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("spearman_correlation: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();

    auto rank_of = [n](std::span<const double> v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> rank(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = shared;
            i = j + 1;
        }
        return rank;
    };

    const std::vector<double> ra = rank_of(a);
    const std::vector<double> rb = rank_of(b);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(var_a * var_b);
}

double median(std::span<const double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return (v.size() % 2 == 1) ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace sharpbound

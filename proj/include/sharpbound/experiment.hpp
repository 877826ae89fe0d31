#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sharpbound/bound.hpp"
#include "sharpbound/network.hpp"
#include "sharpbound/rng.hpp"
#include "sharpbound/stats.hpp"

namespace sharpbound {

// Everything the sweep needs, with the protocol's defaults. The
// learning rate is a free parameter of the protocol; 0.1 makes
// roughly 85% of seeds converge within the epoch budget.
struct ExperimentConfig {
    int input_dim = 2;
    int hidden_dim = 3;
    int train_samples = 50;
    int test_samples = 1000;
    int seeds = 500;
    int max_epochs = 10000;
    double eps_converge = 1e-3;
    double learning_rate = 0.1;
    double init_range = 10.0;  // theta0 ~ U(-init_range, init_range)^D
    ActivationKind activation = ActivationKind::Sigmoid;
    std::vector<double> class0_mean = {1.0, 1.0};
    std::vector<double> class1_mean = {-1.0, -1.0};
    double variance = 2.0;
    std::uint64_t rng_seed = 0;
    int trajectory_stride = 50;  // 0 disables spectral logging during training
    int threads = 0;             // 0 = hardware concurrency

    NetworkShape shape() const { return {input_dim, hidden_dim}; }
    void validate() const;
};

struct CriticalPoint {
    std::vector<double> theta;
    double final_loss = 0.0;
    double grad_ratio = 0.0;  // final gradient norm over the initial one
    int epochs = 0;
    SpectrumReport spectrum;
    double macro_f1_test = 0.0;
    int seed = -1;
};

enum class Split { Train, Test };

// Balanced two-Gaussian binary classification data. Odd sample counts
// get a ceil/floor class split and a note in *warning.
Dataset generate_dataset(const ExperimentConfig& cfg, Split split, Rng& rng,
                         std::string* warning = nullptr);

struct TrajectoryPoint {
    int epoch = 0;
    double loss = 0.0;
    double lambda_sup = 0.0;
    double lambda1 = 0.0;
};

struct TrainResult {
    std::optional<CriticalPoint> point;        // empty when not converged
    std::string failure;                       // why, when empty
    std::vector<TrajectoryPoint> trajectory;   // sampled every trajectory_stride epochs
};

// Full-batch gradient descent with the relative-gradient-norm stopping
// rule, checked every epoch. On convergence the spectrum is attached;
// macro_f1_test and seed are left for the caller.
TrainResult train_gd(const ExperimentConfig& cfg, const Dataset& data,
                     std::vector<double> theta0);

// Drops near-duplicate critical points: pairs closer than
// mean - 3 * std of all pairwise distances (clamped at zero) land in
// one cluster; the lowest-seed member of each cluster survives.
std::vector<CriticalPoint> dedup_critical_points(const std::vector<CriticalPoint>& points);

// Partition by the empirical lambda_sup quantile; ties go low.
struct HighLowSplit {
    std::vector<int> low;   // indices into the input
    std::vector<int> high;
    double threshold = 0.0;
};
HighLowSplit split_high_low(const std::vector<CriticalPoint>& points,
                            double quantile = 0.9);

// L(theta + alpha * direction) along a unit direction.
std::vector<std::pair<double, double>> loss_slice(const NetworkParams& params,
                                                  ActivationKind kind,
                                                  const Dataset& data,
                                                  std::span<const double> direction,
                                                  std::span<const double> alphas);

struct ExperimentReport {
    ExperimentConfig config;
    int converged_count = 0;
    std::vector<CriticalPoint> converged;       // seed order
    std::vector<CriticalPoint> unique_points;   // dedup survivors, seed order
    std::vector<std::string> failures;          // one line per non-converged seed
    std::vector<std::string> warnings;

    HighLowSplit groups;                        // over unique_points
    MannWhitneyResult f1_test;
    double median_f1_low = 0.0;
    double median_f1_high = 0.0;
    double spearman_output_norm = 0.0;  // ||vt||_F^2 vs lambda_sup
    double spearman_hidden_norm = 0.0;  // ||wt||_F^2 vs lambda_sup

    // figure data, one row per unique point
    std::vector<std::array<double, 2>> eigen_vs_bound;        // lambda1, lambda_sup
    std::vector<std::array<double, 4>> trace_pairs;           // tr num/ana, tr^2 num/ana
    std::vector<std::array<double, 3>> norm_rows;             // ||vt||^2, ||wt||^2, lambda_sup
    std::vector<std::array<double, 2>> ortho_rows;            // ||R^T R||_F^2, lambda_sup
    std::vector<TrajectoryPoint> trajectory_sharpest;
    std::vector<TrajectoryPoint> trajectory_flattest;
    int sharpest_seed = -1;
    int flattest_seed = -1;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace sharpbound

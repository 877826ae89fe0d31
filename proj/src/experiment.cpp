#include "sharpbound/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sharpbound/loss_grad.hpp"
#include "sharpbound/oracle.hpp"

namespace sharpbound {

void ExperimentConfig::validate() const {
    if (input_dim < 1 || hidden_dim < 1)
        throw std::domain_error("config: dimensions must be positive");
    if (train_samples < 1 || test_samples < 1 || seeds < 1 || max_epochs < 1)
        throw std::domain_error("config: counts must be positive");
    if (!(eps_converge > 0.0 && eps_converge < 1.0))
        throw std::domain_error("config: eps_converge must lie in (0,1)");
    if (!(learning_rate > 0.0))
        throw std::domain_error("config: learning rate must be positive");
    if (variance < 0.0)
        throw std::domain_error("config: variance must be nonnegative");
    if (static_cast<int>(class0_mean.size()) != input_dim ||
        static_cast<int>(class1_mean.size()) != input_dim)
        throw std::domain_error("config: class means must have input_dim entries");
    if (trajectory_stride < 0 || threads < 0)
        throw std::domain_error("config: stride and threads must be nonnegative");
}

Dataset generate_dataset(const ExperimentConfig& cfg, Split split, Rng& rng,
                         std::string* warning) {
    const int total = split == Split::Train ? cfg.train_samples : cfg.test_samples;
    const int class0 = total - total / 2;
    if (total % 2 != 0 && warning)
        *warning = "odd sample count " + std::to_string(total) + ": class split " +
                   std::to_string(class0) + "/" + std::to_string(total / 2);

    const double sd = std::sqrt(cfg.variance);
    Dataset data;
    data.inputs = Matrix(cfg.input_dim, total);
    data.labels.resize(total);
    for (int i = 0; i < total; ++i) {
        const bool first_class = i < class0;
        const auto& mean = first_class ? cfg.class0_mean : cfg.class1_mean;
        for (int row = 0; row < cfg.input_dim; ++row)
            data.inputs(row, i) = mean[row] + sd * rng.normal();
        data.labels[i] = first_class ? 0 : 1;
    }
    return data;
}

namespace {

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

SpectrumReport spectrum_at(const NetworkParams& params, ActivationKind kind,
                           const Dataset& data) {
    const BatchTrace batch = forward_batch(params, kind, data);
    const TraceBundle traces = trace_bundle(batch, params, data);
    return spectrum_report(hessian_total(params, kind, data), traces);
}

}  // namespace

TrainResult train_gd(const ExperimentConfig& cfg, const Dataset& data,
                     std::vector<double> theta0) {
    cfg.validate();
    const NetworkShape shape = cfg.shape();
    if (static_cast<int>(theta0.size()) != shape.param_dim())
        throw std::invalid_argument("train_gd: theta0 has the wrong length");

    TrainResult result;
    std::vector<double> theta = std::move(theta0);
    double initial_norm = -1.0;

    try {
        for (int epoch = 0; epoch <= cfg.max_epochs; ++epoch) {
            const NetworkParams params = unflatten(theta, shape);
            const LossGrad lg = loss_and_grad_total(params, cfg.activation, data);
            const double gnorm = l2_norm(lg.grad);
            if (epoch == 0) initial_norm = gnorm;

            const double ratio = initial_norm == 0.0 ? 0.0 : gnorm / initial_norm;

            if (cfg.trajectory_stride > 0 && epoch % cfg.trajectory_stride == 0) {
                const SpectrumReport spec = spectrum_at(params, cfg.activation, data);
                result.trajectory.push_back({epoch, lg.loss, spec.lambda_sup, spec.lambda1});
            }

            if (ratio < cfg.eps_converge) {
                CriticalPoint point;
                point.theta = theta;
                point.final_loss = lg.loss;
                point.grad_ratio = ratio;
                point.epochs = epoch;
                point.spectrum = spectrum_at(params, cfg.activation, data);
                result.point = std::move(point);
                return result;
            }
            if (epoch == cfg.max_epochs) break;

            for (std::size_t d = 0; d < theta.size(); ++d)
                theta[d] -= cfg.learning_rate * lg.grad[d];
        }
        result.failure = "no convergence within " + std::to_string(cfg.max_epochs) +
                         " epochs";
    } catch (const std::runtime_error& err) {
        result.failure = std::string("diverged: ") + err.what();
    }
    return result;
}

std::vector<CriticalPoint> dedup_critical_points(const std::vector<CriticalPoint>& points) {
    const std::size_t count = points.size();
    if (count < 2) return points;

    std::vector<double> dist;
    dist.reserve(count * (count - 1) / 2);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
            double acc = 0.0;
            for (std::size_t d = 0; d < points[i].theta.size(); ++d) {
                const double diff = points[i].theta[d] - points[j].theta[d];
                acc += diff * diff;
            }
            dist.push_back(std::sqrt(acc));
        }

    const double mean = std::accumulate(dist.begin(), dist.end(), 0.0) / dist.size();
    double var = 0.0;
    for (double d : dist) var += (d - mean) * (d - mean);
    var /= dist.size();
    // mean - 3*std can go negative; then no pair qualifies as duplicate
    const double threshold = std::max(mean - 3.0 * std::sqrt(var), 0.0);

    // connected components of the "closer than threshold" graph,
    // earliest member (lowest seed) represents each cluster
    std::vector<std::size_t> parent(count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t pair_index = 0;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j, ++pair_index)
            // exact coincidences are duplicates no matter where the
            // threshold lands (it is zero whenever all points coincide)
            if (dist[pair_index] < threshold || dist[pair_index] == 0.0) {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }

    std::vector<CriticalPoint> survivors;
    for (std::size_t i = 0; i < count; ++i)
        if (find(i) == i) survivors.push_back(points[i]);
    return survivors;
}

HighLowSplit split_high_low(const std::vector<CriticalPoint>& points, double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0))
        throw std::domain_error("split_high_low: quantile must lie in (0,1)");
    HighLowSplit split;
    const int count = static_cast<int>(points.size());
    if (count == 0) return split;

    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) values[i] = points[i].spectrum.lambda_sup;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    const int low_count = static_cast<int>(quantile * count);
    split.threshold = low_count >= 1 ? sorted[low_count - 1]
                                     : -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i)
        (values[i] <= split.threshold ? split.low : split.high).push_back(i);
    return split;
}

std::vector<std::pair<double, double>> loss_slice(const NetworkParams& params,
                                                  ActivationKind kind,
                                                  const Dataset& data,
                                                  std::span<const double> direction,
                                                  std::span<const double> alphas) {
    const std::vector<double> theta = flatten(params);
    if (direction.size() != theta.size())
        throw std::invalid_argument("loss_slice: direction has the wrong length");
    if (std::abs(l2_norm(direction) - 1.0) > 1e-8)
        throw std::invalid_argument("loss_slice: direction must be unit length");

    std::vector<std::pair<double, double>> out;
    out.reserve(alphas.size());
    std::vector<double> shifted(theta.size());
    for (double alpha : alphas) {
        for (std::size_t d = 0; d < theta.size(); ++d)
            shifted[d] = theta[d] + alpha * direction[d];
        out.emplace_back(alpha, total_loss(unflatten(shifted, params.shape), kind, data));
    }
    return out;
}

namespace {

double squared_gram_fro(const Matrix& hidden_cols) {
    const int count = static_cast<int>(hidden_cols.cols());
    double acc = 0.0;
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) {
            double dot = 0.0;
            for (std::size_t row = 0; row < hidden_cols.rows(); ++row)
                dot += hidden_cols(row, i) * hidden_cols(row, j);
            acc += dot * dot;
        }
    return acc;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;

    std::string warn_train, warn_test;
    Rng train_rng(cfg.rng_seed, 1);
    Rng test_rng(cfg.rng_seed, 2);
    const Dataset train_data = generate_dataset(cfg, Split::Train, train_rng, &warn_train);
    const Dataset test_data = generate_dataset(cfg, Split::Test, test_rng, &warn_test);
    if (!warn_train.empty()) report.warnings.push_back("train: " + warn_train);
    if (!warn_test.empty()) report.warnings.push_back("test: " + warn_test);

    // seeds are independent; results land in per-seed slots so the
    // assembly below is identical no matter the thread count
    std::vector<TrainResult> results(cfg.seeds);
    std::atomic<int> next_seed{0};
    auto worker = [&] {
        while (true) {
            const int seed = next_seed.fetch_add(1);
            if (seed >= cfg.seeds) return;
            Rng init_rng(cfg.rng_seed, 1000 + static_cast<std::uint64_t>(seed));
            std::vector<double> theta0(cfg.shape().param_dim());
            for (double& x : theta0) x = init_rng.uniform(-cfg.init_range, cfg.init_range);
            results[seed] = train_gd(cfg, train_data, std::move(theta0));
        }
    };
    int thread_count = cfg.threads > 0
                           ? cfg.threads
                           : static_cast<int>(std::thread::hardware_concurrency());
    thread_count = std::max(1, std::min(thread_count, cfg.seeds));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // test-set predictions per converged seed
    for (int seed = 0; seed < cfg.seeds; ++seed) {
        TrainResult& r = results[seed];
        if (!r.point) {
            report.failures.push_back("seed " + std::to_string(seed) + ": " + r.failure);
            continue;
        }
        CriticalPoint point = std::move(*r.point);
        point.seed = seed;
        const NetworkParams params = unflatten(point.theta, cfg.shape());
        std::vector<int> predictions(test_data.sample_count());
        for (int i = 0; i < test_data.sample_count(); ++i) {
            const ForwardTrace t = forward(params, cfg.activation,
                                           test_data.input_column(i), test_data.labels[i]);
            predictions[i] = t.prob >= 0.5 ? 1 : 0;
        }
        point.macro_f1_test = macro_f1(predictions, test_data.labels);
        report.converged.push_back(std::move(point));
    }
    report.converged_count = static_cast<int>(report.converged.size());

    report.unique_points = dedup_critical_points(report.converged);
    report.groups = split_high_low(report.unique_points);

    std::vector<double> f1_low, f1_high;
    for (int idx : report.groups.low) f1_low.push_back(report.unique_points[idx].macro_f1_test);
    for (int idx : report.groups.high) f1_high.push_back(report.unique_points[idx].macro_f1_test);
    report.median_f1_low = median(f1_low);
    report.median_f1_high = median(f1_high);
    if (!f1_low.empty() && !f1_high.empty())
        report.f1_test = mann_whitney_u(f1_low, f1_high);
    else
        report.f1_test = {std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN()};

    std::vector<double> bound_values, output_norms, hidden_norms;
    for (const CriticalPoint& point : report.unique_points) {
        const NetworkParams params = unflatten(point.theta, cfg.shape());
        const BatchTrace batch = forward_batch(params, cfg.activation, train_data);
        const TraceBundle traces = trace_bundle(batch, params, train_data);
        const HessianBundle hess = hessian_total(params, cfg.activation, train_data);

        report.eigen_vs_bound.push_back({point.spectrum.lambda1, point.spectrum.lambda_sup});
        report.trace_pairs.push_back({matrix_trace(hess.assembled), traces.parts.total,
                                      matrix_sq_trace(hess.assembled),
                                      traces.squared.sq_total});

        double vt2 = 0.0;
        for (double v : params.output_tail()) vt2 += v * v;
        double wt2 = 0.0;  // bias column excluded
        for (int row = 0; row < cfg.hidden_dim; ++row)
            for (int col = 1; col <= cfg.input_dim; ++col)
                wt2 += params.hidden(row, col) * params.hidden(row, col);
        report.norm_rows.push_back({vt2, wt2, point.spectrum.lambda_sup});
        report.ortho_rows.push_back({squared_gram_fro(batch.hidden_cols),
                                     point.spectrum.lambda_sup});

        bound_values.push_back(point.spectrum.lambda_sup);
        output_norms.push_back(vt2);
        hidden_norms.push_back(wt2);
    }
    report.spearman_output_norm = spearman_correlation(output_norms, bound_values);
    report.spearman_hidden_norm = spearman_correlation(hidden_norms, bound_values);

    if (!report.unique_points.empty()) {
        const auto extreme = std::minmax_element(
            report.unique_points.begin(), report.unique_points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
                return a.spectrum.lambda_sup < b.spectrum.lambda_sup;
            });
        report.flattest_seed = extreme.first->seed;
        report.sharpest_seed = extreme.second->seed;
        report.trajectory_flattest = results[report.flattest_seed].trajectory;
        report.trajectory_sharpest = results[report.sharpest_seed].trajectory;
    }
    return report;
}

}  // namespace sharpbound

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sharpbound/bound.hpp"
#include "sharpbound/experiment.hpp"
#include "sharpbound/io.hpp"
#include "sharpbound/loss_grad.hpp"
#include "sharpbound/oracle.hpp"
#include "sharpbound/rng.hpp"

namespace sb = sharpbound;
namespace fs = std::filesystem;

namespace {

std::vector<double> parse_mean(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(std::stod(field));
    return out;
}

struct VerifyOptions {
    std::string kind = "all";
    int input_dim = 2;
    int hidden_dim = 3;
    int samples = 25;
    std::uint64_t seed = 0;
};

int run_verify(const VerifyOptions& opt) {
    std::vector<sb::ActivationKind> kinds;
    if (opt.kind == "all")
        kinds.assign(std::begin(sb::kAllActivations), std::end(sb::kAllActivations));
    else
        kinds.push_back(sb::activation_from_string(opt.kind));

    const sb::NetworkShape shape{opt.input_dim, opt.hidden_dim};
    const int dim = shape.param_dim();
    sb::Rng rng(opt.seed, 77);

    double worst_grad = 0.0, worst_hess = 0.0, worst_tr = 0.0, worst_tr2 = 0.0;
    double worst_bound_excess = -1e300;
    int failures = 0;

    for (int instance = 0; instance < opt.samples; ++instance) {
        const sb::ActivationKind kind = kinds[instance % kinds.size()];
        std::vector<double> theta(dim);
        for (double& x : theta) x = rng.uniform(-2.0, 2.0);
        const int count = 1 + static_cast<int>(rng.next_u64() % 8);
        sb::Dataset data;
        data.inputs = sb::Matrix(opt.input_dim, count);
        data.labels.resize(count);
        for (int i = 0; i < count; ++i) {
            for (int row = 0; row < opt.input_dim; ++row)
                data.inputs(row, i) = rng.normal();
            data.labels[i] = static_cast<int>(rng.next_u64() % 2);
        }

        const sb::NetworkParams params = sb::unflatten(theta, shape);
        const auto lossfn = [&](std::span<const double> point) {
            return sb::total_loss(sb::unflatten(point, shape), kind, data);
        };

        const std::vector<double> grad = sb::grad_total(params, kind, data);
        const std::vector<double> fd_grad = sb::fd_gradient(lossfn, theta);
        double grad_err = 0.0;
        for (int d = 0; d < dim; ++d)
            grad_err = std::max(grad_err, std::abs(grad[d] - fd_grad[d]));
        worst_grad = std::max(worst_grad, grad_err);
        if (grad_err > 1e-5) ++failures;

        const sb::HessianBundle hess = sb::hessian_total(params, kind, data);
        const sb::Matrix fd_hess = sb::fd_hessian(lossfn, theta);
        const double hess_err = sb::frobenius_diff(hess.assembled, fd_hess);
        const double hess_tol = 1e-4 * std::max(1.0, sb::frobenius_norm(hess.assembled));
        worst_hess = std::max(worst_hess, hess_err);
        if (hess_err > hess_tol) ++failures;

        const sb::BatchTrace batch = sb::forward_batch(params, kind, data);
        const sb::TraceBundle traces = sb::trace_bundle(batch, params, data);
        const double tr_mat = sb::matrix_trace(hess.assembled);
        const double tr2_mat = sb::matrix_sq_trace(hess.assembled);
        const double tr_err =
            std::abs(traces.parts.total - tr_mat) / std::max(1.0, std::abs(tr_mat));
        const double tr2_err =
            std::abs(traces.squared.sq_total - tr2_mat) / std::max(1.0, std::abs(tr2_mat));
        worst_tr = std::max(worst_tr, tr_err);
        worst_tr2 = std::max(worst_tr2, tr2_err);
        if (tr_err > 1e-8 || tr2_err > 1e-8) ++failures;

        const sb::SpectrumReport spec = sb::spectrum_report(hess, traces);
        const double excess =
            spec.lambda1 - spec.lambda_sup - 1e-9 * std::max(1.0, std::abs(spec.lambda_sup));
        worst_bound_excess = std::max(worst_bound_excess, excess);
        if (excess > 0.0) ++failures;
    }

    std::printf("verify: %d instances, M=%d N=%d kind=%s\n", opt.samples, opt.input_dim,
                opt.hidden_dim, opt.kind.c_str());
    std::printf("  gradient vs central differences : max |diff| = %.3e (tol 1e-5)\n",
                worst_grad);
    std::printf("  hessian  vs central differences : max fro    = %.3e\n", worst_hess);
    std::printf("  trace closed form vs matrix     : max rel    = %.3e (tol 1e-8)\n",
                worst_tr);
    std::printf("  trace^2 closed form vs matrix   : max rel    = %.3e (tol 1e-8)\n",
                worst_tr2);
    std::printf("  lambda1 <= lambda_sup           : max excess = %.3e\n",
                worst_bound_excess);
    std::printf("verify: %s\n", failures == 0 ? "all checks passed" : "TOLERANCE BREACH");
    return failures == 0 ? 0 : 1;
}

sb::ExperimentConfig load_sweep_config(const fs::path& dir) {
    return sb::io::config_from_json(sb::io::read_text_file(dir / "config.json"));
}

std::vector<sb::CriticalPoint> load_sweep_points(const fs::path& dir) {
    return sb::io::critical_points_from_json(
        sb::io::read_text_file(dir / "critical_points.json"));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form Hessian sharpness analysis for a 3-layer "
                 "cross-entropy network"};
    app.require_subcommand(1);

    VerifyOptions vopt;
    CLI::App* verify = app.add_subcommand(
        "verify", "check analytic gradient/Hessian/traces/bound against numeric oracles");
    verify->add_option("--kind", vopt.kind,
                       "activation (linear|sigmoid|tanh|smoothrelu|gelu|all)");
    verify->add_option("--M", vopt.input_dim, "input dimension");
    verify->add_option("--N", vopt.hidden_dim, "hidden dimension");
    verify->add_option("--samples", vopt.samples, "number of random instances");
    verify->add_option("--seed", vopt.seed, "rng seed");

    sb::ExperimentConfig cfg;
    std::string mean0 = "1,1", mean1 = "-1,-1", activation = "sigmoid", out_dir;
    CLI::App* sweep = app.add_subcommand("train-sweep",
                                         "run the multi-seed gradient-descent study");
    sweep->add_option("--seeds", cfg.seeds, "number of initializations");
    sweep->add_option("--M", cfg.input_dim, "input dimension");
    sweep->add_option("--N", cfg.hidden_dim, "hidden dimension");
    sweep->add_option("--itrain", cfg.train_samples, "training samples");
    sweep->add_option("--itest", cfg.test_samples, "test samples");
    sweep->add_option("--lr", cfg.learning_rate, "learning rate");
    sweep->add_option("--tmax", cfg.max_epochs, "epoch budget");
    sweep->add_option("--eps", cfg.eps_converge, "relative gradient-norm threshold");
    sweep->add_option("--activation", activation, "hidden activation");
    sweep->add_option("--init-range", cfg.init_range, "theta0 ~ U(-range, range)");
    sweep->add_option("--variance", cfg.variance, "per-axis class variance");
    sweep->add_option("--mean0", mean0, "class 0 mean, comma separated");
    sweep->add_option("--mean1", mean1, "class 1 mean, comma separated");
    sweep->add_option("--seed", cfg.rng_seed, "rng seed");
    sweep->add_option("--traj-stride", cfg.trajectory_stride,
                      "epochs between spectral log points (0 = off)");
    sweep->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    sweep->add_option("--out", out_dir, "output directory")->required();

    std::string in_dir, analyze_out, hessian_out, traces_out, bilinear_prefix;
    int hessian_index = -1, traces_index = -1;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "recompute spectra and statistics from a saved sweep");
    analyze->add_option("--in", in_dir, "sweep directory")->required();
    analyze->add_option("--out", analyze_out, "output directory (default: --in)");
    analyze->add_option("--hessian-index", hessian_index,
                        "dump the assembled Hessian of this critical point");
    analyze->add_option("--hessian-out", hessian_out, "Hessian CSV path");
    analyze->add_option("--traces-index", traces_index,
                        "dump the trace bundle of this critical point");
    analyze->add_option("--traces-out", traces_out, "trace JSON path");
    analyze->add_option("--bilinear-prefix", bilinear_prefix,
                        "also dump <prefix>_{phi,psi,omega}.csv for --traces-index");

    std::string slice_in, slice_out = "slice.csv";
    int slice_point = 0, slice_eigvec = 0, slice_steps = 101;
    double slice_alpha = 1.0;
    CLI::App* slice = app.add_subcommand(
        "slice", "loss along an eigenvector through a critical point");
    slice->add_option("--in", slice_in, "sweep directory")->required();
    slice->add_option("--point", slice_point, "critical point index");
    slice->add_option("--eigvec", slice_eigvec,
                      "eigenvector index (0 = largest eigenvalue)");
    slice->add_option("--alpha-max", slice_alpha, "half-width of the alpha grid");
    slice->add_option("--steps", slice_steps, "grid points");
    slice->add_option("--out", slice_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return run_verify(vopt);

        if (sweep->parsed()) {
            cfg.activation = sb::activation_from_string(activation);
            cfg.class0_mean = parse_mean(mean0);
            cfg.class1_mean = parse_mean(mean1);
            const sb::ExperimentReport report = sb::run_experiment(cfg);
            sb::io::write_experiment_outputs(report, out_dir);
            std::printf("train-sweep: %d/%d converged, %zu unique, outputs in %s\n",
                        report.converged_count, cfg.seeds, report.unique_points.size(),
                        out_dir.c_str());
            return 0;
        }

        if (analyze->parsed()) {
            const fs::path in = in_dir;
            const sb::ExperimentConfig saved = load_sweep_config(in);
            std::vector<sb::CriticalPoint> points = load_sweep_points(in);
            sb::Rng train_rng(saved.rng_seed, 1);
            sb::Rng test_rng(saved.rng_seed, 2);
            const sb::Dataset train_data =
                sb::generate_dataset(saved, sb::Split::Train, train_rng);
            const sb::Dataset test_data =
                sb::generate_dataset(saved, sb::Split::Test, test_rng);

            auto point_params = [&](int index) {
                if (index < 0 || index >= static_cast<int>(points.size()))
                    throw std::runtime_error("critical point index out of range");
                return sb::unflatten(points[index].theta, saved.shape());
            };

            if (hessian_index >= 0) {
                if (hessian_out.empty())
                    throw std::runtime_error("--hessian-out required with --hessian-index");
                const sb::HessianBundle hess = sb::hessian_total(
                    point_params(hessian_index), saved.activation, train_data);
                sb::io::write_matrix_csv(hess.assembled, hessian_out);
                std::printf("analyze: wrote %s\n", hessian_out.c_str());
            }
            if (traces_index >= 0) {
                if (traces_out.empty())
                    throw std::runtime_error("--traces-out required with --traces-index");
                const sb::NetworkParams params = point_params(traces_index);
                const sb::BatchTrace batch =
                    sb::forward_batch(params, saved.activation, train_data);
                const sb::TraceBundle traces = sb::trace_bundle(batch, params, train_data);
                sb::io::write_text_file(traces_out, sb::io::trace_bundle_to_json(traces));
                if (!bilinear_prefix.empty()) {
                    sb::io::write_matrix_csv(traces.squared.phi, bilinear_prefix + "_phi.csv");
                    sb::io::write_matrix_csv(traces.squared.psi, bilinear_prefix + "_psi.csv");
                    sb::io::write_matrix_csv(traces.squared.omega,
                                             bilinear_prefix + "_omega.csv");
                }
                std::printf("analyze: wrote %s\n", traces_out.c_str());
            }

            // refresh spectra and test scores from theta, then the statistics
            sb::ExperimentReport report;
            report.config = saved;
            for (sb::CriticalPoint& point : points) {
                const sb::NetworkParams params = sb::unflatten(point.theta, saved.shape());
                const sb::BatchTrace batch =
                    sb::forward_batch(params, saved.activation, train_data);
                const sb::TraceBundle traces = sb::trace_bundle(batch, params, train_data);
                point.spectrum = sb::spectrum_report(
                    sb::hessian_total(params, saved.activation, train_data), traces);
                std::vector<int> predictions(test_data.sample_count());
                for (int i = 0; i < test_data.sample_count(); ++i) {
                    const sb::ForwardTrace t =
                        sb::forward(params, saved.activation, test_data.input_column(i),
                                    test_data.labels[i]);
                    predictions[i] = t.prob >= 0.5 ? 1 : 0;
                }
                point.macro_f1_test = sb::macro_f1(predictions, test_data.labels);
            }
            report.unique_points = points;
            report.converged = points;
            report.converged_count = static_cast<int>(points.size());
            report.groups = sb::split_high_low(points);
            std::vector<double> f1_low, f1_high, bounds, vnorm, wnorm;
            for (int idx : report.groups.low)
                f1_low.push_back(points[idx].macro_f1_test);
            for (int idx : report.groups.high)
                f1_high.push_back(points[idx].macro_f1_test);
            report.median_f1_low = sb::median(f1_low);
            report.median_f1_high = sb::median(f1_high);
            if (!f1_low.empty() && !f1_high.empty())
                report.f1_test = sb::mann_whitney_u(f1_low, f1_high);
            for (const sb::CriticalPoint& point : points) {
                const sb::NetworkParams params = sb::unflatten(point.theta, saved.shape());
                const sb::BatchTrace batch =
                    sb::forward_batch(params, saved.activation, train_data);
                const sb::TraceBundle traces = sb::trace_bundle(batch, params, train_data);
                const sb::HessianBundle hess =
                    sb::hessian_total(params, saved.activation, train_data);
                report.eigen_vs_bound.push_back(
                    {point.spectrum.lambda1, point.spectrum.lambda_sup});
                report.trace_pairs.push_back(
                    {sb::matrix_trace(hess.assembled), traces.parts.total,
                     sb::matrix_sq_trace(hess.assembled), traces.squared.sq_total});
                double vt2 = 0.0;
                for (double v : params.output_tail()) vt2 += v * v;
                double wt2 = 0.0;
                for (int row = 0; row < saved.hidden_dim; ++row)
                    for (int col = 1; col <= saved.input_dim; ++col)
                        wt2 += params.hidden(row, col) * params.hidden(row, col);
                report.norm_rows.push_back({vt2, wt2, point.spectrum.lambda_sup});
                double gram = 0.0;
                const int count = batch.sample_count();
                for (int i = 0; i < count; ++i)
                    for (int j = 0; j < count; ++j) {
                        double dot = 0.0;
                        for (std::size_t row = 0; row < batch.hidden_cols.rows(); ++row)
                            dot += batch.hidden_cols(row, i) * batch.hidden_cols(row, j);
                        gram += dot * dot;
                    }
                report.ortho_rows.push_back({gram, point.spectrum.lambda_sup});
                bounds.push_back(point.spectrum.lambda_sup);
                vnorm.push_back(vt2);
                wnorm.push_back(wt2);
            }
            report.spearman_output_norm = sb::spearman_correlation(vnorm, bounds);
            report.spearman_hidden_norm = sb::spearman_correlation(wnorm, bounds);
            const fs::path out = analyze_out.empty() ? in : fs::path(analyze_out);
            sb::io::write_experiment_outputs(report, out, /*include_dynamics=*/false);
            std::printf("analyze: statistics over %zu points written to %s\n",
                        points.size(), out.string().c_str());
            return 0;
        }

        if (slice->parsed()) {
            const fs::path in = slice_in;
            const sb::ExperimentConfig saved = load_sweep_config(in);
            const std::vector<sb::CriticalPoint> points = load_sweep_points(in);
            if (slice_point < 0 || slice_point >= static_cast<int>(points.size()))
                throw std::runtime_error("critical point index out of range");
            sb::Rng train_rng(saved.rng_seed, 1);
            const sb::Dataset train_data =
                sb::generate_dataset(saved, sb::Split::Train, train_rng);
            const sb::NetworkParams params =
                sb::unflatten(points[slice_point].theta, saved.shape());
            const sb::HessianBundle hess =
                sb::hessian_total(params, saved.activation, train_data);
            const sb::EigenSystem eig = sb::jacobi_eigensystem(hess.assembled);
            if (slice_eigvec < 0 || slice_eigvec >= static_cast<int>(eig.values.size()))
                throw std::runtime_error("eigenvector index out of range");
            std::vector<double> direction(eig.values.size());
            for (std::size_t d = 0; d < direction.size(); ++d)
                direction[d] = eig.vectors(d, slice_eigvec);
            double norm = 0.0;
            for (double x : direction) norm += x * x;
            norm = std::sqrt(norm);
            for (double& x : direction) x /= norm;
            std::vector<double> alphas(slice_steps);
            for (int s = 0; s < slice_steps; ++s)
                alphas[s] = slice_steps == 1
                                ? 0.0
                                : -slice_alpha + 2.0 * slice_alpha * s / (slice_steps - 1);
            const auto rows =
                sb::loss_slice(params, saved.activation, train_data, direction, alphas);
            std::ostringstream csv;
            csv << "alpha,loss\n";
            for (const auto& [alpha, value] : rows)
                csv << alpha << "," << value << "\n";
            sb::io::write_text_file(slice_out, csv.str());
            std::printf("slice: wrote %s (lambda_%d = %.6g)\n", slice_out.c_str(),
                        slice_eigvec + 1, eig.values[slice_eigvec]);
            return 0;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}

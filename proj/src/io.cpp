#include "sharpbound/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sharpbound::io {

namespace {

using nlohmann::json;

// shortest round-trip formatting, locale independent
std::string fmt(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

json spectrum_json(const SpectrumReport& report) {
    return json{{"eigenvalues", report.eigenvalues}, {"lambda1", report.lambda1},
                {"mu", report.mu},                   {"sigma2", report.sigma2},
                {"lambda_sup", report.lambda_sup},   {"psd", report.psd}};
}

SpectrumReport spectrum_from(const json& j) {
    SpectrumReport report;
    report.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    report.lambda1 = j.at("lambda1").get<double>();
    report.mu = j.at("mu").get<double>();
    report.sigma2 = j.at("sigma2").get<double>();
    report.lambda_sup = j.at("lambda_sup").get<double>();
    report.psd = j.at("psd").get<bool>();
    return report;
}

json point_json(const CriticalPoint& point) {
    return json{{"seed", point.seed},
                {"theta", point.theta},
                {"final_loss", point.final_loss},
                {"grad_ratio", point.grad_ratio},
                {"epochs", point.epochs},
                {"macro_f1_test", point.macro_f1_test},
                {"spectrum", spectrum_json(point.spectrum)}};
}

CriticalPoint point_from(const json& j) {
    CriticalPoint point;
    point.seed = j.at("seed").get<int>();
    point.theta = j.at("theta").get<std::vector<double>>();
    point.final_loss = j.at("final_loss").get<double>();
    point.grad_ratio = j.at("grad_ratio").get<double>();
    point.epochs = j.at("epochs").get<int>();
    point.macro_f1_test = j.at("macro_f1_test").get<double>();
    point.spectrum = spectrum_from(j.at("spectrum"));
    return point;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
    validate(data);
    std::ostringstream out;
    for (int col = 1; col <= data.input_dim(); ++col) out << "x_" << col << ",";
    out << "q\n";
    for (int i = 0; i < data.sample_count(); ++i) {
        for (int row = 0; row < data.input_dim(); ++row)
            out << fmt(data.inputs(row, i)) << ",";
        out << data.labels[i] << "\n";
    }
    write_text_file(path, out.str());
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset csv: empty file " + path.string());
    const int columns = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
    const int input_dim = columns - 1;
    if (input_dim < 1) throw std::runtime_error("dataset csv: no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
        if (static_cast<int>(row.size()) != columns)
            throw std::runtime_error("dataset csv: ragged row");
        labels.push_back(static_cast<int>(row.back()));
        row.pop_back();
        rows.push_back(std::move(row));
    }

    Dataset data;
    data.inputs = Matrix(input_dim, rows.size());
    data.labels = std::move(labels);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int row = 0; row < input_dim; ++row) data.inputs(row, i) = rows[i][row];
    validate(data);
    return data;
}

void write_params_json(const NetworkParams& params, const std::filesystem::path& path) {
    const json j{{"M", params.shape.input_dim},
                 {"N", params.shape.hidden_dim},
                 {"theta", flatten(params)}};
    write_text_file(path, j.dump(2) + "\n");
}

NetworkParams load_params_json(const std::filesystem::path& path) {
    const json j = json::parse(read_text_file(path));
    const NetworkShape shape{j.at("M").get<int>(), j.at("N").get<int>()};
    return unflatten(j.at("theta").get<std::vector<double>>(), shape);
}

void write_matrix_csv(const Matrix& matrix, const std::filesystem::path& path) {
    std::ostringstream out;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            if (j) out << ",";
            out << fmt(matrix(i, j));
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

std::string spectrum_to_json(const SpectrumReport& report) {
    return spectrum_json(report).dump(2) + "\n";
}

std::string trace_bundle_to_json(const TraceBundle& traces) {
    return json{{"tr_ww", traces.parts.ww},
                {"tr_vv", traces.parts.vv},
                {"tr_total", traces.parts.total},
                {"tr_sq_total", traces.squared.sq_total}}
               .dump(2) +
           "\n";
}

std::string config_to_json(const ExperimentConfig& cfg) {
    return json{{"M", cfg.input_dim},
                {"N", cfg.hidden_dim},
                {"train_samples", cfg.train_samples},
                {"test_samples", cfg.test_samples},
                {"seeds", cfg.seeds},
                {"max_epochs", cfg.max_epochs},
                {"eps_converge", cfg.eps_converge},
                {"learning_rate", cfg.learning_rate},
                {"init_range", cfg.init_range},
                {"activation", std::string(to_string(cfg.activation))},
                {"class0_mean", cfg.class0_mean},
                {"class1_mean", cfg.class1_mean},
                {"variance", cfg.variance},
                {"rng_seed", cfg.rng_seed},
                {"trajectory_stride", cfg.trajectory_stride},
                {"threads", cfg.threads}}
               .dump(2) +
           "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.input_dim = j.at("M").get<int>();
    cfg.hidden_dim = j.at("N").get<int>();
    cfg.train_samples = j.at("train_samples").get<int>();
    cfg.test_samples = j.at("test_samples").get<int>();
    cfg.seeds = j.at("seeds").get<int>();
    cfg.max_epochs = j.at("max_epochs").get<int>();
    cfg.eps_converge = j.at("eps_converge").get<double>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.init_range = j.at("init_range").get<double>();
    cfg.activation = activation_from_string(j.at("activation").get<std::string>());
    cfg.class0_mean = j.at("class0_mean").get<std::vector<double>>();
    cfg.class1_mean = j.at("class1_mean").get<std::vector<double>>();
    cfg.variance = j.at("variance").get<double>();
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    cfg.trajectory_stride = j.at("trajectory_stride").get<int>();
    cfg.threads = j.at("threads").get<int>();
    cfg.validate();
    return cfg;
}

std::string critical_points_to_json(const std::vector<CriticalPoint>& points) {
    json arr = json::array();
    for (const CriticalPoint& point : points) arr.push_back(point_json(point));
    return arr.dump(2) + "\n";
}

std::vector<CriticalPoint> critical_points_from_json(const std::string& text) {
    const json arr = json::parse(text);
    std::vector<CriticalPoint> points;
    for (const json& j : arr) points.push_back(point_from(j));
    return points;
}

void write_experiment_outputs(const ExperimentReport& report,
                              const std::filesystem::path& out_dir,
                              bool include_dynamics) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    write_text_file(out_dir / "config.json", config_to_json(report.config));
    write_text_file(out_dir / "critical_points.json",
                    critical_points_to_json(report.unique_points));

    // the datasets are a pure function of the config; dumping them keeps
    // external plotting self-contained
    {
        Rng train_rng(report.config.rng_seed, 1);
        Rng test_rng(report.config.rng_seed, 2);
        write_dataset_csv(generate_dataset(report.config, Split::Train, train_rng),
                          out_dir / "train_data.csv");
        write_dataset_csv(generate_dataset(report.config, Split::Test, test_rng),
                          out_dir / "test_data.csv");
    }

    std::ostringstream fig2;
    fig2 << "lambda1,lambda_sup\n";
    for (const auto& row : report.eigen_vs_bound)
        fig2 << fmt(row[0]) << "," << fmt(row[1]) << "\n";
    write_text_file(out_dir / "fig2_eigen_vs_bound.csv", fig2.str());

    if (include_dynamics) {
        std::ostringstream fig4;
        fig4 << "case,seed,epoch,loss,lambda_sup,lambda1\n";
        for (const TrajectoryPoint& p : report.trajectory_sharpest)
            fig4 << "sharpest," << report.sharpest_seed << "," << p.epoch << ","
                 << fmt(p.loss) << "," << fmt(p.lambda_sup) << "," << fmt(p.lambda1)
                 << "\n";
        for (const TrajectoryPoint& p : report.trajectory_flattest)
            fig4 << "flattest," << report.flattest_seed << "," << p.epoch << ","
                 << fmt(p.loss) << "," << fmt(p.lambda_sup) << "," << fmt(p.lambda1)
                 << "\n";
        write_text_file(out_dir / "fig4_dynamics.csv", fig4.str());
    }

    std::ostringstream fig5;
    fig5 << "lambda_sup\n";
    for (const CriticalPoint& point : report.unique_points)
        fig5 << fmt(point.spectrum.lambda_sup) << "\n";
    write_text_file(out_dir / "fig5_hist.csv", fig5.str());

    std::ostringstream fig6;
    fig6 << "group,macro_f1\n";
    for (int idx : report.groups.low)
        fig6 << "low," << fmt(report.unique_points[idx].macro_f1_test) << "\n";
    for (int idx : report.groups.high)
        fig6 << "high," << fmt(report.unique_points[idx].macro_f1_test) << "\n";
    write_text_file(out_dir / "fig6_groups.csv", fig6.str());

    std::ostringstream fig8;
    fig8 << "tr_numeric,tr_analytic,trsq_numeric,trsq_analytic\n";
    for (const auto& row : report.trace_pairs)
        fig8 << fmt(row[0]) << "," << fmt(row[1]) << "," << fmt(row[2]) << ","
             << fmt(row[3]) << "\n";
    write_text_file(out_dir / "fig8_traces.csv", fig8.str());

    std::ostringstream fig9;
    fig9 << "v_norm2,w_norm2,lambda_sup\n";
    for (const auto& row : report.norm_rows)
        fig9 << fmt(row[0]) << "," << fmt(row[1]) << "," << fmt(row[2]) << "\n";
    write_text_file(out_dir / "fig9_norms.csv", fig9.str());

    std::ostringstream fig11;
    fig11 << "rtr_fro2,lambda_sup\n";
    for (const auto& row : report.ortho_rows)
        fig11 << fmt(row[0]) << "," << fmt(row[1]) << "\n";
    write_text_file(out_dir / "fig11_ortho.csv", fig11.str());

    json summary{{"attempted", report.config.seeds},
                 {"converged", report.converged_count},
                 {"unique", static_cast<int>(report.unique_points.size())},
                 {"low_group", static_cast<int>(report.groups.low.size())},
                 {"high_group", static_cast<int>(report.groups.high.size())},
                 {"split_threshold", report.groups.threshold},
                 {"median_f1_low", report.median_f1_low},
                 {"median_f1_high", report.median_f1_high},
                 {"mann_whitney_u", report.f1_test.u},
                 {"mann_whitney_p", report.f1_test.p_two_sided},
                 {"spearman_output_norm_vs_bound", report.spearman_output_norm},
                 {"spearman_hidden_norm_vs_bound", report.spearman_hidden_norm},
                 {"sharpest_seed", report.sharpest_seed},
                 {"flattest_seed", report.flattest_seed},
                 {"warnings", report.warnings},
                 {"failures", report.failures}};
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace sharpbound::io

#pragma once

#include <filesystem>
#include <string>

#include "sharpbound/experiment.hpp"
#include "sharpbound/matrix.hpp"
#include "sharpbound/network.hpp"
#include "sharpbound/traces.hpp"

namespace sharpbound::io {

// Dataset CSV: header x_1,...,x_M,q then one sample per row.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset_csv(const std::filesystem::path& path);

// Parameters as a flat theta array with shape metadata {M, N}.
void write_params_json(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_params_json(const std::filesystem::path& path);

// Row-major matrix dump, one row per line.
void write_matrix_csv(const Matrix& matrix, const std::filesystem::path& path);

std::string spectrum_to_json(const SpectrumReport& report);
std::string trace_bundle_to_json(const TraceBundle& traces);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

std::string critical_points_to_json(const std::vector<CriticalPoint>& points);
std::vector<CriticalPoint> critical_points_from_json(const std::string& text);

// Everything a sweep leaves behind: config.json, critical_points.json,
// the per-figure CSVs, and summary.json. UTF-8, LF endings, and fully
// deterministic for a fixed report. include_dynamics=false skips the
// trajectory CSV (analyze cannot reconstruct it from saved thetas).
void write_experiment_outputs(const ExperimentReport& report,
                              const std::filesystem::path& out_dir,
                              bool include_dynamics = true);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sharpbound::io

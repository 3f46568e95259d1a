#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ut/matrix.hpp"
#include "ut/metrics.hpp"
#include "ut/synth.hpp"
#include "ut/transform.hpp"

namespace ut::io {

enum class MatrixFormat { automatic, csv, npy };

inline constexpr const char* model_format_version = "1";

// Sample matrices

SampleMatrix parse_csv(const std::string& text);
std::string format_csv(const SampleMatrix& m, const std::vector<std::string>& header = {});

/// NPY v1/v2/v3, little-endian <f4 or <f8, C order, 2-D.
SampleMatrix parse_npy(const std::string& bytes);

SampleMatrix read_matrix(const std::filesystem::path& path,
                         MatrixFormat format = MatrixFormat::automatic);
void write_matrix(const SampleMatrix& m, const std::filesystem::path& path,
                  const std::vector<std::string>& header = {});

FactorLabels parse_factor_csv(const std::string& text);
FactorLabels read_factors(const std::filesystem::path& path);
std::string format_factor_csv(const FactorLabels& f);
void write_factors(const FactorLabels& f, const std::filesystem::path& path);

// Models

nlohmann::json model_to_json(const UtModel& model);
UtModel model_from_json(const nlohmann::json& j);
void write_model(const UtModel& model, const std::filesystem::path& path);
UtModel read_model(const std::filesystem::path& path);

/// Per-dimension summary: K, components, thresholds, collapse flags.
nlohmann::json model_report(const UtModel& model);

// Histograms

struct DimensionHistogram {
  std::vector<double> edges;
  /// counts[k][b]: samples of cluster k+1 in bin b.
  std::vector<std::vector<std::size_t>> counts;
  std::size_t k = 1;
  bool collapsed = false;
};

struct HistogramExport {
  std::size_t bins = 0;
  std::vector<DimensionHistogram> dimensions;
};

HistogramExport export_histogram(const SampleMatrix& samples, const UtModel& model,
                                 std::size_t bins);
nlohmann::json histogram_to_json(const HistogramExport& h);
std::string histogram_svg(const DimensionHistogram& h, std::size_t dimension);

// Synthetic specs and metric reports

synth::SynthSpec spec_from_json(const nlohmann::json& j);
nlohmann::json truth_to_json(const synth::Dataset& data);
nlohmann::json metric_report_to_json(const MetricReport& report);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ut::io

#pragma once

#include "dperc/dataset.hpp"
#include "dperc/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dperc {

/// Raised for bad invocations: unknown methods, missing required inputs,
/// flag combinations that make no sense. The CLI maps it to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a run needs, resolved from flags, config file, and defaults.
struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path schema;  // sidecar path; empty means use `infer`
  bool infer = false;
  std::optional<std::string> label;  // class-label column name when inferring

  std::string method = "dper";          // estimate: dper | dperc | mean | knn
  std::vector<std::string> methods;     // benchmark estimators; default dper, dperc
  std::vector<std::string> baselines;   // benchmark baselines; default mean, knn

  std::vector<double> rates{0.2, 0.35, 0.5, 0.65, 0.8};
  std::vector<std::uint64_t> seeds{0};
  int repeats = 10;
  int knn_k = 5;

  std::filesystem::path truth;    // ground-truth covariance CSV
  std::filesystem::path imputed;  // externally imputed data CSV (benchmark)
  std::vector<std::filesystem::path> estimates;  // heatmap inputs

  std::filesystem::path out = "out";
  std::string missing_token;  // empty string means an empty cell

  bool project_psd = false;             // clip estimates to the PSD cone
  bool zero_missing_class_means = false;  // literal-zero class means (compat)
  bool stamp = false;                   // embed a wall-clock timestamp
  std::string dataset_name;             // defaults to the data file stem
};

struct EstimateResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

struct SimulateResult {
  std::filesystem::path csv;
  std::filesystem::path meta;
  double realized_rate = 0.0;
};

/// Per-(method, rate) means over repeats.
struct SummaryRecord {
  std::string method;
  std::optional<double> rate;
  int repeats = 0;
  double e = 0.0;
  double r = 0.0;
  std::optional<double> p;
};

struct BenchmarkResult {
  std::filesystem::path report_json;
  std::filesystem::path report_csv;
  std::filesystem::path summary_csv;
  std::vector<MetricRecord> rows;
  std::vector<SummaryRecord> summary;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
};

struct HeatmapResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Estimates one covariance matrix (or one per class) and writes
/// estimate.json plus the matrix CSV file(s).
EstimateResult run_estimate(const RunConfig& cfg);

/// Applies one seeded MCAR mask and writes the masked CSV plus metadata.
SimulateResult run_simulate(const RunConfig& cfg);

/// Full protocol: for every (rate, repeat) draw a fresh mask, run every
/// configured method, score against the ground truth, and write the report
/// files plus heatmap artifacts.
BenchmarkResult run_benchmark(const RunConfig& cfg);

/// Renders correlation, squared-difference, and signed-difference artifacts
/// for each estimate against the truth matrix.
HeatmapResult run_heatmap(const RunConfig& cfg);

}  // namespace dperc

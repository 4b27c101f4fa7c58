#include "dperc/commands.hpp"

#include "dperc/baselines.hpp"
#include "dperc/dper.hpp"
#include "dperc/dperc.hpp"
#include "dperc/missingness.hpp"
#include "dperc/report.hpp"
#include "dperc/rng.hpp"
#include "dperc/version.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <set>
#include <utility>

namespace dperc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kKnownMethods[] = {"dper", "dperc", "mean", "knn"};

bool known_method(const std::string& m) {
  return std::find(std::begin(kKnownMethods), std::end(kKnownMethods), m) !=
         std::end(kKnownMethods);
}

std::string dataset_name(const RunConfig& cfg) {
  if (!cfg.dataset_name.empty()) {
    return cfg.dataset_name;
  }
  return cfg.data.stem().string();
}

MixedDataset load_dataset(const RunConfig& cfg) {
  if (cfg.data.empty()) {
    throw UsageError("--data is required");
  }
  const IngestOptions opts{cfg.missing_token};
  DatasetSchema schema;
  if (!cfg.schema.empty()) {
    schema = read_schema_file(cfg.schema);
  } else if (cfg.infer) {
    schema = infer_schema(cfg.data, cfg.label, opts);
  } else {
    throw UsageError("provide --schema <file> or --infer-schema");
  }
  return ingest_csv(cfg.data, schema, opts);
}

void validate_common(const RunConfig& cfg) {
  for (double r : cfg.rates) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw UsageError("missing rates must lie in [0, 1)");
    }
  }
  if (cfg.repeats < 1) {
    throw UsageError("--repeats must be at least 1");
  }
  if (cfg.knn_k < 1) {
    throw UsageError("--k must be at least 1");
  }
  if (cfg.seeds.empty()) {
    throw UsageError("at least one --seed is required");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

const char* choice_name(RootChoice c) {
  switch (c) {
    case RootChoice::kNearestCaseDeletion: return "nearest_case_deletion";
    case RootChoice::kMaxEta: return "max_eta";
    case RootChoice::kCaseDeletionClamped: return "case_deletion_clamped";
    case RootChoice::kZero: return "zero";
  }
  return "unknown";
}

json optional_json(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

// Filesystem-safe tag: anything outside [A-Za-z0-9._-] becomes '_'.
std::string sanitize(const std::string& s) {
  std::string t;
  t.reserve(s.size());
  for (unsigned char c : s) {
    const bool ok = std::isalnum(c) != 0 || c == '.' || c == '_' || c == '-';
    t += ok ? static_cast<char>(c) : '_';
  }
  return t.empty() ? std::string("_") : t;
}

// "0.35" -> "0p35": unambiguous and filesystem safe.
std::string rate_tag(double rate) {
  std::string s = csv::format_double(rate);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

json means_json(const CovarianceEstimate& est, const std::vector<std::string>* levels) {
  json arr = json::array();
  for (std::size_t c = 0; c < est.class_codes.size(); ++c) {
    json row = json::array();
    for (Eigen::Index j = 0; j < est.means.cols(); ++j) {
      row.push_back(est.means(static_cast<Eigen::Index>(c), j));
    }
    const json cls = levels != nullptr
                         ? json((*levels)[static_cast<std::size_t>(est.class_codes[c])])
                         : json(nullptr);
    arr.push_back(json{{"class", cls}, {"values", std::move(row)}});
  }
  return arr;
}

json provenance_json(const CovarianceEstimate& est, const std::vector<std::string>& names,
                     const std::vector<std::string>& cat_names) {
  json arr = json::array();
  for (const auto& pr : est.pairs) {
    json entry{
        {"i", pr.f1},
        {"j", pr.f2},
        {"feature_i", names[static_cast<std::size_t>(pr.f1)]},
        {"feature_j", names[static_cast<std::size_t>(pr.f2)]},
        {"value", pr.value},
        {"choice", choice_name(pr.choice)},
        {"root_count", pr.root_count},
        {"case_deletion", optional_json(pr.case_deletion)},
    };
    entry["categorical"] =
        pr.categorical.has_value()
            ? json(cat_names[static_cast<std::size_t>(*pr.categorical)])
            : json(nullptr);
    arr.push_back(std::move(entry));
  }
  return arr;
}

// Writes one heatmap plus its numeric sidecar and records both files.
void emit_artifact(std::vector<fs::path>& files, const fs::path& dir, const std::string& base,
                   const Eigen::MatrixXd& values, HeatmapKind kind, const std::string& title,
                   const std::vector<std::string>& labels) {
  const HeatmapArtifact art = render_heatmap(values, HeatmapSpec{kind, title, labels});
  const fs::path svg = dir / (base + ".svg");
  const fs::path sidecar = dir / (base + ".values.csv");
  write_text(svg, art.svg);
  write_text(sidecar, art.values_csv);
  files.push_back(svg);
  files.push_back(sidecar);
}

DpercOptions dperc_options(const RunConfig& cfg) {
  DpercOptions opts;
  opts.missing_mean = cfg.zero_missing_class_means ? MissingMeanPolicy::kLiteralZero
                                                   : MissingMeanPolicy::kGlobalMean;
  return opts;
}

const char* missing_mean_name(const RunConfig& cfg) {
  return cfg.zero_missing_class_means ? "literal-zero" : "global-mean";
}

Eigen::MatrixXd method_sigma(const std::string& method, const MixedDataset& ds,
                             const DpercOptions& dopts, int knn_k) {
  if (method == "dper") {
    return dper_single(ds).sigma;
  }
  if (method == "dperc") {
    return dperc_single(ds, dopts).sigma;
  }
  if (method == "mean") {
    return sample_cov(mean_impute(ds.continuous).values).sigma;
  }
  if (method == "knn") {
    return sample_cov(knn_impute(ds.continuous, knn_k).values).sigma;
  }
  throw UsageError("unknown method: " + method);
}

}  // namespace

EstimateResult run_estimate(const RunConfig& cfg) {
  validate_common(cfg);
  if (!known_method(cfg.method)) {
    throw UsageError("unknown method: " + cfg.method);
  }
  const MixedDataset ds = load_dataset(cfg);
  const bool labeled = ds.labels.has_value();
  fs::create_directories(cfg.out);

  const std::vector<std::string> names = ds.schema.continuous_names();
  const std::vector<std::string> cat_names = ds.schema.categorical_names();
  const DpercOptions dopts = dperc_options(cfg);

  // One estimate for dper/mean/knn and unlabeled dperc; one per class for
  // labeled dperc. Baselines ignore the label column.
  struct Part {
    std::optional<std::string> cls;
    CovarianceEstimate est;
    const std::vector<std::string>* levels = nullptr;
  };
  std::vector<Part> parts;

  if (cfg.method == "dper") {
    if (labeled) {
      parts.push_back({std::nullopt, dper_multi(ds), &ds.label_levels});
    } else {
      parts.push_back({std::nullopt, dper_single(ds), nullptr});
    }
  } else if (cfg.method == "dperc") {
    if (ds.categorical_count() == 0) {
      throw UsageError("method dperc requires at least one categorical feature");
    }
    if (labeled) {
      for (auto& [code, est] : dperc_multi(ds, dopts)) {
        parts.push_back({ds.label_levels[static_cast<std::size_t>(code)], std::move(est),
                         &ds.label_levels});
      }
    } else {
      parts.push_back({std::nullopt, dperc_single(ds, dopts), nullptr});
    }
  } else {
    const ImputedMatrix imp = cfg.method == "mean" ? mean_impute(ds.continuous)
                                                   : knn_impute(ds.continuous, cfg.knn_k);
    parts.push_back({std::nullopt, sample_cov(imp.values), nullptr});
  }

  if (cfg.project_psd) {
    for (auto& part : parts) {
      part.est.sigma = project_psd(part.est.sigma);
    }
  }

  EstimateResult result;
  json estimates = json::array();
  json matrix_files = json::array();
  for (const auto& part : parts) {
    const std::string file_name = part.cls.has_value()
                                      ? "sigma_class_" + sanitize(*part.cls) + ".csv"
                                      : std::string("sigma.csv");
    const fs::path sigma_path = cfg.out / file_name;
    csv::write_matrix(sigma_path, part.est.sigma, names);
    result.files.push_back(sigma_path);
    matrix_files.push_back(file_name);
    estimates.push_back(json{
        {"class", part.cls.has_value() ? json(*part.cls) : json(nullptr)},
        {"sigma_file", file_name},
        {"means", means_json(part.est, part.levels)},
        {"provenance", provenance_json(part.est, names, cat_names)},
    });
  }

  json doc{
      {"command", "estimate"},
      {"dataset", dataset_name(cfg)},
      {"version", kVersion},
      {"method", cfg.method},
      {"labeled", labeled},
      {"psd_projected", cfg.project_psd},
      {"features", names},
      {"categoricals", cat_names},
      {"estimates", std::move(estimates)},
      {"files", std::move(matrix_files)},
  };
  if (cfg.method == "knn") {
    doc["knn_k"] = cfg.knn_k;
  }
  if (cfg.method == "dperc") {
    doc["missing_mean"] = missing_mean_name(cfg);
  }
  const fs::path json_path = cfg.out / "estimate.json";
  write_text(json_path, json_text(doc));
  result.files.insert(result.files.begin(), json_path);
  return result;
}

SimulateResult run_simulate(const RunConfig& cfg) {
  validate_common(cfg);
  if (cfg.rates.size() != 1) {
    throw UsageError("simulate requires exactly one --missing-rate");
  }
  const double rate = cfg.rates.front();
  const MixedDataset ds = load_dataset(cfg);
  fs::create_directories(cfg.out);

  const MaskPlan plan{rate, cfg.seeds.front(), {}};
  const MixedDataset masked = apply_mcar(ds, plan);

  SimulateResult result;
  result.csv = cfg.out / "masked.csv";
  result.meta = cfg.out / "simulate.json";
  result.realized_rate = realized_missing_rate(masked);
  write_csv(masked, result.csv, IngestOptions{cfg.missing_token});

  const json meta{
      {"command", "simulate"},
      {"dataset", dataset_name(cfg)},
      {"version", kVersion},
      {"rng", kRngId},
      {"rate", rate},
      {"seed", plan.seed},
      {"missing_cells", masked.continuous.missing_count()},
      {"realized_missing_rate", result.realized_rate},
      {"output", result.csv.filename().string()},
  };
  write_text(result.meta, json_text(meta));
  return result;
}

BenchmarkResult run_benchmark(const RunConfig& cfg) {
  validate_common(cfg);

  std::vector<std::string> methods =
      cfg.methods.empty() ? std::vector<std::string>{"dper", "dperc"} : cfg.methods;
  const std::vector<std::string> baselines =
      cfg.baselines.empty() ? std::vector<std::string>{"mean", "knn"} : cfg.baselines;
  for (const auto& b : baselines) {
    if (b == "none") {
      continue;
    }
    methods.push_back(b);
  }
  std::vector<std::string> deduped;
  for (const auto& m : methods) {
    if (!known_method(m)) {
      throw UsageError("unknown method: " + m);
    }
    if (std::find(deduped.begin(), deduped.end(), m) == deduped.end()) {
      deduped.push_back(m);
    }
  }
  methods = std::move(deduped);
  if (methods.empty()) {
    throw UsageError("no methods configured");
  }
  if (cfg.rates.empty()) {
    throw UsageError("at least one --missing-rate is required");
  }

  const MixedDataset ds = load_dataset(cfg);
  const bool labeled = ds.labels.has_value();
  const std::string name = dataset_name(cfg);
  const Eigen::Index p = ds.continuous_count();
  const std::vector<std::string> feature_names = ds.schema.continuous_names();
  const DpercOptions dopts = dperc_options(cfg);
  const bool wants_dperc = std::find(methods.begin(), methods.end(), "dperc") != methods.end();
  if (wants_dperc && ds.categorical_count() == 0) {
    throw UsageError("method dperc requires at least one categorical feature");
  }

  // Ground truth: one matrix per segment, where a segment is the whole
  // dataset (unlabeled) or one class (labeled, the protocol splits first and
  // every method runs per class). Truths come from the complete data before
  // any masking, or from the supplied matrix file.
  std::vector<Eigen::MatrixXd> truths;
  std::vector<double> weights;
  std::vector<std::string> segment_tags;
  std::string truth_source;
  const bool complete = ds.continuous.missing_count() == 0;

  if (!cfg.truth.empty()) {
    if (labeled) {
      throw UsageError(
          "a truth matrix cannot be combined with labeled data; "
          "per-class truths require complete input");
    }
    Eigen::MatrixXd truth = csv::read_matrix(cfg.truth);
    if (truth.rows() != p || truth.cols() != p) {
      throw DataFormatError("truth matrix shape does not match the dataset: " +
                            cfg.truth.string());
    }
    truths.push_back(std::move(truth));
    weights.push_back(1.0);
    segment_tags.emplace_back();
    truth_source = "file:" + cfg.truth.string();
  } else {
    if (!complete) {
      throw UsageError("input has missing entries; supply --truth");
    }
    if (labeled) {
      for (const auto& [code, part] : split_by_class(ds)) {
        truths.push_back(sample_cov(part.continuous.values).sigma);
        weights.push_back(static_cast<double>(part.rows()) /
                          static_cast<double>(ds.rows()));
        segment_tags.push_back(
            "-class" + sanitize(ds.label_levels[static_cast<std::size_t>(code)]));
      }
    } else {
      truths.push_back(sample_cov(ds.continuous.values).sigma);
      weights.push_back(1.0);
      segment_tags.emplace_back();
    }
    truth_source = "complete-data";
  }
  const std::size_t segments = truths.size();

  const int repeats =
      cfg.seeds.size() > 1 ? static_cast<int>(cfg.seeds.size()) : cfg.repeats;

  BenchmarkResult result;
  struct SavedSigma {
    std::string method;
    std::size_t rate_index;
    std::size_t segment;
    Eigen::MatrixXd sigma;
  };
  std::vector<SavedSigma> saved;

  for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
    const double rate = cfg.rates[ri];
    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t base =
          cfg.seeds.size() > 1 ? cfg.seeds[static_cast<std::size_t>(rep)] : cfg.seeds.front();
      const std::uint64_t run_seed =
          derive_seed(base, static_cast<std::uint64_t>(ri), static_cast<std::uint64_t>(rep));
      const MixedDataset masked = apply_mcar(ds, MaskPlan{rate, run_seed, {}});

      std::vector<MixedDataset> parts;
      if (labeled) {
        for (auto& [code, part] : split_by_class(masked)) {
          parts.push_back(std::move(part));
        }
      } else {
        parts.push_back(masked);
      }

      struct Scored {
        std::string method;
        double e = 0.0;
        double r = 0.0;
      };
      std::vector<Scored> scored;
      for (const auto& method : methods) {
        Scored sc{method, 0.0, 0.0};
        for (std::size_t si = 0; si < segments; ++si) {
          const Eigen::MatrixXd sigma = method_sigma(method, parts[si], dopts, cfg.knn_k);
          sc.e += weights[si] * error_e(sigma, truths[si]);
          sc.r += weights[si] * error_r(sigma, truths[si]);
          if (rep == 0) {
            saved.push_back(SavedSigma{method, ri, si, sigma});
          }
        }
        scored.push_back(std::move(sc));
      }

      std::optional<double> dper_r;
      for (const auto& sc : scored) {
        if (sc.method == "dper") {
          dper_r = sc.r;
        }
      }
      for (const auto& sc : scored) {
        MetricRecord row;
        row.dataset = name;
        row.method = sc.method;
        row.rate = rate;
        row.repeat = rep;
        row.seed = run_seed;
        row.e = sc.e;
        row.r = sc.r;
        if (sc.method == "dperc" && dper_r.has_value()) {
          row.p = improvement_p(*dper_r, sc.r);
        }
        result.rows.push_back(std::move(row));
      }
    }
  }

  // Externally imputed data is scored once against the same truth.
  std::optional<Eigen::MatrixXd> imputed_sigma;
  if (!cfg.imputed.empty()) {
    if (labeled) {
      throw UsageError("--imputed-csv is not supported with labeled data");
    }
    const Eigen::MatrixXd imp = csv::read_matrix(cfg.imputed);
    if (imp.rows() != ds.rows() || imp.cols() != p) {
      throw DataFormatError("imputed matrix shape does not match the dataset: " +
                            cfg.imputed.string());
    }
    imputed_sigma = sample_cov(imp).sigma;
    MetricRecord row;
    row.dataset = name;
    row.method = "imputed";
    row.e = error_e(*imputed_sigma, truths[0]);
    row.r = error_r(*imputed_sigma, truths[0]);
    result.rows.push_back(std::move(row));
  }

  // Summary means are computed from the rows themselves.
  for (const auto& method : methods) {
    for (const double rate : cfg.rates) {
      SummaryRecord rec;
      rec.method = method;
      rec.rate = rate;
      double sum_e = 0.0;
      double sum_r = 0.0;
      double sum_p = 0.0;
      int n_p = 0;
      for (const auto& row : result.rows) {
        if (row.method != method || !row.rate.has_value() || *row.rate != rate) {
          continue;
        }
        ++rec.repeats;
        sum_e += row.e;
        sum_r += row.r;
        if (row.p.has_value()) {
          sum_p += *row.p;
          ++n_p;
        }
      }
      rec.e = sum_e / rec.repeats;
      rec.r = sum_r / rec.repeats;
      if (n_p > 0) {
        rec.p = sum_p / n_p;
      }
      result.summary.push_back(std::move(rec));
    }
  }
  if (imputed_sigma.has_value()) {
    const auto& row = result.rows.back();
    result.summary.push_back(SummaryRecord{"imputed", std::nullopt, 1, row.e, row.r,
                                           std::nullopt});
  }

  // Heatmap artifacts: the truth correlation per segment, then every
  // repeat-0 estimate per (method, rate, segment).
  const fs::path heat_dir = cfg.out / "heatmaps";
  fs::create_directories(heat_dir);
  std::vector<Eigen::MatrixXd> corr_truths;
  for (std::size_t si = 0; si < segments; ++si) {
    bool overshoot = false;
    corr_truths.push_back(cov_to_corr(truths[si], &overshoot));
    if (overshoot) {
      result.warnings.push_back("correlation entries beyond [-1, 1] in the truth matrix");
    }
    emit_artifact(result.artifacts, heat_dir, "truth" + segment_tags[si] + "-corr",
                  corr_truths[si], HeatmapKind::kCorrelation,
                  name + segment_tags[si] + " truth correlation", feature_names);
  }
  auto emit_estimate = [&](const std::string& base_name, const std::string& title_name,
                           const Eigen::MatrixXd& sigma, std::size_t si) {
    bool overshoot = false;
    const Eigen::MatrixXd corr = cov_to_corr(sigma, &overshoot);
    if (overshoot) {
      result.warnings.push_back("correlation entries beyond [-1, 1] in " + base_name);
    }
    emit_artifact(result.artifacts, heat_dir, base_name + "-corr", corr,
                  HeatmapKind::kCorrelation, title_name + " correlation", feature_names);
    emit_artifact(result.artifacts, heat_dir, base_name + "-mse",
                  local_mse_matrix(corr_truths[si], corr), HeatmapKind::kLocalMse,
                  title_name + " squared difference", feature_names);
    emit_artifact(result.artifacts, heat_dir, base_name + "-diff",
                  signed_diff_matrix(corr_truths[si], corr), HeatmapKind::kSignedDiff,
                  title_name + " signed difference", feature_names);
  };
  for (const auto& sv : saved) {
    const std::string tag = sv.method + "-rate" + rate_tag(cfg.rates[sv.rate_index]) +
                            segment_tags[sv.segment];
    emit_estimate(tag, tag, sv.sigma, sv.segment);
  }
  if (imputed_sigma.has_value()) {
    emit_estimate("imputed", "imputed", *imputed_sigma, 0);
  }

  // Report files.
  fs::create_directories(cfg.out);
  result.report_json = cfg.out / "report.json";
  result.report_csv = cfg.out / "report.csv";
  result.summary_csv = cfg.out / "summary.csv";

  json rows_json = json::array();
  for (const auto& row : result.rows) {
    rows_json.push_back(json{
        {"dataset", row.dataset},
        {"method", row.method},
        {"rate", optional_json(row.rate)},
        {"repeat", row.repeat},
        {"seed", row.seed},
        {"e", row.e},
        {"r", row.r},
        {"p", optional_json(row.p)},
    });
  }
  json summary_json = json::array();
  for (const auto& rec : result.summary) {
    summary_json.push_back(json{
        {"method", rec.method},
        {"rate", optional_json(rec.rate)},
        {"repeats", rec.repeats},
        {"e", rec.e},
        {"r", rec.r},
        {"p", optional_json(rec.p)},
    });
  }
  json artifacts_json = json::array();
  for (const auto& path : result.artifacts) {
    artifacts_json.push_back(fs::relative(path, cfg.out).generic_string());
  }

  const json report{
      {"command", "benchmark"},
      {"dataset", name},
      {"version", kVersion},
      {"rng", kRngId},
      {"timestamp", cfg.stamp ? json(timestamp_utc()) : json(nullptr)},
      {"truth_source", truth_source},
      {"config",
       json{
           {"methods", methods},
           {"rates", cfg.rates},
           {"repeats", repeats},
           {"seeds", cfg.seeds},
           {"knn_k", cfg.knn_k},
           {"missing_mean", missing_mean_name(cfg)},
       }},
      {"rows", std::move(rows_json)},
      {"summary", std::move(summary_json)},
      {"artifacts", std::move(artifacts_json)},
      {"warnings", result.warnings},
  };
  write_text(result.report_json, json_text(report));

  std::string rows_csv = "dataset,method,rate,repeat,seed,e,r,p\n";
  for (const auto& row : result.rows) {
    const csv::Row fields{
        row.dataset,
        row.method,
        row.rate.has_value() ? csv::format_double(*row.rate) : std::string(),
        std::to_string(row.repeat),
        std::to_string(row.seed),
        csv::format_double(row.e),
        csv::format_double(row.r),
        row.p.has_value() ? csv::format_double(*row.p) : std::string(),
    };
    rows_csv += csv::join_row(fields);
    rows_csv += "\n";
  }
  write_text(result.report_csv, rows_csv);

  std::string summary_csv = "dataset,method,rate,repeats,e,r,p\n";
  for (const auto& rec : result.summary) {
    const csv::Row fields{
        name,
        rec.method,
        rec.rate.has_value() ? csv::format_double(*rec.rate) : std::string(),
        std::to_string(rec.repeats),
        csv::format_double(rec.e),
        csv::format_double(rec.r),
        rec.p.has_value() ? csv::format_double(*rec.p) : std::string(),
    };
    summary_csv += csv::join_row(fields);
    summary_csv += "\n";
  }
  write_text(result.summary_csv, summary_csv);

  return result;
}

HeatmapResult run_heatmap(const RunConfig& cfg) {
  if (cfg.truth.empty()) {
    throw UsageError("--truth is required");
  }
  if (cfg.estimates.empty()) {
    throw UsageError("at least one estimate matrix is required");
  }
  std::vector<std::string> names;
  const Eigen::MatrixXd truth = csv::read_matrix(cfg.truth, &names);
  if (truth.rows() != truth.cols() || truth.rows() == 0) {
    throw DataFormatError("truth matrix must be square: " + cfg.truth.string());
  }

  HeatmapResult result;
  bool overshoot = false;
  const Eigen::MatrixXd corr_truth = cov_to_corr(truth, &overshoot);
  if (overshoot) {
    result.warnings.push_back("correlation entries beyond [-1, 1] in " + cfg.truth.string());
  }

  fs::create_directories(cfg.out);
  std::set<std::string> used;
  for (const auto& path : cfg.estimates) {
    const Eigen::MatrixXd est = csv::read_matrix(path);
    if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
      throw DataFormatError("estimate shape differs from truth: " + path.string());
    }
    bool os = false;
    const Eigen::MatrixXd corr_est = cov_to_corr(est, &os);
    if (os) {
      result.warnings.push_back("correlation entries beyond [-1, 1] in " + path.string());
    }
    std::string stem = sanitize(path.stem().string());
    std::string base = stem;
    int suffix = 2;
    while (!used.insert(base).second) {
      base = stem + "-" + std::to_string(suffix++);
    }
    emit_artifact(result.files, cfg.out, base + "-corr", corr_est,
                  HeatmapKind::kCorrelation, stem + " correlation", names);
    emit_artifact(result.files, cfg.out, base + "-mse", local_mse_matrix(corr_truth, corr_est),
                  HeatmapKind::kLocalMse, stem + " squared difference", names);
    emit_artifact(result.files, cfg.out, base + "-diff",
                  signed_diff_matrix(corr_truth, corr_est), HeatmapKind::kSignedDiff,
                  stem + " signed difference", names);
  }
  return result;
}

}  // namespace dperc

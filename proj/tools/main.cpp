#include "dperc/commands.hpp"
#include "dperc/csv.hpp"
#include "dperc/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

json files_json(const std::vector<std::filesystem::path>& files) {
  json arr = json::array();
  for (const auto& f : files) {
    arr.push_back(f.string());
  }
  return arr;
}

int fail(const char* type, const std::string& message, int code) {
  std::cerr << json{{"error", json{{"type", type}, {"message", message}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance and correlation estimation directly from incomplete mixed-type data"};
  app.set_version_flag("--version", std::string(dperc::kVersion));
  app.set_config("--config")->description("read option defaults from a config file");
  app.require_subcommand(1);

  dperc::RunConfig cfg;
  std::string data;
  std::string schema;
  std::string truth;
  std::string imputed;
  std::string out = "out";
  std::vector<std::string> estimates;
  double sim_rate = 0.0;

  auto add_data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", data, "input CSV file");
    sub->add_option("--schema", schema, "schema sidecar: one 'name: kind' line per column");
    sub->add_flag("--infer-schema", cfg.infer, "type columns by inspection instead");
    sub->add_option("--label", cfg.label, "class-label column name (with --infer-schema)");
    sub->add_option("--missing-token", cfg.missing_token,
                    "token marking a missing cell (default: empty cell)");
    sub->add_option("--dataset-name", cfg.dataset_name,
                    "name used in reports (default: data file stem)");
  };
  auto add_out_opt = [&](CLI::App* sub) {
    sub->add_option("--out", out, "output directory")->envname("DPERC_OUT_DIR");
  };

  CLI::App* est = app.add_subcommand("estimate", "estimate a covariance matrix");
  add_data_opts(est);
  add_out_opt(est);
  est->add_option("--method", cfg.method, "dper | dperc | mean | knn")
      ->check(CLI::IsMember({"dper", "dperc", "mean", "knn"}));
  est->add_option("--k", cfg.knn_k, "neighbor count for knn (default: 5)");
  est->add_flag("--project-psd", cfg.project_psd,
                "clip the estimate to the positive semidefinite cone");
  est->add_flag("--zero-missing-class-means", cfg.zero_missing_class_means,
                "write literal zeros for unestimable class-mean components");

  CLI::App* sim = app.add_subcommand("simulate", "mask continuous entries at a missing rate");
  add_data_opts(sim);
  add_out_opt(sim);
  sim->add_option("--missing-rate", sim_rate, "fraction of continuous cells to mask")
      ->required();
  sim->add_option("--seed", cfg.seeds, "mask seed (default: 0)");

  CLI::App* bench =
      app.add_subcommand("benchmark", "mask at several rates, estimate, score, and report");
  add_data_opts(bench);
  add_out_opt(bench);
  bench->add_option("--method", cfg.methods, "estimators to run (default: dper dperc)");
  bench->add_option("--baseline", cfg.baselines,
                    "baselines to run: mean, knn, or none (default: mean knn)");
  bench->add_option("--missing-rate", cfg.rates,
                    "missing rates (default: 0.2 0.35 0.5 0.65 0.8)");
  bench->add_option("--seed", cfg.seeds,
                    "base seeds; passing several runs one repeat per seed");
  bench->add_option("--repeats", cfg.repeats, "mask redraws per rate (default: 10)");
  bench->add_option("--k", cfg.knn_k, "neighbor count for knn (default: 5)");
  bench->add_option("--truth", truth, "ground-truth covariance CSV");
  bench->add_option("--imputed-csv", imputed, "externally imputed data CSV to score");
  bench->add_flag("--zero-missing-class-means", cfg.zero_missing_class_means,
                  "write literal zeros for unestimable class-mean components");
  bench->add_flag("--stamp", cfg.stamp, "embed a wall-clock timestamp in the report");

  CLI::App* heat =
      app.add_subcommand("heatmap", "render heatmaps for estimates against a truth matrix");
  add_out_opt(heat);
  heat->add_option("--truth", truth, "truth covariance CSV")->required();
  heat->add_option("estimates", estimates, "estimate matrix CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  cfg.data = data;
  cfg.schema = schema;
  cfg.truth = truth;
  cfg.imputed = imputed;
  cfg.out = out;
  for (const auto& path : estimates) {
    cfg.estimates.emplace_back(path);
  }

  try {
    if (est->parsed()) {
      const auto res = dperc::run_estimate(cfg);
      print_warnings(res.warnings);
      std::cout << json{{"command", "estimate"}, {"files", files_json(res.files)}}.dump()
                << "\n";
    } else if (sim->parsed()) {
      cfg.rates = {sim_rate};
      const auto res = dperc::run_simulate(cfg);
      std::cout << json{{"command", "simulate"},
                        {"csv", res.csv.string()},
                        {"meta", res.meta.string()},
                        {"realized_missing_rate", res.realized_rate}}
                       .dump()
                << "\n";
    } else if (bench->parsed()) {
      const auto res = dperc::run_benchmark(cfg);
      print_warnings(res.warnings);
      std::cout << json{{"command", "benchmark"},
                        {"report", res.report_json.string()},
                        {"report_csv", res.report_csv.string()},
                        {"summary_csv", res.summary_csv.string()},
                        {"rows", res.rows.size()},
                        {"artifacts", res.artifacts.size()}}
                       .dump()
                << "\n";
    } else if (heat->parsed()) {
      const auto res = dperc::run_heatmap(cfg);
      print_warnings(res.warnings);
      std::cout << json{{"command", "heatmap"}, {"files", files_json(res.files)}}.dump()
                << "\n";
    }
  } catch (const dperc::UsageError& e) {
    return fail("usage", e.what(), 2);
  } catch (const dperc::DataFormatError& e) {
    return fail("data", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}

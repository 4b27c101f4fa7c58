// Python module exposing the main operations. Missing cells cross the
// boundary as NaN in both directions; estimates come back as plain dicts.

#include "dperc/baselines.hpp"
#include "dperc/dper.hpp"
#include "dperc/dperc.hpp"
#include "dperc/masked_matrix.hpp"
#include "dperc/metrics.hpp"
#include "dperc/missingness.hpp"
#include "dperc/report.hpp"
#include "dperc/rng.hpp"
#include "dperc/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

py::dict estimate_dict(const dperc::CovarianceEstimate& est) {
  py::dict out;
  out["sigma"] = est.sigma;
  out["means"] = est.means;
  out["class_codes"] = est.class_codes;
  return out;
}

dperc::DpercOptions make_options(bool zero_missing_class_means) {
  dperc::DpercOptions opts;
  opts.missing_mean = zero_missing_class_means ? dperc::MissingMeanPolicy::kLiteralZero
                                               : dperc::MissingMeanPolicy::kGlobalMean;
  return opts;
}

dperc::HeatmapKind kind_from_name(const std::string& kind) {
  if (kind == "correlation") return dperc::HeatmapKind::kCorrelation;
  if (kind == "mse") return dperc::HeatmapKind::kLocalMse;
  if (kind == "diff") return dperc::HeatmapKind::kSignedDiff;
  throw std::invalid_argument("unknown heatmap kind '" + kind +
                              "' (expected correlation, mse, or diff)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Covariance and correlation estimation directly from incomplete mixed-type data";
  m.attr("__version__") = dperc::kVersion;
  m.attr("rng_id") = dperc::kRngId;

  m.def(
      "dper",
      [](const Eigen::MatrixXd& values) {
        return estimate_dict(dperc::dper_single(dperc::MaskedMatrix::from_nan(values)));
      },
      py::arg("values"),
      "DPER covariance estimate of a NaN-coded matrix. Returns a dict with "
      "'sigma', 'means' (one row per class), and 'class_codes'.");

  m.def(
      "dper_multi",
      [](const Eigen::MatrixXd& values, const std::vector<int>& labels, int class_count) {
        return estimate_dict(dperc::dper_multi(dperc::MaskedMatrix::from_nan(values),
                                               labels, class_count));
      },
      py::arg("values"), py::arg("labels"), py::arg("class_count"),
      "Shared-covariance DPER estimate pooling within integer-coded classes.");

  m.def(
      "dperc",
      [](const Eigen::MatrixXd& values, const Eigen::MatrixXi& categoricals,
         const std::vector<int>& category_counts, bool zero_missing_class_means) {
        return estimate_dict(dperc::dperc_single(dperc::MaskedMatrix::from_nan(values),
                                                 categoricals, category_counts,
                                                 make_options(zero_missing_class_means)));
      },
      py::arg("values"), py::arg("categoricals"), py::arg("category_counts"),
      py::arg("zero_missing_class_means") = false,
      "DPERC covariance estimate: per pair, the categorical with the smallest "
      "dispersion score drives a pooled within-group re-estimate.");

  m.def(
      "dperc_multi",
      [](const Eigen::MatrixXd& values, const Eigen::MatrixXi& categoricals,
         const std::vector<int>& category_counts, const std::vector<int>& labels,
         int class_count, bool zero_missing_class_means) {
        const auto results = dperc::dperc_multi(dperc::MaskedMatrix::from_nan(values),
                                                categoricals, category_counts, labels,
                                                class_count,
                                                make_options(zero_missing_class_means));
        py::list out;
        for (const auto& [code, est] : results) {
          out.append(py::make_tuple(code, estimate_dict(est)));
        }
        return out;
      },
      py::arg("values"), py::arg("categoricals"), py::arg("category_counts"),
      py::arg("labels"), py::arg("class_count"), py::arg("zero_missing_class_means") = false,
      "Per-class DPERC estimates as (class_code, estimate) pairs in ascending code order.");

  m.def(
      "mean_impute",
      [](const Eigen::MatrixXd& values) {
        return dperc::mean_impute(dperc::MaskedMatrix::from_nan(values)).values;
      },
      py::arg("values"), "Fill every missing cell with its column's observed mean.");

  m.def(
      "knn_impute",
      [](const Eigen::MatrixXd& values, int k) {
        return dperc::knn_impute(dperc::MaskedMatrix::from_nan(values), k).values;
      },
      py::arg("values"), py::arg("k"),
      "Fill each missing cell with the mean of that column over the k nearest rows "
      "(Euclidean distance on co-observed coordinates, rescaled).");

  m.def(
      "sample_cov",
      [](const Eigen::MatrixXd& values) { return estimate_dict(dperc::sample_cov(values)); },
      py::arg("values"),
      "Uncorrected sample covariance and column means of a complete matrix.");

  m.def(
      "apply_mcar",
      [](const Eigen::MatrixXd& values, double rate, std::uint64_t seed,
         const std::vector<Eigen::Index>& columns) {
        const dperc::MaskPlan plan{rate, seed, columns};
        return dperc::apply_mcar(dperc::MaskedMatrix::from_nan(values), plan).to_nan();
      },
      py::arg("values"), py::arg("rate"), py::arg("seed"),
      py::arg("columns") = std::vector<Eigen::Index>{},
      "Mask exactly round(rate * rows * targets) cells uniformly without replacement, "
      "never emptying a column. Deterministic per (rate, seed, columns).");

  m.def(
      "realized_missing_rate",
      [](const Eigen::MatrixXd& values) {
        return dperc::realized_missing_rate(dperc::MaskedMatrix::from_nan(values));
      },
      py::arg("values"), "Fraction of NaN cells.");

  m.def("error_e", &dperc::error_e, py::arg("est"), py::arg("truth"),
        "Frobenius norm of (est - truth) divided by the entry count.");
  m.def("error_r", &dperc::error_r, py::arg("est"), py::arg("truth"),
        "Off-diagonal Frobenius error; no normalization.");
  m.def("improvement_p", &dperc::improvement_p, py::arg("r_ref"), py::arg("r_new"),
        "Percent improvement 100*(1 - r_new/r_ref); None when the reference is zero.");

  m.def(
      "cov_to_corr",
      [](const Eigen::MatrixXd& sigma) {
        bool overshoot = false;
        Eigen::MatrixXd corr = dperc::cov_to_corr(sigma, &overshoot);
        if (overshoot) {
          if (PyErr_WarnEx(PyExc_RuntimeWarning,
                           "correlation entries outside [-1, 1] by more than 1e-12 were "
                           "kept verbatim",
                           1) == -1) {
            throw py::error_already_set();
          }
        }
        return corr;
      },
      py::arg("sigma"),
      "Correlation matrix from a covariance matrix with strictly positive diagonal. "
      "Warns when an entry overshoots [-1, 1] beyond rounding error.");

  m.def(
      "decomposition_terms",
      [](const Eigen::MatrixXd& points, const Eigen::VectorXd& mean,
         const Eigen::MatrixXd& inv_dispersion) {
        const dperc::DecompositionTerms t =
            dperc::decomposition_terms(points, mean, inv_dispersion);
        return py::make_tuple(t.delta, t.pairwise, t.mean_shift);
      },
      py::arg("points"), py::arg("mean"), py::arg("inv_dispersion"),
      "Returns (delta, pairwise, mean_shift) with delta == pairwise + n * mean_shift.");

  m.def(
      "render_heatmap",
      [](const Eigen::MatrixXd& values, const std::string& kind, const std::string& title,
         const std::vector<std::string>& labels) {
        const dperc::HeatmapArtifact art =
            dperc::render_heatmap(values, {kind_from_name(kind), title, labels});
        return py::make_tuple(art.svg, art.values_csv);
      },
      py::arg("values"), py::arg("kind") = "correlation", py::arg("title") = "",
      py::arg("labels") = std::vector<std::string>{},
      "Render a square matrix as (svg, values_csv). Kinds: correlation (fixed [-1,1] "
      "diverging scale), mse ([0,max] sequential), diff (symmetric diverging).");
}

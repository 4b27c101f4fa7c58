#include "dperc/report.hpp"

#include "dperc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string_view>

namespace dperc {

namespace {

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};

// Diverging palette endpoints and the sequential high end.
constexpr Rgb kNegAnchor{197, 27, 125};   // #C51B7D
constexpr Rgb kMidAnchor{255, 255, 255};  // #FFFFFF
constexpr Rgb kPosAnchor{33, 102, 172};   // #2166AC
constexpr Rgb kHighAnchor{165, 15, 21};   // #A50F15

Rgb lerp(Rgb a, Rgb b, double s) {
  auto mix = [s](int x, int y) {
    long v = std::lround(x + s * (y - x));
    return static_cast<int>(std::clamp(v, 0L, 255L));
  };
  return Rgb{mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return std::string(buf);
}

struct Scale {
  double lo = 0.0;
  double mid = 0.0;
  double hi = 1.0;
  bool diverging = true;

  Rgb at(double v) const {
    v = std::clamp(v, lo, hi);
    if (!diverging) {
      return lerp(kMidAnchor, kHighAnchor, (v - lo) / (hi - lo));
    }
    if (v < mid) {
      return lerp(kNegAnchor, kMidAnchor, (v - lo) / (mid - lo));
    }
    return lerp(kMidAnchor, kPosAnchor, (v - mid) / (hi - mid));
  }
};

Scale make_scale(HeatmapKind kind, const Eigen::MatrixXd& values) {
  switch (kind) {
    case HeatmapKind::kCorrelation:
      return Scale{-1.0, 0.0, 1.0, true};
    case HeatmapKind::kSignedDiff: {
      double m = values.cwiseAbs().maxCoeff();
      if (!(m > 0.0)) {
        m = 1.0;
      }
      return Scale{-m, 0.0, m, true};
    }
    case HeatmapKind::kLocalMse: {
      double m = values.maxCoeff();
      if (!(m > 0.0)) {
        m = 1.0;
      }
      return Scale{0.0, 0.0, m, false};
    }
  }
  throw std::invalid_argument("render_heatmap: unknown heatmap kind");
}

// Fixed two decimals for geometry, six significant digits for data values.
std::string fmt2(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string fmt_val(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string t;
  t.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': t += "&amp;"; break;
      case '<': t += "&lt;"; break;
      case '>': t += "&gt;"; break;
      case '"': t += "&quot;"; break;
      case '\'': t += "&apos;"; break;
      default: t += c;
    }
  }
  return t;
}

}  // namespace

Eigen::MatrixXd local_mse_matrix(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw std::invalid_argument("local_mse_matrix: matrix shapes differ");
  }
  return (truth - est).array().square();
}

Eigen::MatrixXd signed_diff_matrix(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw std::invalid_argument("signed_diff_matrix: matrix shapes differ");
  }
  return truth - est;
}

HeatmapArtifact render_heatmap(const Eigen::MatrixXd& values, const HeatmapSpec& spec) {
  const Eigen::Index p = values.rows();
  if (p == 0 || values.cols() != p) {
    throw std::invalid_argument("render_heatmap: matrix must be square and non-empty");
  }
  const bool named = !spec.labels.empty();
  if (named && spec.labels.size() != static_cast<std::size_t>(p)) {
    throw std::invalid_argument("render_heatmap: label count must match matrix size");
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!std::isfinite(values(i, j))) {
        throw std::invalid_argument("render_heatmap: values must be finite");
      }
    }
  }

  const Scale scale = make_scale(spec.kind, values);

  constexpr double kCell = 28.0;
  const double ox = named ? 110.0 : 40.0;
  const double oy = named ? 110.0 : 48.0;
  const double grid_w = kCell * static_cast<double>(p);
  const double grid_h = grid_w;
  const double bar_w = std::max(grid_w, 140.0);
  const double bar_y = oy + grid_h + 24.0;
  const double tick_y = bar_y + 14.0 + 16.0;
  const double doc_y = tick_y + 18.0;
  const double width = std::max(ox + grid_w + 40.0, ox + bar_w + 40.0);
  const double height = doc_y + 16.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) +
         "\" height=\"" + fmt2(height) + "\" viewBox=\"0 0 " + fmt2(width) + " " +
         fmt2(height) + "\">\n";
  svg += "<defs>\n<linearGradient id=\"scale\" x1=\"0\" y1=\"0\" x2=\"1\" y2=\"0\">\n";
  if (scale.diverging) {
    svg += "<stop offset=\"0%\" stop-color=\"" + hex(kNegAnchor) + "\"/>\n";
    svg += "<stop offset=\"50%\" stop-color=\"" + hex(kMidAnchor) + "\"/>\n";
    svg += "<stop offset=\"100%\" stop-color=\"" + hex(kPosAnchor) + "\"/>\n";
  } else {
    svg += "<stop offset=\"0%\" stop-color=\"" + hex(kMidAnchor) + "\"/>\n";
    svg += "<stop offset=\"100%\" stop-color=\"" + hex(kHighAnchor) + "\"/>\n";
  }
  svg += "</linearGradient>\n</defs>\n";
  svg += "<rect width=\"" + fmt2(width) + "\" height=\"" + fmt2(height) +
         "\" fill=\"#FFFFFF\"/>\n";
  svg += "<g font-family=\"sans-serif\">\n";
  svg += "<text x=\"" + fmt2(ox) + "\" y=\"24.00\" font-size=\"16\" font-weight=\"bold\">" +
         xml_escape(spec.title) + "</text>\n";

  if (named) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double cx = ox + kCell * (static_cast<double>(j) + 0.5);
      const double cy = oy - 8.0;
      svg += "<text x=\"" + fmt2(cx) + "\" y=\"" + fmt2(cy) +
             "\" font-size=\"11\" transform=\"rotate(-45 " + fmt2(cx) + " " + fmt2(cy) +
             ")\">" + xml_escape(spec.labels[static_cast<std::size_t>(j)]) + "</text>\n";
    }
    for (Eigen::Index i = 0; i < p; ++i) {
      const double cy = oy + kCell * (static_cast<double>(i) + 0.5) + 4.0;
      svg += "<text x=\"" + fmt2(ox - 8.0) + "\" y=\"" + fmt2(cy) +
             "\" font-size=\"11\" text-anchor=\"end\">" +
             xml_escape(spec.labels[static_cast<std::size_t>(i)]) + "</text>\n";
    }
  }

  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double x = ox + kCell * static_cast<double>(j);
      const double y = oy + kCell * static_cast<double>(i);
      const double v = values(i, j);
      std::string tip;
      if (named) {
        tip = spec.labels[static_cast<std::size_t>(i)] + ", " +
              spec.labels[static_cast<std::size_t>(j)] + ": " + fmt_val(v);
      } else {
        tip = "(" + std::to_string(i) + "," + std::to_string(j) + "): " + fmt_val(v);
      }
      svg += "<rect class=\"cell\" x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" +
             fmt2(kCell) + "\" height=\"" + fmt2(kCell) + "\" fill=\"" +
             hex(scale.at(v)) + "\"><title>" + xml_escape(tip) + "</title></rect>\n";
    }
  }

  svg += "<rect x=\"" + fmt2(ox) + "\" y=\"" + fmt2(bar_y) + "\" width=\"" + fmt2(bar_w) +
         "\" height=\"14.00\" fill=\"url(#scale)\" stroke=\"#888888\"/>\n";
  svg += "<text x=\"" + fmt2(ox) + "\" y=\"" + fmt2(tick_y) + "\" font-size=\"11\">" +
         fmt2(scale.lo) + "</text>\n";
  if (scale.diverging) {
    svg += "<text x=\"" + fmt2(ox + bar_w / 2.0) + "\" y=\"" + fmt2(tick_y) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + fmt2(scale.mid) + "</text>\n";
  }
  svg += "<text x=\"" + fmt2(ox + bar_w) + "\" y=\"" + fmt2(tick_y) +
         "\" font-size=\"11\" text-anchor=\"end\">" + fmt2(scale.hi) + "</text>\n";
  std::string doc = "color anchors: ";
  if (scale.diverging) {
    doc += fmt2(scale.lo) + " " + hex(kNegAnchor) + ", " + fmt2(scale.mid) + " " +
           hex(kMidAnchor) + ", " + fmt2(scale.hi) + " " + hex(kPosAnchor);
  } else {
    doc += fmt2(scale.lo) + " " + hex(kMidAnchor) + ", " + fmt2(scale.hi) + " " +
           hex(kHighAnchor);
  }
  svg += "<text x=\"" + fmt2(ox) + "\" y=\"" + fmt2(doc_y) + "\" font-size=\"11\">" +
         xml_escape(doc) + "</text>\n";
  svg += "</g>\n</svg>\n";

  std::string values_csv;
  if (named) {
    csv::Row header(spec.labels.begin(), spec.labels.end());
    values_csv += csv::join_row(header);
    values_csv += "\n";
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    csv::Row row;
    row.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
      row.push_back(csv::format_double(values(i, j)));
    }
    values_csv += csv::join_row(row);
    values_csv += "\n";
  }

  return HeatmapArtifact{std::move(svg), std::move(values_csv)};
}

}  // namespace dperc

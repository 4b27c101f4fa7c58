#include "dperc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace dperc {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Eigen::Index DatasetSchema::continuous_count() const {
  return static_cast<Eigen::Index>(std::count_if(
      columns.begin(), columns.end(),
      [](const ColumnSpec& c) { return c.kind == FeatureKind::kContinuous; }));
}

Eigen::Index DatasetSchema::categorical_count() const {
  return static_cast<Eigen::Index>(std::count_if(
      columns.begin(), columns.end(),
      [](const ColumnSpec& c) { return c.kind == FeatureKind::kCategorical; }));
}

std::optional<std::size_t> DatasetSchema::label_column() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].kind == FeatureKind::kClassLabel) return i;
  }
  return std::nullopt;
}

std::vector<std::string> DatasetSchema::continuous_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.kind == FeatureKind::kContinuous) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> DatasetSchema::categorical_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.kind == FeatureKind::kCategorical) out.push_back(c.name);
  }
  return out;
}

void DatasetSchema::validate() const {
  if (columns.empty()) throw std::invalid_argument("schema has no columns");
  std::unordered_set<std::string> seen;
  int labels = 0;
  for (const auto& c : columns) {
    if (c.name.empty()) throw std::invalid_argument("schema has an unnamed column");
    if (!seen.insert(c.name).second) {
      throw std::invalid_argument("duplicate column name in schema: " + c.name);
    }
    if (c.kind == FeatureKind::kClassLabel) ++labels;
  }
  if (labels > 1) throw std::invalid_argument("schema declares more than one label column");
}

std::vector<int> MixedDataset::category_counts() const {
  std::vector<int> out;
  out.reserve(categorical_levels.size());
  for (const auto& levels : categorical_levels) out.push_back(static_cast<int>(levels.size()));
  return out;
}

void MixedDataset::validate() const {
  schema.validate();
  const Eigen::Index n = rows();
  if (n < 1) throw std::invalid_argument("dataset has no rows");
  if (continuous_count() < 1) throw std::invalid_argument("dataset has no continuous columns");
  if (schema.continuous_count() != continuous_count() ||
      schema.categorical_count() != categorical_count()) {
    throw std::invalid_argument("schema does not match dataset block shapes");
  }
  if (categoricals.rows() != n && categorical_count() > 0) {
    throw std::invalid_argument("categorical block row count mismatch");
  }
  if (static_cast<Eigen::Index>(categorical_levels.size()) != categorical_count()) {
    throw std::invalid_argument("categorical dictionary count mismatch");
  }
  for (Eigen::Index k = 0; k < categorical_count(); ++k) {
    const int g = category_count(k);
    if (g < 1) throw std::invalid_argument("categorical column with empty dictionary");
    for (Eigen::Index i = 0; i < n; ++i) {
      const int code = categoricals(i, k);
      if (code < 0 || code >= g) {
        throw std::invalid_argument("categorical code out of range at row " + std::to_string(i));
      }
    }
  }
  const bool schema_label = schema.label_column().has_value();
  if (schema_label != labels.has_value()) {
    throw std::invalid_argument("label block does not match schema");
  }
  if (labels) {
    if (labels->size() != n) throw std::invalid_argument("label vector length mismatch");
    const int g = class_count();
    if (g < 1) throw std::invalid_argument("label dictionary is empty");
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((*labels)(i) < 0 || (*labels)(i) >= g) {
        throw std::invalid_argument("label code out of range at row " + std::to_string(i));
      }
    }
  }
}

MixedDataset ingest_csv(const std::filesystem::path& path, const DatasetSchema& schema,
                        const IngestOptions& opts) {
  schema.validate();
  const auto rows = csv::read_file(path);
  if (rows.size() < 2) {
    throw DataFormatError("dataset needs a header row and at least one data row: " +
                          path.string());
  }
  const csv::Row& header = rows[0];
  if (header.size() != schema.columns.size()) {
    throw DataFormatError("header has " + std::to_string(header.size()) +
                          " columns, schema declares " + std::to_string(schema.columns.size()));
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != schema.columns[c].name) {
      throw DataFormatError("header column " + std::to_string(c + 1) + " is '" + header[c] +
                            "', schema expects '" + schema.columns[c].name + "'");
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size() - 1);
  const Eigen::Index p = schema.continuous_count();
  const Eigen::Index q = schema.categorical_count();
  if (p < 1) throw DataFormatError("schema declares no continuous columns");

  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, p);
  BoolGrid mask = BoolGrid::Constant(n, p, false);
  Eigen::MatrixXi cats = Eigen::MatrixXi::Zero(n, q);
  std::vector<std::vector<std::string>> cat_levels(static_cast<std::size_t>(q));
  std::vector<std::unordered_map<std::string, int>> cat_index(static_cast<std::size_t>(q));
  Eigen::VectorXi labels = Eigen::VectorXi::Zero(n);
  std::vector<std::string> label_levels;
  std::unordered_map<std::string, int> label_index;

  const auto encode = [](const std::string& cell, std::vector<std::string>& levels,
                         std::unordered_map<std::string, int>& index) {
    const auto it = index.find(cell);
    if (it != index.end()) return it->second;
    const int code = static_cast<int>(levels.size());
    levels.push_back(cell);
    index.emplace(cell, code);
    return code;
  };

  for (Eigen::Index r = 0; r < n; ++r) {
    const csv::Row& row = rows[static_cast<std::size_t>(r) + 1];
    if (row.size() != schema.columns.size()) {
      throw DataFormatError("row " + std::to_string(r + 2) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(schema.columns.size()));
    }
    Eigen::Index ci = 0, ki = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& cell = row[c];
      const bool is_missing = (cell == opts.missing_token);
      switch (schema.columns[c].kind) {
        case FeatureKind::kContinuous: {
          if (!is_missing) {
            const auto v = csv::parse_double(cell);
            if (!v || !std::isfinite(*v)) {
              throw DataFormatError("row " + std::to_string(r + 2) + ", column '" +
                                    schema.columns[c].name + "': '" + cell +
                                    "' is not a finite number");
            }
            values(r, ci) = *v;
            mask(r, ci) = true;
          }
          ++ci;
          break;
        }
        case FeatureKind::kCategorical: {
          if (is_missing) {
            throw DataFormatError("row " + std::to_string(r + 2) + ", column '" +
                                  schema.columns[c].name +
                                  "': missing categorical values are not supported");
          }
          cats(r, ki) = encode(cell, cat_levels[static_cast<std::size_t>(ki)],
                               cat_index[static_cast<std::size_t>(ki)]);
          ++ki;
          break;
        }
        case FeatureKind::kClassLabel: {
          if (is_missing) {
            throw DataFormatError("row " + std::to_string(r + 2) + ", column '" +
                                  schema.columns[c].name +
                                  "': missing class labels are not supported");
          }
          labels(r) = encode(cell, label_levels, label_index);
          break;
        }
      }
    }
  }

  for (Eigen::Index j = 0; j < p; ++j) {
    if (!mask.col(j).any()) {
      throw DataFormatError("continuous column '" + schema.continuous_names()[static_cast<std::size_t>(j)] +
                            "' has no observed values");
    }
  }

  MixedDataset ds;
  ds.schema = schema;
  ds.continuous = MaskedMatrix(std::move(values), std::move(mask));
  ds.categoricals = std::move(cats);
  ds.categorical_levels = std::move(cat_levels);
  if (schema.label_column()) {
    ds.labels = std::move(labels);
    ds.label_levels = std::move(label_levels);
  }
  ds.validate();
  return ds;
}

DatasetSchema read_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open schema file: " + path.string());
  DatasetSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto colon = trimmed.find(':');
    if (colon == std::string::npos) {
      throw DataFormatError("schema line " + std::to_string(line_no) +
                            " is not 'name: kind': " + trimmed);
    }
    ColumnSpec spec;
    spec.name = trim(trimmed.substr(0, colon));
    const std::string kind = to_lower(trim(trimmed.substr(colon + 1)));
    if (kind == "continuous") {
      spec.kind = FeatureKind::kContinuous;
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::kCategorical;
    } else if (kind == "label" || kind == "class_label") {
      spec.kind = FeatureKind::kClassLabel;
    } else {
      throw DataFormatError("schema line " + std::to_string(line_no) + ": unknown kind '" +
                            kind + "' (use continuous, categorical, or label)");
    }
    schema.columns.push_back(std::move(spec));
  }
  try {
    schema.validate();
  } catch (const std::invalid_argument& e) {
    throw DataFormatError(std::string("bad schema file: ") + e.what());
  }
  return schema;
}

DatasetSchema infer_schema(const std::filesystem::path& path,
                           const std::optional<std::string>& label,
                           const IngestOptions& opts) {
  const auto rows = csv::read_file(path);
  if (rows.size() < 2) {
    throw DataFormatError("dataset needs a header row and at least one data row: " +
                          path.string());
  }
  const csv::Row& header = rows[0];
  DatasetSchema schema;
  for (std::size_t c = 0; c < header.size(); ++c) {
    ColumnSpec spec;
    spec.name = header[c];
    bool numeric = true;
    for (std::size_t r = 1; r < rows.size() && numeric; ++r) {
      if (c >= rows[r].size()) {
        throw DataFormatError("row " + std::to_string(r + 1) + " has fewer fields than the header");
      }
      const std::string& cell = rows[r][c];
      if (cell == opts.missing_token) continue;
      const auto v = csv::parse_double(cell);
      if (!v || !std::isfinite(*v)) numeric = false;
    }
    spec.kind = numeric ? FeatureKind::kContinuous : FeatureKind::kCategorical;
    schema.columns.push_back(std::move(spec));
  }
  if (label) {
    bool found = false;
    for (auto& c : schema.columns) {
      if (c.name == *label) {
        c.kind = FeatureKind::kClassLabel;
        found = true;
      }
    }
    if (!found) throw DataFormatError("label column '" + *label + "' not found in header");
  }
  try {
    schema.validate();
  } catch (const std::invalid_argument& e) {
    throw DataFormatError(std::string("inferred schema is invalid: ") + e.what());
  }
  return schema;
}

void write_csv(const MixedDataset& ds, const std::filesystem::path& path,
               const IngestOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  csv::Row header;
  for (const auto& c : ds.schema.columns) header.push_back(c.name);
  out << csv::join_row(header) << "\n";
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    csv::Row row;
    Eigen::Index ci = 0, ki = 0;
    for (const auto& c : ds.schema.columns) {
      switch (c.kind) {
        case FeatureKind::kContinuous:
          row.push_back(ds.continuous.observed(r, ci)
                            ? csv::format_double(ds.continuous.values(r, ci))
                            : opts.missing_token);
          ++ci;
          break;
        case FeatureKind::kCategorical:
          row.push_back(
              ds.categorical_levels[static_cast<std::size_t>(ki)]
                                   [static_cast<std::size_t>(ds.categoricals(r, ki))]);
          ++ki;
          break;
        case FeatureKind::kClassLabel:
          row.push_back(ds.label_levels[static_cast<std::size_t>((*ds.labels)(r))]);
          break;
      }
    }
    out << csv::join_row(row) << "\n";
  }
}

std::vector<std::pair<int, MixedDataset>> split_by_class(const MixedDataset& ds) {
  if (!ds.labels) throw std::invalid_argument("split_by_class: dataset has no class labels");
  const int classes = ds.class_count();

  DatasetSchema part_schema;
  for (const auto& c : ds.schema.columns) {
    if (c.kind != FeatureKind::kClassLabel) part_schema.columns.push_back(c);
  }

  std::vector<std::pair<int, MixedDataset>> parts;
  for (int g = 0; g < classes; ++g) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
      if ((*ds.labels)(r) == g) idx.push_back(r);
    }
    if (idx.empty()) continue;  // unreachable for first-appearance encodings
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd values(m, ds.continuous_count());
    BoolGrid mask(m, ds.continuous_count());
    Eigen::MatrixXi cats(m, ds.categorical_count());
    for (Eigen::Index i = 0; i < m; ++i) {
      values.row(i) = ds.continuous.values.row(idx[static_cast<std::size_t>(i)]);
      mask.row(i) = ds.continuous.observed.row(idx[static_cast<std::size_t>(i)]);
      if (ds.categorical_count() > 0) {
        cats.row(i) = ds.categoricals.row(idx[static_cast<std::size_t>(i)]);
      }
    }
    MixedDataset part;
    part.schema = part_schema;
    part.continuous = MaskedMatrix(std::move(values), std::move(mask));
    part.categoricals = std::move(cats);
    part.categorical_levels = ds.categorical_levels;
    parts.emplace_back(g, std::move(part));
  }
  return parts;
}

ColumnSummary column_summary(const MixedDataset& ds, Eigen::Index cont_col) {
  return column_summary(ds.continuous, cont_col);
}

}  // namespace dperc

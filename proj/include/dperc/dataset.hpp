#pragma once

#include "dperc/csv.hpp"
#include "dperc/masked_matrix.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dperc {

enum class FeatureKind { kContinuous, kCategorical, kClassLabel };

struct ColumnSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
};

/// Column layout of a dataset file: names in file order, one kind per column.
/// At most one column may carry the class label.
struct DatasetSchema {
  std::vector<ColumnSpec> columns;

  Eigen::Index continuous_count() const;
  Eigen::Index categorical_count() const;
  std::optional<std::size_t> label_column() const;
  std::vector<std::string> continuous_names() const;
  std::vector<std::string> categorical_names() const;

  void validate() const;
};

/// Mixed-type dataset in row order of the source file.
///
/// Continuous features live in a masked block; categorical features are
/// dictionary encoded in order of first appearance, with the level strings
/// kept so the file can be written back verbatim. Categorical and label
/// cells are always observed; only continuous cells may be missing.
struct MixedDataset {
  DatasetSchema schema;
  MaskedMatrix continuous;                                   // N x p
  Eigen::MatrixXi categoricals;                              // N x q codes
  std::vector<std::vector<std::string>> categorical_levels;  // per categorical column
  std::optional<Eigen::VectorXi> labels;                     // N class codes
  std::vector<std::string> label_levels;

  Eigen::Index rows() const { return continuous.rows(); }
  Eigen::Index continuous_count() const { return continuous.cols(); }
  Eigen::Index categorical_count() const { return categoricals.cols(); }
  int category_count(Eigen::Index cat) const {
    return static_cast<int>(categorical_levels[static_cast<std::size_t>(cat)].size());
  }
  int class_count() const { return static_cast<int>(label_levels.size()); }
  std::vector<int> category_counts() const;

  /// Throws std::invalid_argument when a structural invariant is broken
  /// (shape mismatches, codes out of range, non-contiguous dictionaries).
  void validate() const;
};

struct IngestOptions {
  /// Token marking a missing continuous cell; the empty string means an
  /// empty cell.
  std::string missing_token;
};

/// Reads a CSV whose header matches the schema column names (any order is an
/// error; the file order must agree). Continuous cells must parse as finite
/// reals or equal the missing token; categorical and label cells must be
/// non-missing. Columns with zero observed values are rejected.
MixedDataset ingest_csv(const std::filesystem::path& path, const DatasetSchema& schema,
                        const IngestOptions& opts = {});

/// Schema sidecar: one "name: kind" line per column in file order, where
/// kind is continuous, categorical, or label. '#' starts a comment.
DatasetSchema read_schema_file(const std::filesystem::path& path);

/// Types every column by inspection: all cells numeric (or missing) makes a
/// column continuous, anything else categorical. `label`, when given, forces
/// that named column to be the class label.
DatasetSchema infer_schema(const std::filesystem::path& path,
                           const std::optional<std::string>& label,
                           const IngestOptions& opts = {});

/// Writes the dataset back to CSV with full-precision values and RFC 4180
/// quoting. Re-ingesting the output reproduces mask, codes, and values
/// bit for bit.
void write_csv(const MixedDataset& ds, const std::filesystem::path& path,
               const IngestOptions& opts = {});

/// Splits by class label (ascending code order). Parts drop the label column
/// from their schema and keep the full categorical dictionaries.
std::vector<std::pair<int, MixedDataset>> split_by_class(const MixedDataset& ds);

/// Summary of one continuous column (index into the continuous block).
ColumnSummary column_summary(const MixedDataset& ds, Eigen::Index cont_col);

}  // namespace dperc

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dperc {

/// Raised for malformed input files: broken CSV quoting, ragged rows,
/// unparsable numbers, bad schema sidecars.
struct DataFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace csv {

using Row = std::vector<std::string>;

/// RFC 4180 parse of a whole file: quoted fields, doubled quotes, embedded
/// separators and line breaks, CRLF and LF endings. Empty lines are skipped.
std::vector<Row> read_file(const std::filesystem::path& path);

/// Field with RFC 4180 quoting applied when needed.
std::string escape_field(std::string_view field);
std::string join_row(const Row& row);

/// Shortest representation that parses back to the identical double.
std::string format_double(double v);

/// Strict full-string parse; locale independent. Accepts one leading '+'.
std::optional<double> parse_double(std::string_view s);

/// Numeric matrix file: an optional header row of column names followed by
/// rows of numbers. The header is detected by a non-numeric first row.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path,
                            std::vector<std::string>* names = nullptr);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& names);

}  // namespace csv
}  // namespace dperc

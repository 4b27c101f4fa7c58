#include "dperc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dperc::csv {

namespace {

std::string read_whole_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace

std::vector<Row> read_file(const std::filesystem::path& path) {
  const std::string text = read_whole_file(path);
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // true once the current row has any content

  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  const auto end_row = [&] {
    if (field_started || !field.empty() || !row.empty()) {
      end_field();
      rows.push_back(std::move(row));
      row.clear();
    }
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw DataFormatError("unterminated quoted field in " + path.string());
  end_row();
  return rows;
}

std::string escape_field(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape_field(row[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path,
                            std::vector<std::string>* names) {
  auto rows = read_file(path);
  if (rows.empty()) throw DataFormatError("empty matrix file: " + path.string());

  std::size_t first_data = 0;
  const bool has_header = [&] {
    for (const auto& f : rows[0]) {
      if (!parse_double(f)) return true;
    }
    return false;
  }();
  if (has_header) {
    if (names) *names = rows[0];
    first_data = 1;
  } else if (names) {
    names->clear();
  }
  if (first_data >= rows.size()) {
    throw DataFormatError("matrix file has a header but no rows: " + path.string());
  }

  const std::size_t n_rows = rows.size() - first_data;
  const std::size_t n_cols = rows[first_data].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < n_rows; ++r) {
    const Row& row = rows[first_data + r];
    if (row.size() != n_cols) {
      throw DataFormatError("ragged matrix row " + std::to_string(r + first_data + 1) +
                            " in " + path.string());
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      const auto v = parse_double(row[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataFormatError("bad number '" + row[c] + "' at row " +
                              std::to_string(r + first_data + 1) + ", column " +
                              std::to_string(c + 1) + " in " + path.string());
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  if (!names.empty()) {
    out << join_row(names) << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

}  // namespace dperc::csv

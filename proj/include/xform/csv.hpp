#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "xform/learning.hpp"
#include "xform/types.hpp"

namespace xform {

namespace detail {

inline std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace detail

/// Matrix text format: one comment header line
///   # rows=<r> cols=<c> layout=column-signals
/// followed by r comma-separated rows. Values round-trip exactly.
inline std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream out;
  out << "# rows=" << m.rows() << " cols=" << m.cols() << " layout=column-signals\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_full(m(i, j));
    }
    out << '\n';
  }
  return out.str();
}

inline Matrix matrix_from_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty matrix file");
  Index rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "# rows=%td cols=%td", &rows, &cols) != 2 || rows < 1 || cols < 1)
    throw std::invalid_argument("bad matrix header");
  Matrix m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("truncated matrix file");
    std::istringstream row(line);
    std::string cell;
    for (Index j = 0; j < cols; ++j) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("truncated matrix row");
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return matrix_from_csv(in);
}

inline constexpr char kTraceCsvHeader[] =
    "iter,objective,sparsification_error,condition_number,frobenius_norm,elapsed_ms";

inline std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const TraceRecord& row : trace) {
    out << row.iteration << ',' << detail::format_full(row.objective) << ','
        << detail::format_full(row.sparsification_error) << ','
        << detail::format_full(row.condition_number) << ','
        << detail::format_full(row.frobenius_norm) << ','
        << detail::format_full(row.elapsed_ms) << '\n';
  }
  return out.str();
}

/// Writes content to a temporary file in the target directory, then renames
/// it into place, so readers never observe a partially written file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace xform

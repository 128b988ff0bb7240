#ifndef GRAPHLET_IO_HPP
#define GRAPHLET_IO_HPP

// CSV matrix and vector I/O.
//
// Format: comma-separated values, one matrix row per line, no header.
// Values are written with "%.17g" so a write/read round trip reproduces
// every double bit-exactly.

#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graphlet/errors.hpp"

namespace graphlet {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t col = 0;
    while (true) {
      ++col;
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw CsvParseError(path + ": parse error at row " +
                            std::to_string(line_no) + ", column " +
                            std::to_string(col) + ": '" + cell + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw CsvParseError(path + ": row " + std::to_string(line_no) + " has " +
                          std::to_string(row.size()) + " columns, expected " +
                          std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvParseError(path + ": empty file");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

// Accepts a single-column or single-row file.
inline Eigen::VectorXd read_vector_csv(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw CsvParseError(path + ": expected a vector, got " +
                      std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
}

inline void write_matrix_csv(const std::string& path,
                             const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open file for writing: " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw FileError("write failed: " + path);
}

inline void write_vector_csv(const std::string& path,
                             const Eigen::VectorXd& v) {
  write_matrix_csv(path, v);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw FileError("write failed: " + path);
}

}  // namespace graphlet

#endif  // GRAPHLET_IO_HPP

#include "rsc/matrix_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace rsc {

namespace {

void check_finite_cell(double v, int line, int col) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-finite value at line " << line << ", column " << col + 1;
    throw ParseError(msg.str(), line);
  }
}

}  // namespace

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() && in.eof()) break;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(cell[pos] & 0xff)) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        check_finite_cell(v, lineno, static_cast<int>(row.size()));
        row.push_back(v);
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "unparsable cell '" << cell << "' at line " << lineno;
        throw ParseError(msg.str(), lineno);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << "ragged row at line " << lineno << " (" << row.size()
          << " cells, expected " << rows.front().size() << ")";
      throw ParseError(msg.str(), lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
    throw ParseError("empty matrix in " + path.string(), 1);

  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void save_matrix_csv(const std::filesystem::path& path,
                     const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[64];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

namespace {
constexpr char kMagic[4] = {'S', 'S', 'C', 'M'};
}

Eigen::MatrixXd load_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("bad magic in " + path.string());
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in) throw ParseError("truncated header in " + path.string());
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double)) * rows * cols);
  if (!in) throw ParseError("truncated payload in " + path.string());
  return m;
}

void save_matrix_binary(const std::filesystem::path& path,
                        const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * m.size());
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? load_matrix_csv(path)
                                    : load_matrix_binary(path);
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  if (path.extension() == ".csv")
    save_matrix_csv(path, m);
  else
    save_matrix_binary(path, m);
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      labels.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw ParseError("unparsable label at line " + std::to_string(lineno),
                       lineno);
    }
  }
  return labels;
}

void save_labels(const std::filesystem::path& path,
                 const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (int l : labels) out << l << '\n';
}

}  // namespace rsc

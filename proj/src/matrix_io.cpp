#include "bippt/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bippt {

void write_matrix(std::ostream& os, const DensityMatrix& m) {
  const int d = m.side();
  os << d << '\n' << m.dims().to_string() << '\n';
  char buf[32];
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.data()(i, j));
      os << (j ? " " : "") << buf;
    }
    os << '\n';
  }
}

void write_matrix_file(const std::string& path, const DensityMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix(os, m);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

DensityMatrix read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("matrix file: missing side length");
  int d = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> d) || d <= 0) throw std::runtime_error("matrix file: bad side length '" + line + "'");
  }
  if (!std::getline(is, line)) throw std::runtime_error("matrix file: missing subsystem dims");
  std::vector<int> dims;
  {
    std::istringstream ls(line);
    int v = 0;
    while (ls >> v) dims.push_back(v);
    if (!ls.eof()) throw std::runtime_error("matrix file: bad dims line '" + line + "'");
  }
  Matrix data(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::string tok;
      if (!(is >> tok)) {
        throw std::runtime_error("matrix file: expected " + std::to_string(d * d) +
                                 " entries, ran out at row " + std::to_string(i + 1));
      }
      std::size_t used = 0;
      data(i, j) = std::stod(tok, &used);
      if (used != tok.size()) throw std::runtime_error("matrix file: bad number '" + tok + "'");
    }
  }
  std::string extra;
  if (is >> extra) throw std::runtime_error("matrix file: trailing data '" + extra + "'");
  return DensityMatrix(std::move(data), SubsystemDims(std::move(dims)));
}

DensityMatrix read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix(is);
}

}  // namespace bippt

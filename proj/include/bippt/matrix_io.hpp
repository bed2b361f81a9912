#pragma once

// Plain-text matrix format:
//   line 1: side d
//   line 2: subsystem dims, space separated
//   next d lines: d row-major entries each, 17 significant digits.

#include <iosfwd>
#include <string>

#include "bippt/multipartite.hpp"

namespace bippt {

void write_matrix(std::ostream& os, const DensityMatrix& m);
void write_matrix_file(const std::string& path, const DensityMatrix& m);

// Throws std::runtime_error on malformed input or I/O failure, and ShapeError
// or DomainError if the parsed contents are inconsistent.
DensityMatrix read_matrix(std::istream& is);
DensityMatrix read_matrix_file(const std::string& path);

}  // namespace bippt

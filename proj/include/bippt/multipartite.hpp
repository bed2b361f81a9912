#pragma once

// Real multipartite density matrices: subsystem indexing, partial transposes
// over subsystem subsets, bipartition enumeration and test-state builders.
//
// Multi-index convention: subsystem 1 is the slowest-varying index, i.e. a
// product vector is v1 (x) v2 (x) ... (x) vN in Kronecker order.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bippt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class SubsystemDims {
 public:
  SubsystemDims() = default;
  // Throws DomainError if empty or any dimension is < 2.
  explicit SubsystemDims(std::vector<int> dims);

  int count() const { return static_cast<int>(dims_.size()); }
  int total() const { return total_; }
  int operator[](int k) const { return dims_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& dims() const { return dims_; }

  // Stride of subsystem k (0-based) in the linear index.
  int stride(int k) const { return strides_[static_cast<std::size_t>(k)]; }

  std::string to_string() const;

  friend bool operator==(const SubsystemDims& a, const SubsystemDims& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_ = 0;
};

// Real symmetric matrix annotated with its tensor structure. Validity as a
// quantum state (unit trace, PSD) is reported by check_density and is not
// enforced here.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Throws ShapeError if data is not total x total, DomainError if it is not
  // symmetric to 1e-12 * max(1, ||data||).
  DensityMatrix(Matrix data, SubsystemDims dims);

  const Matrix& data() const { return data_; }
  const SubsystemDims& dims() const { return dims_; }
  int side() const { return static_cast<int>(data_.rows()); }

 private:
  Matrix data_;
  SubsystemDims dims_;
};

// A bipartition S | S^c described by its 1-based left set. Canonical form:
// |left| <= floor(N/2), and when |left| == N/2 the set contains subsystem 1.
struct Bipartition {
  std::vector<int> left;

  std::string to_string() const;
  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

// All canonical bipartitions of N subsystems (2^(N-1) - 1 of them), ordered by
// (|left|, left) lexicographically. Throws DomainError for N < 2.
std::vector<Bipartition> enumerate_bipartitions(int n_subsystems);

// Precomputed index map for the partial transpose over one subsystem set.
// (i, j) -> (i - s[i] + s[j], j - s[j] + s[i]) where s[a] is the part of the
// linear index a carried by the transposed subsystems.
class PartialTranspose {
 public:
  PartialTranspose() = default;
  // Throws DomainError if part references a subsystem outside 1..N.
  PartialTranspose(const SubsystemDims& dims, const Bipartition& part);

  int side() const { return static_cast<int>(offset_.size()); }

  Matrix apply(const Matrix& m) const;
  // out must already be side x side and must not alias m.
  void apply_into(const Matrix& m, Matrix& out) const;

  // Target linear row/column of entry (i, j).
  std::pair<int, int> map(int i, int j) const {
    const int si = offset_[static_cast<std::size_t>(i)];
    const int sj = offset_[static_cast<std::size_t>(j)];
    return {i - si + sj, j - sj + si};
  }

 private:
  std::vector<int> offset_;
};

Matrix partial_transpose(const Matrix& m, const SubsystemDims& dims,
                         const Bipartition& part);
DensityMatrix partial_transpose(const DensityMatrix& m, const Bipartition& part);

enum class StateKind { W3, GHZ3, GHZ5, MultiGHZ5, Custom };

StateKind parse_state_kind(const std::string& name);
std::string state_kind_name(StateKind kind);

// Weights (m, n, s) of the five-partite multiGHZ vector.
struct MultiGhzCoeffs {
  double m = 1.0;
  double n = 1.0;
  double s = 1.0;
};

// Omega = v v^T + noise * I, rho = Omega / tr(Omega).
// W3/GHZ3 need dims (2,2,2); GHZ5/MultiGHZ5 need (3,3,3,3,3). Custom takes
// the pure-state vector from `custom_vector` (length dims.total()).
DensityMatrix make_state(StateKind kind, const SubsystemDims& dims, double noise,
                         const MultiGhzCoeffs& coeffs = {},
                         std::span<const double> custom_vector = {});

// Default dims of a named kind.
SubsystemDims default_dims(StateKind kind);

struct DensityReport {
  bool symmetric = false;
  double asymmetry = 0.0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  bool psd = false;
  bool valid_state = false;
};

// Never throws.
DensityReport check_density(const Matrix& m, double tol = 1e-10);
DensityReport check_density(const DensityMatrix& m, double tol = 1e-10);

Matrix symmetrize(const Matrix& m);
DensityMatrix symmetrize(const DensityMatrix& m);

}  // namespace bippt

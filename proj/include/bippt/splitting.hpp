#pragma once

// Stacked solver variables and the constraint operator
//
//   A x = (Gamma_1(x_1), ..., Gamma_m(x_m), x_1, ..., x_m),
//
// where Gamma_i is the partial transpose over bipartition i. A is applied
// blockwise through index maps and is only materialized for verification.

#include <cstdint>
#include <vector>

#include "bippt/multipartite.hpp"

namespace bippt {

// x: one candidate component per bipartition.
struct ComponentStack {
  std::vector<Matrix> blocks;

  int size() const { return static_cast<int>(blocks.size()); }
  int side() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows()); }

  static ComponentStack zeros(int m, int d);
};

// z, p and lambda: m transformed blocks followed by m plain copies.
struct AuxStack {
  std::vector<Matrix> transformed;
  std::vector<Matrix> copies;

  int size() const { return static_cast<int>(transformed.size()); }
  int side() const { return transformed.empty() ? 0 : static_cast<int>(transformed.front().rows()); }

  static AuxStack zeros(int m, int d);
};

ComponentStack operator+(const ComponentStack& a, const ComponentStack& b);
ComponentStack operator-(const ComponentStack& a, const ComponentStack& b);
ComponentStack operator*(double s, const ComponentStack& a);
double dot(const ComponentStack& a, const ComponentStack& b);
double squared_norm(const ComponentStack& a);
double norm(const ComponentStack& a);
// ||a - b||^2 without forming the difference.
double squared_distance(const ComponentStack& a, const ComponentStack& b);

AuxStack operator+(const AuxStack& a, const AuxStack& b);
AuxStack operator-(const AuxStack& a, const AuxStack& b);
AuxStack operator*(double s, const AuxStack& a);
double dot(const AuxStack& a, const AuxStack& b);
double squared_norm(const AuxStack& a);
double norm(const AuxStack& a);
double squared_distance(const AuxStack& a, const AuxStack& b);

// Column-stacking vectorization: entry (i, j) of a d x d matrix lands at j*d + i.
Vector vec(const Matrix& m);
// Throws ShapeError unless v.size() == d*d.
Matrix mat(const Vector& v, int d);

Vector vec(const ComponentStack& x);
Vector vec(const AuxStack& v);
ComponentStack component_stack_from_vec(const Vector& v, int m, int d);
AuxStack aux_stack_from_vec(const Vector& v, int m, int d);

class SplittingOperator {
 public:
  SplittingOperator(SubsystemDims dims, std::vector<Bipartition> parts);

  int blocks() const { return static_cast<int>(parts_.size()); }
  int side() const { return dims_.total(); }
  const SubsystemDims& dims() const { return dims_; }
  const std::vector<Bipartition>& parts() const { return parts_; }
  const PartialTranspose& transpose(int i) const { return maps_[static_cast<std::size_t>(i)]; }

  // Throw ShapeError on block count or side mismatch.
  AuxStack apply(const ComponentStack& x) const;
  ComponentStack adjoint(const AuxStack& v) const;

  // Explicit (2 m d^2) x (m d^2) matrix acting on vec(x).
  Matrix materialize() const;

 private:
  void check(int m, int d) const;

  SubsystemDims dims_;
  std::vector<Bipartition> parts_;
  std::vector<PartialTranspose> maps_;
};

struct OperatorIdentityCheck {
  bool holds = false;
  double max_deviation = 0.0;
  bool materialized = false;  // explicit A^T A, otherwise random probes
};

// A^T A = 2 I. Materializes A when d <= 16, otherwise checks
// ||A^T(A x) - 2 x||_inf on `probes` random stacks.
OperatorIdentityCheck verify_operator_identity(const SubsystemDims& dims,
                                               const std::vector<Bipartition>& parts,
                                               int probes = 20, std::uint64_t seed = 1);

}  // namespace bippt

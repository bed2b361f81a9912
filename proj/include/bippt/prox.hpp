#pragma once

// Subproblem solvers for one LPADMM sweep.

#include "bippt/objective.hpp"
#include "bippt/params.hpp"
#include "bippt/splitting.hpp"

namespace bippt {

// Frobenius-nearest PSD matrix: U max(Sigma, 0) U^T of the symmetrized input.
// Inputs that are already PSD are returned (symmetrized) unchanged. Throws
// NumericalError if the eigensolver fails.
Matrix project_psd(const Matrix& s);

// Nearest matrix with unit trace: V + (1 - tr V)/d * I.
Matrix project_trace_one(const Matrix& v);

// Euclidean projection onto {y : sum y = 1, y >= 0}.
Vector project_simplex(const Vector& v);

// Projection onto Z: PSD transformed blocks, unit-trace copies.
AuxStack project_z_set(const AuxStack& v);

//   min 1/2 y^T N y - q^T y + mu1/2 ||y - y_prev||^2   s.t. y in simplex
struct SimplexQP {
  Matrix n;
  Vector q;
  Vector y_prev;
  double mu1 = 0.1;

  double objective(const Vector& y) const;
};

// Primal active-set method over the faces of the simplex. Constraints enter
// and leave in lowest-index order on ties. Throws ModelError if N has an
// eigenvalue below -1e-8 (scaled by its largest diagonal entry) and
// ShapeError on inconsistent sizes.
Vector solve_simplex_qp(const SimplexQP& qp, double tol = 1e-12);

// x step: g = (-A^T lambda + mu2 x_prev + eta A^T z - grad_x f(x_prev, y_new)) / (2 eta + mu2),
// then blockwise PSD projection.
ComponentStack x_update(const ComponentStack& x_prev, const Vector& y_new, const AuxStack& lambda,
                        const AuxStack& z, const SolverParams& params, const SplittingOperator& op,
                        const Matrix& rho);

// p step: v = (xi z + mu3 p_prev) / (xi + mu3), then projection onto Z.
AuxStack p_update(const AuxStack& p_prev, const AuxStack& z, const SolverParams& params);

// z step: (lambda + eta A x_new + xi p_new) / (eta + xi).
AuxStack z_update(const AuxStack& ax_new, const AuxStack& p_new, const AuxStack& lambda,
                  const SolverParams& params);
AuxStack z_update(const ComponentStack& x_new, const AuxStack& p_new, const AuxStack& lambda,
                  const SolverParams& params, const SplittingOperator& op);

}  // namespace bippt

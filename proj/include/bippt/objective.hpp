#pragma once

// f(x, y) = 1/2 ||rho - sum_i y_i x_i||_F^2, its partial gradients, and the
// augmented Lagrangian of the penalized splitting model
//
//   L_eta = f + xi/2 ||p - z||^2 + <lambda, A x - z> + eta/2 ||A x - z||^2
//
// restricted to y in the simplex, x blockwise PSD and p in Z.

#include <string>

#include "bippt/multipartite.hpp"
#include "bippt/params.hpp"
#include "bippt/splitting.hpp"

namespace bippt {

struct ModelProblem {
  DensityMatrix rho;
  std::vector<Bipartition> parts;
  double xi = 100.0;

  int components() const { return static_cast<int>(parts.size()); }

  // Full bi-PPT model: every canonical bipartition of rho's subsystems.
  static ModelProblem full(DensityMatrix rho, double xi);
};

struct PrimalDualPoint {
  Vector y;
  ComponentStack x;
  AuxStack p;
  AuxStack z;
  AuxStack lambda;
};

// Throws ShapeError if y, x and rho disagree.
double objective_f(const ComponentStack& x, const Vector& y, const Matrix& rho);

// Block i: y_i (sum_j y_j x_j - rho).
ComponentStack grad_f_x(const ComponentStack& x, const Vector& y, const Matrix& rho);

struct Gram {
  Matrix n;  // <x_i, x_j>
  Vector q;  // <x_i, rho>
};

Gram gram(const ComponentStack& x, const Matrix& rho);

// N y - q.
Vector grad_f_y(const ComponentStack& x, const Vector& y, const Matrix& rho);

struct LagrangianTerms {
  double f = 0.0;
  double penalty = 0.0;    // xi/2 ||p - z||^2
  double linear = 0.0;     // <lambda, A x - z>
  double quadratic = 0.0;  // eta/2 ||A x - z||^2
  double value = 0.0;      // sum, or +inf when an indicator is violated
  bool feasible = true;
  std::string violated;    // "Y", "X" or "Z" when infeasible
};

enum class IndicatorCheck { Evaluate, Skip };

// Indicator sets are tested to `feas_tol` (simplex sum, PSD eigenvalues
// relative to the block norm, unit trace). An infeasible point gets
// value = +inf and names the first violated set; the four finite terms are
// still filled in.
LagrangianTerms augmented_lagrangian(const PrimalDualPoint& pt, const SolverParams& params,
                                     const SplittingOperator& op, const Matrix& rho,
                                     IndicatorCheck check = IndicatorCheck::Evaluate,
                                     double feas_tol = 1e-9);

struct HessianBlocks {
  Matrix n;                   // Hessian in y (the Gram matrix)
  double lambda_max_m = 0.0;  // largest eigenvalue of (y y^T) (x) I, i.e. sum y_i^2
};

HessianBlocks hessian_blocks(const ComponentStack& x, const Vector& y);

bool in_simplex(const Vector& y, double tol = 1e-10);
bool blocks_psd(const std::vector<Matrix>& blocks, double tol = 1e-9);

}  // namespace bippt

#include "bippt/objective.hpp"

#include <cmath>
#include <limits>

#include "bippt/errors.hpp"

namespace bippt {

ModelProblem ModelProblem::full(DensityMatrix rho, double xi) {
  ModelProblem p;
  p.parts = enumerate_bipartitions(rho.dims().count());
  p.rho = std::move(rho);
  p.xi = xi;
  return p;
}

namespace {

void check_shapes(const ComponentStack& x, const Vector& y, const Matrix& rho) {
  if (x.size() == 0) throw ShapeError("empty component stack");
  if (y.size() != x.size()) {
    throw ShapeError("weight vector has " + std::to_string(y.size()) + " entries for " +
                     std::to_string(x.size()) + " components");
  }
  for (const auto& b : x.blocks) {
    if (b.rows() != rho.rows() || b.cols() != rho.cols()) {
      throw ShapeError("component side does not match rho");
    }
  }
}

Matrix residual(const ComponentStack& x, const Vector& y, const Matrix& rho) {
  Matrix r = -rho;
  for (int i = 0; i < x.size(); ++i) r += y(i) * x.blocks[static_cast<std::size_t>(i)];
  return r;
}

}  // namespace

double objective_f(const ComponentStack& x, const Vector& y, const Matrix& rho) {
  check_shapes(x, y, rho);
  return 0.5 * residual(x, y, rho).squaredNorm();
}

ComponentStack grad_f_x(const ComponentStack& x, const Vector& y, const Matrix& rho) {
  check_shapes(x, y, rho);
  const Matrix r = residual(x, y, rho);
  ComponentStack g;
  g.blocks.reserve(x.blocks.size());
  for (int i = 0; i < x.size(); ++i) g.blocks.push_back(y(i) * r);
  return g;
}

Gram gram(const ComponentStack& x, const Matrix& rho) {
  const int m = x.size();
  Gram g{Matrix(m, m), Vector(m)};
  for (int i = 0; i < m; ++i) {
    const Matrix& xi = x.blocks[static_cast<std::size_t>(i)];
    if (xi.rows() != rho.rows() || xi.cols() != rho.cols()) {
      throw ShapeError("component side does not match rho");
    }
    for (int j = 0; j <= i; ++j) {
      g.n(i, j) = g.n(j, i) = xi.cwiseProduct(x.blocks[static_cast<std::size_t>(j)]).sum();
    }
    g.q(i) = xi.cwiseProduct(rho).sum();
  }
  return g;
}

Vector grad_f_y(const ComponentStack& x, const Vector& y, const Matrix& rho) {
  check_shapes(x, y, rho);
  const Gram g = gram(x, rho);
  return g.n * y - g.q;
}

bool in_simplex(const Vector& y, double tol) {
  return y.size() > 0 && y.allFinite() && std::abs(y.sum() - 1.0) <= tol && y.minCoeff() >= -tol;
}

bool blocks_psd(const std::vector<Matrix>& blocks, double tol) {
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return false;
    if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, b.norm())) return false;
  }
  return true;
}

LagrangianTerms augmented_lagrangian(const PrimalDualPoint& pt, const SolverParams& params,
                                     const SplittingOperator& op, const Matrix& rho,
                                     IndicatorCheck check, double feas_tol) {
  LagrangianTerms t;
  const AuxStack ax = op.apply(pt.x);
  const AuxStack r = ax - pt.z;
  t.f = objective_f(pt.x, pt.y, rho);
  t.penalty = 0.5 * params.xi * squared_norm(pt.p - pt.z);
  t.linear = dot(pt.lambda, r);
  t.quadratic = 0.5 * params.eta * squared_norm(r);
  t.value = t.f + t.penalty + t.linear + t.quadratic;
  if (check == IndicatorCheck::Evaluate) {
    bool copies_ok = true;
    for (const auto& c : pt.p.copies) copies_ok = copies_ok && std::abs(c.trace() - 1.0) <= feas_tol;
    if (!in_simplex(pt.y, feas_tol)) {
      t.violated = "Y";
    } else if (!blocks_psd(pt.x.blocks, feas_tol)) {
      t.violated = "X";
    } else if (!copies_ok || !blocks_psd(pt.p.transformed, feas_tol)) {
      t.violated = "Z";
    }
    if (!t.violated.empty()) {
      t.feasible = false;
      t.value = std::numeric_limits<double>::infinity();
    }
  }
  return t;
}

HessianBlocks hessian_blocks(const ComponentStack& x, const Vector& y) {
  if (y.size() != x.size()) throw ShapeError("weight vector does not match component count");
  HessianBlocks h;
  const int m = x.size();
  h.n.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      h.n(i, j) = h.n(j, i) =
          x.blocks[static_cast<std::size_t>(i)].cwiseProduct(x.blocks[static_cast<std::size_t>(j)]).sum();
    }
  }
  // y y^T has the single nonzero eigenvalue ||y||^2; the Kronecker factor I
  // only repeats it.
  h.lambda_max_m = y.squaredNorm();
  return h;
}

}  // namespace bippt

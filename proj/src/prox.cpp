#include "bippt/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "bippt/errors.hpp"

namespace bippt {

Matrix project_psd(const Matrix& s) {
  if (s.rows() != s.cols()) throw ShapeError("project_psd: matrix is not square");
  Matrix sym = 0.5 * (s + s.transpose());
  // Positive definite: already projected, skip the eigensolver.
  if (Eigen::LLT<Matrix> llt(sym); llt.info() == Eigen::Success) return sym;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "PSD projection: eigendecomposition failed (side " << s.rows() << ", ||S||_F = "
       << s.norm() << ", finite = " << std::boolalpha << s.allFinite() << ")";
    throw NumericalError(os.str());
  }
  const Vector& w = es.eigenvalues();  // ascending
  const Matrix& u = es.eigenvectors();
  const Eigen::Index d = w.size();
  Eigen::Index neg = 0;
  while (neg < d && w(neg) < 0.0) ++neg;
  if (neg == 0) return sym;
  if (neg == d) return Matrix::Zero(d, d);
  // Rebuild from whichever side has fewer eigenpairs.
  if (neg <= d - neg) {
    const auto un = u.leftCols(neg);
    sym.noalias() -= un * w.head(neg).asDiagonal() * un.transpose();
    return 0.5 * (sym + sym.transpose());
  }
  const Eigen::Index pos = d - neg;
  const Matrix half = u.rightCols(pos) * w.tail(pos).cwiseSqrt().asDiagonal();
  return half * half.transpose();
}

Matrix project_trace_one(const Matrix& v) {
  if (v.rows() != v.cols() || v.rows() == 0) throw ShapeError("project_trace_one: bad shape");
  Matrix out = v;
  const double shift = (1.0 - v.trace()) / static_cast<double>(v.rows());
  out.diagonal().array() += shift;
  return out;
}

Vector project_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  if (m == 0) throw ShapeError("project_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cum += u[static_cast<std::size_t>(k)];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

AuxStack project_z_set(const AuxStack& v) {
  AuxStack out;
  out.transformed.reserve(v.transformed.size());
  out.copies.reserve(v.copies.size());
  for (const auto& b : v.transformed) out.transformed.push_back(project_psd(b));
  for (const auto& b : v.copies) out.copies.push_back(project_trace_one(b));
  return out;
}

double SimplexQP::objective(const Vector& y) const {
  return 0.5 * y.dot(n * y) - q.dot(y) + 0.5 * mu1 * (y - y_prev).squaredNorm();
}

namespace {

// Minimizer of 1/2 u^T H u - c^T u on {sum u = 1} restricted to `free`.
// Returns the multiplier nu of the sum constraint (H u - c + nu 1 = 0).
double solve_face(const Matrix& h, const Vector& c, const std::vector<int>& free, Vector& y) {
  const auto k = static_cast<Eigen::Index>(free.size());
  Matrix hf(k, k);
  Vector cf(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    cf(a) = c(free[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < k; ++b) {
      hf(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::LLT<Matrix> llt(hf);
  if (llt.info() != Eigen::Success) throw NumericalError("simplex QP: face Hessian not positive definite");
  const Vector hc = llt.solve(cf);
  const Vector h1 = llt.solve(Vector::Ones(k));
  const double nu = (hc.sum() - 1.0) / h1.sum();
  const Vector u = hc - nu * h1;
  y.setZero();
  for (Eigen::Index a = 0; a < k; ++a) y(free[static_cast<std::size_t>(a)]) = u(a);
  return nu;
}

}  // namespace

Vector solve_simplex_qp(const SimplexQP& qp, double tol) {
  const Eigen::Index m = qp.q.size();
  if (m == 0 || qp.n.rows() != m || qp.n.cols() != m || qp.y_prev.size() != m) {
    throw ShapeError("simplex QP: inconsistent sizes");
  }
  if (!(qp.mu1 > 0)) throw DomainError("simplex QP: mu1 must be > 0");
  if (m == 1) return Vector::Ones(1);

  const Matrix nsym = 0.5 * (qp.n + qp.n.transpose());
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(nsym, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, nsym.diagonal().cwiseAbs().maxCoeff());
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-8 * scale) {
      throw ModelError("simplex QP: Gram matrix is not positive semidefinite");
    }
  }
  const Matrix h = nsym + qp.mu1 * Matrix::Identity(m, m);
  const Vector c = qp.q + qp.mu1 * qp.y_prev;

  // Warm start at the projection of the previous iterate.
  Vector y = project_simplex(qp.y_prev);
  std::vector<bool> active(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = y(i) <= 0.0;
  if (std::all_of(active.begin(), active.end(), [](bool a) { return a; })) {
    active.assign(static_cast<std::size_t>(m), false);
    y.setConstant(1.0 / static_cast<double>(m));
  }

  Vector cand(m);
  const int max_steps = 50 * static_cast<int>(m) + 50;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<int> free;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!active[static_cast<std::size_t>(i)]) free.push_back(static_cast<int>(i));
    }
    const double nu = solve_face(h, c, free, cand);
    const Vector dir = cand - y;
    if (dir.cwiseAbs().maxCoeff() <= 1e-15) {
      y = cand;
      // Bound multipliers: pi = H y - c + nu 1 on the active set.
      const Vector grad = h * y - c;
      int leave = -1;
      double worst = -tol;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        const double pi = grad(i) + nu;
        if (pi < worst) {
          worst = pi;
          leave = static_cast<int>(i);
        }
      }
      if (leave < 0) break;
      active[static_cast<std::size_t>(leave)] = false;
      continue;
    }
    double alpha = 1.0;
    int block = -1;
    for (int i : free) {
      if (dir(i) < 0.0) {
        const double ratio = -y(i) / dir(i);
        if (ratio < alpha) {
          alpha = ratio;
          block = i;
        }
      }
    }
    if (block < 0) {
      y = cand;
    } else {
      y += alpha * dir;
      y(block) = 0.0;
      active[static_cast<std::size_t>(block)] = true;
    }
  }

  y = y.cwiseMax(0.0);
  const double s = y.sum();
  if (!(s > 0.0)) throw NumericalError("simplex QP: degenerate solution");
  return y / s;
}

ComponentStack x_update(const ComponentStack& x_prev, const Vector& y_new, const AuxStack& lambda,
                        const AuxStack& z, const SolverParams& params, const SplittingOperator& op,
                        const Matrix& rho) {
  const ComponentStack gf = grad_f_x(x_prev, y_new, rho);
  const int m = op.blocks();
  const int d = op.side();
  for (const AuxStack* v : {&lambda, &z}) {
    if (v->size() != m || static_cast<int>(v->copies.size()) != m) {
      throw ShapeError("x_update: aux stack does not match the operator");
    }
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (v->transformed[k].rows() != d || v->transformed[k].cols() != d || v->copies[k].rows() != d ||
          v->copies[k].cols() != d) {
        throw ShapeError("x_update: aux block has the wrong side");
      }
    }
  }
  if (x_prev.size() != m || x_prev.side() != d) throw ShapeError("x_update: stack does not match the operator");
  const double denom = 2.0 * params.eta + params.mu2;
  ComponentStack out;
  out.blocks.reserve(static_cast<std::size_t>(m));
  Matrix t(d, d);
  Matrix g(d, d);
  for (int i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    // A^T(eta z - lambda), one block at a time.
    t = params.eta * z.transformed[k] - lambda.transformed[k];
    op.transpose(i).apply_into(t, g);
    g += params.eta * z.copies[k] - lambda.copies[k] + params.mu2 * x_prev.blocks[k] - gf.blocks[k];
    g /= denom;
    out.blocks.push_back(project_psd(g));
  }
  return out;
}

AuxStack p_update(const AuxStack& p_prev, const AuxStack& z, const SolverParams& params) {
  if (p_prev.size() != z.size()) throw ShapeError("p_update: stack sizes differ");
  const double wz = params.xi / (params.xi + params.mu3);
  const double wp = params.mu3 / (params.xi + params.mu3);
  AuxStack out;
  out.transformed.reserve(z.transformed.size());
  out.copies.reserve(z.copies.size());
  for (std::size_t i = 0; i < z.transformed.size(); ++i) {
    out.transformed.push_back(project_psd(wz * z.transformed[i] + wp * p_prev.transformed[i]));
  }
  for (std::size_t i = 0; i < z.copies.size(); ++i) {
    out.copies.push_back(project_trace_one(wz * z.copies[i] + wp * p_prev.copies[i]));
  }
  return out;
}

AuxStack z_update(const AuxStack& ax_new, const AuxStack& p_new, const AuxStack& lambda,
                  const SolverParams& params) {
  const int m = ax_new.size();
  if (p_new.size() != m || lambda.size() != m || static_cast<int>(ax_new.copies.size()) != m ||
      static_cast<int>(p_new.copies.size()) != m || static_cast<int>(lambda.copies.size()) != m) {
    throw ShapeError("z_update: stack sizes differ");
  }
  const double inv = 1.0 / (params.eta + params.xi);
  const auto blend = [&](const std::vector<Matrix>& l, const std::vector<Matrix>& a,
                         const std::vector<Matrix>& p, std::vector<Matrix>& out) {
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (l[i].rows() != a[i].rows() || p[i].rows() != a[i].rows() || l[i].cols() != a[i].cols() ||
          p[i].cols() != a[i].cols()) {
        throw ShapeError("z_update: block shapes differ");
      }
      out.push_back(inv * (l[i] + params.eta * a[i] + params.xi * p[i]));
    }
  };
  AuxStack z;
  blend(lambda.transformed, ax_new.transformed, p_new.transformed, z.transformed);
  blend(lambda.copies, ax_new.copies, p_new.copies, z.copies);
  return z;
}

AuxStack z_update(const ComponentStack& x_new, const AuxStack& p_new, const AuxStack& lambda,
                  const SolverParams& params, const SplittingOperator& op) {
  return z_update(op.apply(x_new), p_new, lambda, params);
}

}  // namespace bippt

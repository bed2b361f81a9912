#include <algorithm>
#include <cmath>
#include <random>

#include "bippt/errors.hpp"
#include "bippt/prox.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bippt;

namespace {

// Eigenvalue clamp written out independently of the library.
Matrix clamp_oracle(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Vector w = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

// Simplex projection by bisection on the shift.
Vector simplex_oracle(const Vector& v) {
  double lo = v.minCoeff() - 1.0;
  double hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((v.array() - mid).max(0.0).sum() > 1.0 ? lo : hi) = mid;
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

SimplexQP random_qp(std::mt19937_64& rng, int m) {
  SimplexQP qp;
  qp.n = oracle::random_psd(rng, m, 1 + static_cast<int>(rng() % static_cast<unsigned>(m)));
  qp.q = oracle::random_matrix(rng, m, 1);
  qp.y_prev = oracle::random_simplex(rng, m);
  qp.mu1 = 0.1;
  return qp;
}

// Best objective over a simplex grid of step h, then a 1e-3 refinement
// around the coarse winner.
double grid_oracle(const SimplexQP& qp) {
  double best = std::numeric_limits<double>::infinity();
  Vector arg(3);
  const int n = 100;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      Vector y(3);
      y << i / double(n), j / double(n), (n - i - j) / double(n);
      const double v = qp.objective(y);
      if (v < best) {
        best = v;
        arg = y;
      }
    }
  }
  const int r = 20;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      Vector y(3);
      y << arg(0) + i * 1e-3, arg(1) + j * 1e-3, 0.0;
      y(2) = 1.0 - y(0) - y(1);
      if (y.minCoeff() < 0.0) continue;
      best = std::min(best, qp.objective(y));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("PSD projection") {
  SUBCASE("examples") {
    std::mt19937_64 rng(1);
    const Matrix p = oracle::random_psd(rng, 5);
    CHECK((project_psd(p) - p).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix low = oracle::random_psd(rng, 5, 2);
    CHECK((project_psd(low) - low).cwiseAbs().maxCoeff() <= 1e-12);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -2.0;
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 3.0;
    CHECK((project_psd(d) - want).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(project_psd(-Matrix::Identity(3, 3)) == Matrix::Zero(3, 3));
    CHECK_THROWS_AS(project_psd(Matrix::Zero(2, 3)), ShapeError);
  }
  SUBCASE("optimality certificate and candidate oracle") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
      const Matrix s = oracle::random_symmetric(rng, 5 + t % 3);
      const Matrix out = project_psd(s);
      const int d = static_cast<int>(s.rows());
      CHECK(oracle::min_eig(out) >= -1e-12);
      CHECK(oracle::min_eig(out - s) >= -1e-12);
      CHECK(std::abs(out.cwiseProduct(out - s).sum()) <= 1e-12 * std::max(1.0, s.squaredNorm()));
      CHECK((out - clamp_oracle(s)).cwiseAbs().maxCoeff() <= 1e-12);

      const double dist = (s - out).norm();
      for (int c = 0; c < 200; ++c) {
        Matrix cand;
        if (c % 2 == 0) {
          cand = oracle::random_psd(rng, d, 1 + c % d);
        } else {
          cand = out + 1e-3 * oracle::random_psd(rng, d, 1);
        }
        CHECK((s - cand).norm() >= dist);
      }
    }
  }
  SUBCASE("idempotent and nonexpansive") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
      const Matrix a = oracle::random_symmetric(rng, 6);
      const Matrix b = oracle::random_symmetric(rng, 6);
      const Matrix pa = project_psd(a);
      CHECK((project_psd(pa) - pa).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((pa - project_psd(b)).norm() <= (a - b).norm() + 1e-12);
    }
  }
  SUBCASE("unsymmetric drift is symmetrized") {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = 1e-14;
    const Matrix out = project_psd(a);
    CHECK(out(0, 1) == out(1, 0));
  }
}

TEST_CASE("unit trace projection") {
  std::mt19937_64 rng(4);
  const Matrix s = oracle::random_state(rng, 4);
  CHECK((project_trace_one(s) - s).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((project_trace_one(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3) / 3.0).norm() <= 1e-15);
  Matrix v = Matrix::Identity(2, 2) * 2.0;
  CHECK((project_trace_one(v) - Matrix::Identity(2, 2) * 0.5).norm() <= 1e-15);
  CHECK_THROWS_AS(project_trace_one(Matrix::Zero(2, 3)), ShapeError);

  for (int t = 0; t < 50; ++t) {
    const Matrix m = oracle::random_symmetric(rng, 5);
    const Matrix out = project_trace_one(m);
    CHECK(std::abs(out.trace() - 1.0) <= 1e-13);
    // Stationarity: out - m is a multiple of the identity.
    const Matrix diff = out - m;
    const double shift = diff(0, 0);
    CHECK((diff - shift * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i != j) CHECK(out(i, j) == m(i, j));
      }
    }
    CHECK((project_trace_one(out) - out).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("simplex projection") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vector v = 2.0 * oracle::random_matrix(rng, 1 + t % 6, 1);
    const Vector p = project_simplex(v);
    CHECK(in_simplex(p, 1e-12));
    CHECK((p - simplex_oracle(v)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK(project_simplex(Vector::Constant(3, 1.0 / 3.0)).isApprox(Vector::Constant(3, 1.0 / 3.0)));
}

TEST_CASE("simplex QP") {
  SUBCASE("interior optimum is returned") {
    SimplexQP qp;
    qp.n = Matrix::Identity(3, 3);
    qp.y_prev = Vector::Constant(3, 1.0 / 3.0);
    qp.q = Vector::Constant(3, 1.0 / 3.0);
    qp.mu1 = 0.1;
    CHECK((solve_simplex_qp(qp) - qp.y_prev).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("single component") {
    SimplexQP qp{Matrix::Identity(1, 1), Vector::Ones(1), Vector::Ones(1), 0.1};
    CHECK(solve_simplex_qp(qp)(0) == 1.0);
  }
  SUBCASE("grid oracle, KKT and vertices") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
      const SimplexQP qp = random_qp(rng, 3);
      const Vector y = solve_simplex_qp(qp);
      CHECK(std::abs(y.sum() - 1.0) <= 1e-12);
      CHECK(y.minCoeff() >= 0.0);
      CHECK(qp.objective(y) <= grid_oracle(qp) + 1e-8);
      for (int i = 0; i < 3; ++i) CHECK(qp.objective(y) <= qp.objective(Vector::Unit(3, i)) + 1e-12);

      // KKT: g + nu 1 >= 0 with equality on the support.
      const Vector g = (qp.n + qp.mu1 * Matrix::Identity(3, 3)) * y - qp.q - qp.mu1 * qp.y_prev;
      double nu = 0.0;
      int support = 0;
      for (int i = 0; i < 3; ++i) {
        if (y(i) > 1e-12) {
          nu += -g(i);
          ++support;
        }
      }
      nu /= support;
      for (int i = 0; i < 3; ++i) {
        CHECK(g(i) + nu >= -1e-10);
        CHECK(std::abs(y(i) * (g(i) + nu)) <= 1e-10);
      }
    }
  }
  SUBCASE("larger instances against projected gradient") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
      const SimplexQP qp = random_qp(rng, 7);
      const Vector y = solve_simplex_qp(qp);
      const Matrix h = qp.n + qp.mu1 * Matrix::Identity(7, 7);
      Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
      const double step = 1.0 / es.eigenvalues().maxCoeff();
      Vector u = Vector::Constant(7, 1.0 / 7.0);
      for (int it = 0; it < 20000; ++it) {
        u = simplex_oracle(u - step * (h * u - qp.q - qp.mu1 * qp.y_prev));
      }
      CHECK(qp.objective(y) <= qp.objective(u) + 1e-10);
    }
  }
  SUBCASE("errors") {
    SimplexQP qp{-Matrix::Identity(3, 3), Vector::Zero(3), Vector::Constant(3, 1.0 / 3.0), 0.1};
    CHECK_THROWS_AS(solve_simplex_qp(qp), ModelError);
    qp.n = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(solve_simplex_qp(qp), ShapeError);
    qp.n = Matrix::Identity(3, 3);
    qp.mu1 = 0.0;
    CHECK_THROWS_AS(solve_simplex_qp(qp), DomainError);
  }
}

TEST_CASE("x update") {
  SubsystemDims dims({2, 2, 2});
  const auto parts = enumerate_bipartitions(3);
  SplittingOperator op(dims, parts);
  std::mt19937_64 rng(8);

  SUBCASE("fixed point without forcing terms") {
    ComponentStack x;
    for (int i = 0; i < 3; ++i) x.blocks.push_back(oracle::random_state(rng, 8));
    SolverParams params = SolverParams::defaults_for(10.0);
    params.mu2 = 0.0;
    // rho equal to the weighted sum makes the f gradient vanish.
    const Vector y = oracle::random_simplex(rng, 3);
    Matrix rho = Matrix::Zero(8, 8);
    for (int i = 0; i < 3; ++i) rho += y(i) * x.blocks[static_cast<std::size_t>(i)];
    const auto out = x_update(x, y, AuxStack::zeros(3, 8), op.apply(x), params, op, rho);
    CHECK(norm(out - x) <= 1e-12);
  }

  SUBCASE("matches a projected-gradient oracle on the subproblem") {
    const Matrix a = oracle::materialized_a({2, 2, 2}, oracle::lefts(parts));
    for (int t = 0; t < 3; ++t) {
      SolverParams params = SolverParams::defaults_for(5.0);
      ComponentStack xk;
      for (int i = 0; i < 3; ++i) xk.blocks.push_back(oracle::random_state(rng, 8));
      const Vector y = oracle::random_simplex(rng, 3);
      const Matrix rho = oracle::random_state(rng, 8);
      const AuxStack lambda = 0.1 * oracle::random_aux(rng, 3, 8);
      const AuxStack z = op.apply(xk) + 0.05 * oracle::random_aux(rng, 3, 8);
      const ComponentStack gf = grad_f_x(xk, y, rho);

      const Vector gvec = vec(gf);
      const Vector lvec = vec(lambda);
      const Vector zvec = vec(z);
      const Vector xkvec = vec(xk);
      auto phi = [&](const Vector& u) {
        const Vector r = a * u - zvec;
        return gvec.dot(u - xkvec) + lvec.dot(r) + 0.5 * params.eta * r.squaredNorm() +
               0.5 * params.mu2 * (u - xkvec).squaredNorm();
      };
      auto project = [](const Vector& u) {
        const auto s = component_stack_from_vec(u, 3, 8);
        ComponentStack out;
        for (const auto& b : s.blocks) out.blocks.push_back(clamp_oracle(b));
        return vec(out);
      };
      const double lip = 2.0 * params.eta + params.mu2;
      Vector u = xkvec;
      for (int it = 0; it < 2000; ++it) {
        const Vector grad = gvec + a.transpose() * (lvec + params.eta * (a * u - zvec)) +
                            params.mu2 * (u - xkvec);
        u = project(u - (0.5 / lip) * grad);
      }
      const auto out = x_update(xk, y, lambda, z, params, op, rho);
      CHECK(phi(vec(out)) <= phi(u) + 1e-6);
      CHECK(std::abs(phi(vec(out)) - phi(u)) <= 1e-6);
      for (const auto& b : out.blocks) CHECK(oracle::min_eig(b) >= -1e-12);
    }
  }
}

TEST_CASE("x update on a hand-assembled toy") {
  // x = 0, z = 0, lambda = 0, mu2 = 0 and 2 eta = 1 leave g = y (rho - 0) = rho.
  SubsystemDims dims({2, 2});
  SplittingOperator op(dims, enumerate_bipartitions(2));
  SolverParams params;
  params.xi = 1.0;
  params.eta = 0.5;
  params.mu2 = 0.0;
  params.mu3 = 1.0;
  ComponentStack x;
  x.blocks = {Matrix::Zero(4, 4)};
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 1.0;
  rho(1, 1) = -1.0;
  const auto out = x_update(x, Vector::Ones(1), AuxStack::zeros(1, 4), AuxStack::zeros(1, 4), params, op, rho);
  Matrix want = Matrix::Zero(4, 4);
  want(0, 0) = 1.0;
  CHECK((out.blocks[0] - want).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("p update") {
  std::mt19937_64 rng(9);
  SolverParams params = SolverParams::defaults_for(10.0);

  SUBCASE("fixed point in Z") {
    const AuxStack z = project_z_set(oracle::random_aux(rng, 3, 4));
    const auto out = p_update(z, z, params);
    CHECK(norm(out - z) <= 1e-12);
  }
  SUBCASE("dominant proximal weight") {
    const AuxStack z = oracle::random_aux(rng, 3, 4);
    const AuxStack prev = oracle::random_aux(rng, 3, 4);
    SolverParams heavy = params;
    heavy.mu3 = 1e9 * heavy.xi;
    const auto out = p_update(prev, z, heavy);
    CHECK(norm(out - project_z_set(prev)) <= 1e-6);
  }
  SUBCASE("candidate oracle") {
    for (int t = 0; t < 10; ++t) {
      AuxStack z = oracle::random_aux(rng, 2, 4);
      AuxStack prev = oracle::random_aux(rng, 2, 4);
      for (auto* s : {&z, &prev}) {
        for (auto& b : s->transformed) b = 0.5 * (b + b.transpose()).eval();
        for (auto& b : s->copies) b = 0.5 * (b + b.transpose()).eval();
      }
      auto obj = [&](const AuxStack& p) {
        return 0.5 * params.xi * squared_norm(p - z) + 0.5 * params.mu3 * squared_norm(p - prev);
      };
      const auto out = p_update(prev, z, params);
      for (const auto& b : out.transformed) CHECK(oracle::min_eig(b) >= -1e-12);
      for (const auto& b : out.copies) CHECK(std::abs(b.trace() - 1.0) <= 1e-13);
      const double best = obj(out);
      for (int c = 0; c < 1000; ++c) {
        AuxStack cand = out;
        for (auto& b : cand.transformed) {
          b = (c % 2 == 0) ? oracle::random_psd(rng, 4) : (b + 1e-3 * oracle::random_psd(rng, 4, 1)).eval();
        }
        for (auto& b : cand.copies) {
          Matrix e = oracle::random_symmetric(rng, 4);
          e.diagonal().array() -= e.trace() / 4.0;  // trace-free step keeps unit trace
          b += (c % 2 == 0 ? 1.0 : 1e-3) * e;
        }
        CHECK(obj(cand) >= best);
      }
    }
  }
  CHECK_THROWS_AS(p_update(AuxStack::zeros(2, 3), AuxStack::zeros(3, 3), params), ShapeError);
}

TEST_CASE("z update") {
  std::mt19937_64 rng(10);
  SubsystemDims dims({2, 2, 2});
  SplittingOperator op(dims, enumerate_bipartitions(3));
  SolverParams params = SolverParams::defaults_for(10.0);
  const auto x = oracle::random_stack(rng, 3, 8);
  const AuxStack ax = op.apply(x);

  CHECK(norm(z_update(x, ax, AuxStack::zeros(3, 8), params, op) - ax) <= 1e-12);

  SolverParams even = params;
  even.eta = even.xi;
  const AuxStack p = oracle::random_aux(rng, 3, 8);
  CHECK(norm(z_update(ax, p, AuxStack::zeros(3, 8), even) - 0.5 * (ax + p)) <= 1e-12);

  const AuxStack lambda = oracle::random_aux(rng, 3, 8);
  const AuxStack z = z_update(ax, p, lambda, params);
  const AuxStack grad = (params.eta + params.xi) * z - lambda - params.eta * ax - params.xi * p;
  CHECK(norm(grad) <= 1e-10);
}

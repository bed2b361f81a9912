#include "bippt/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "bippt/errors.hpp"
#include "bippt/prox.hpp"

namespace bippt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_norm(const PrimalDualPoint& pt) {
  return std::max({pt.y.norm(), norm(pt.x), norm(pt.p), norm(pt.z), norm(pt.lambda)});
}

bool keep_record(long iter, const TraceOptions& t) {
  return iter <= t.dense_until || (t.stride > 0 && iter % t.stride == 0);
}

}  // namespace

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Tolerance: return "tol";
    case Termination::MaxIter: return "max_iter";
    case Termination::Stagnation: return "stagnation";
  }
  return "max_iter";
}

Lpadmm::Lpadmm(ModelProblem problem, SolverParams params)
    : problem_(std::move(problem)),
      params_(params),
      op_(problem_.rho.dims(), problem_.parts),
      check_(validate_params(params_)) {
  problem_.xi = params_.xi;
}

PrimalDualPoint Lpadmm::init_point(std::uint64_t seed) const {
  const int m = op_.blocks();
  const int d = op_.side();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PrimalDualPoint pt;
  pt.y = Vector::Constant(m, 1.0 / static_cast<double>(m));
  pt.x.blocks.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Matrix g(d, d);
    for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = gauss(rng);
    Matrix w = g * g.transpose();
    w = (0.5 * (w + w.transpose())).eval();
    pt.x.blocks.push_back(w / w.trace());
  }
  pt.p = project_z_set(op_.apply(pt.x));
  pt.z = pt.p;
  pt.lambda = AuxStack::zeros(m, d);
  return pt;
}

namespace {

// Calls fn(a_i, b_i, c_i) on matching blocks of both halves.
template <typename Fn>
void zip_blocks(const AuxStack& a, const AuxStack& b, const AuxStack& c, Fn fn) {
  for (std::size_t i = 0; i < a.transformed.size(); ++i) fn(a.transformed[i], b.transformed[i], c.transformed[i]);
  for (std::size_t i = 0; i < a.copies.size(); ++i) fn(a.copies[i], b.copies[i], c.copies[i]);
}

LagrangianTerms terms_with_ax(const PrimalDualPoint& pt, const AuxStack& ax,
                              const SolverParams& params, const Matrix& rho) {
  LagrangianTerms t;
  t.f = objective_f(pt.x, pt.y, rho);
  t.penalty = 0.5 * params.xi * squared_distance(pt.p, pt.z);
  double lin = 0.0, quad = 0.0;
  zip_blocks(ax, pt.z, pt.lambda, [&](const Matrix& a, const Matrix& z, const Matrix& l) {
    lin += l.cwiseProduct(a - z).sum();
    quad += (a - z).squaredNorm();
  });
  t.linear = lin;
  t.quadratic = 0.5 * params.eta * quad;
  t.value = t.f + t.penalty + t.linear + t.quadratic;
  return t;
}

// ||lambda - xi (z - p)|| / (1 + ||lambda||).
double dual_identity_error(const PrimalDualPoint& pt, double xi) {
  double err = 0.0;
  zip_blocks(pt.lambda, pt.z, pt.p, [&](const Matrix& l, const Matrix& z, const Matrix& p) {
    err += (l - xi * (z - p)).squaredNorm();
  });
  return std::sqrt(err) / (1.0 + norm(pt.lambda));
}

}  // namespace

LagrangianTerms Lpadmm::lagrangian(const PrimalDualPoint& pt, IndicatorCheck check) const {
  return augmented_lagrangian(pt, params_, op_, problem_.rho.data(), check);
}

Residuals Lpadmm::stationarity_residuals(const PrimalDualPoint& pt) const {
  const Matrix& rho = problem_.rho.data();
  Residuals r{};
  const Vector gy = grad_f_y(pt.x, pt.y, rho);
  r[0] = (pt.y - project_simplex(pt.y - gy)).norm();

  const ComponentStack gx = grad_f_x(pt.x, pt.y, rho);
  const ComponentStack atl = op_.adjoint(pt.lambda);
  double s2 = 0.0;
  for (std::size_t i = 0; i < pt.x.blocks.size(); ++i) {
    const Matrix& xi = pt.x.blocks[i];
    s2 += (xi - project_psd(xi - gx.blocks[i] - atl.blocks[i])).squaredNorm();
  }
  r[1] = std::sqrt(s2);

  const AuxStack moved = pt.p - params_.xi * (pt.p - pt.z);
  r[2] = norm(pt.p - project_z_set(moved));
  r[3] = norm(params_.xi * (pt.z - pt.p) - pt.lambda);
  r[4] = norm(op_.apply(pt.x) - pt.z);
  return r;
}

Lpadmm::StepOutput Lpadmm::step(const PrimalDualPoint& pt, long iter, bool with_residuals) const {
  const Matrix& rho = problem_.rho.data();
  StepOutput out;
  PrimalDualPoint& nx = out.point;
  try {
    const Gram g = gram(pt.x, rho);
    nx.y = solve_simplex_qp(SimplexQP{g.n, g.q, pt.y, params_.mu1});
    nx.x = x_update(pt.x, nx.y, pt.lambda, pt.z, params_, op_, rho);
    nx.p = p_update(pt.p, pt.z, params_);
    const AuxStack ax = op_.apply(nx.x);
    nx.z = z_update(ax, nx.p, pt.lambda, params_);
    nx.lambda = pt.lambda;
    double r2 = 0.0;
    const auto ascend = [&](std::vector<Matrix>& l, const std::vector<Matrix>& a,
                            const std::vector<Matrix>& z) {
      for (std::size_t i = 0; i < l.size(); ++i) {
        l[i] += params_.eta * (a[i] - z[i]);
        r2 += (a[i] - z[i]).squaredNorm();
      }
    };
    ascend(nx.lambda.transformed, ax.transformed, nx.z.transformed);
    ascend(nx.lambda.copies, ax.copies, nx.z.copies);

    IterationRecord& rec = out.record;
    rec.iter = iter;
    const LagrangianTerms t = terms_with_ax(nx, ax, params_, rho);
    rec.f = t.f;
    rec.aug_lagrangian = t.value;
    rec.primal_residual = std::sqrt(r2);
    rec.violation_pz = squared_distance(nx.p, nx.z);
    const double dz = squared_distance(nx.z, pt.z);
    rec.delta_w = (nx.y - pt.y).squaredNorm() + squared_distance(nx.x, pt.x) +
                  squared_distance(nx.p, pt.p) + dz;
    out.dual_residual = params_.eta * std::sqrt(dz);
    if (!std::isfinite(rec.aug_lagrangian) || !std::isfinite(rec.delta_w)) {
      throw NumericalError("iterate is no longer finite");
    }
    if (with_residuals) {
      rec.residuals = stationarity_residuals(nx);
    } else {
      rec.residuals.fill(kNaN);
    }
  } catch (const std::exception& e) {
    throw NumericalError("iteration " + std::to_string(iter) + ": " + e.what());
  }
  return out;
}

SolveResult Lpadmm::solve(const PrimalDualPoint& init, const SolverOptions& opts) const {
  if (check_.mode == ParamMode::Invalid && !opts.allow_invalid_params) {
    throw DomainError("invalid solver parameters: " + check_.reason);
  }
  const Matrix& rho = problem_.rho.data();
  SolveResult res;
  res.params_check = check_;
  RunMonitor& mon = res.monitor;
  mon.nu = check_.nu;

  PrimalDualPoint pt = init;
  {
    IterationRecord r0;
    r0.iter = 0;
    const AuxStack ax = op_.apply(pt.x);
    const LagrangianTerms t = terms_with_ax(pt, ax, params_, rho);
    r0.f = t.f;
    r0.aug_lagrangian = t.value;
    r0.primal_residual = norm(ax - pt.z);
    r0.violation_pz = squared_norm(pt.p - pt.z);
    r0.delta_w = 0.0;
    if (opts.trace.residuals) {
      r0.residuals = stationarity_residuals(pt);
    } else {
      r0.residuals.fill(kNaN);
    }
    res.trace.push_back(r0);
    mon.initial_aug_lagrangian = t.value;
    mon.min_aug_lagrangian = t.value;
    mon.max_iterate_norm = max_norm(pt);
  }

  double prev_l = mon.initial_aug_lagrangian;
  double min_delta = std::numeric_limits<double>::infinity();
  long stagnant = 0;
  long k = 0;
  double dual_res = kNaN;
  res.termination = Termination::MaxIter;
  while (k < params_.max_iter) {
    ++k;
    const bool record = keep_record(k, opts.trace);
    StepOutput out = step(pt, k, record && opts.trace.residuals);
    const IterationRecord& rec = out.record;
    dual_res = out.dual_residual;

    const double excess = rec.aug_lagrangian - prev_l + mon.nu * rec.delta_w;
    mon.max_descent_excess = std::max(mon.max_descent_excess, excess);
    if (excess > 1e-8 * (1.0 + std::abs(prev_l))) {
      if (mon.descent_violations++ == 0) mon.first_descent_violation = k;
    }
    const double dual_id = dual_identity_error(out.point, params_.xi);
    mon.max_dual_identity_error = std::max(mon.max_dual_identity_error, dual_id);
    mon.min_aug_lagrangian = std::min(mon.min_aug_lagrangian, rec.aug_lagrangian);
    min_delta = std::min(min_delta, rec.delta_w);
    if (mon.nu > 0.0 &&
        min_delta > (mon.initial_aug_lagrangian - rec.aug_lagrangian) / (mon.nu * k) + 1e-12) {
      ++mon.certificate_violations;
    }
    mon.max_iterate_norm = std::max(mon.max_iterate_norm, max_norm(out.point));
    prev_l = rec.aug_lagrangian;

    pt = std::move(out.point);
    if (record) res.trace.push_back(rec);

    if (std::max(dual_res, rec.primal_residual) <= params_.tol) {
      res.termination = Termination::Tolerance;
      break;
    }
    stagnant = rec.delta_w < opts.stagnation_delta ? stagnant + 1 : 0;
    if (opts.stagnation_window > 0 && stagnant >= opts.stagnation_window) {
      res.termination = Termination::Stagnation;
      break;
    }
  }
  if (res.trace.back().iter != k) {
    // Always close the trace with the final iterate.
    IterationRecord last;
    last.iter = k;
    const AuxStack ax = op_.apply(pt.x);
    const LagrangianTerms t = terms_with_ax(pt, ax, params_, rho);
    last.f = t.f;
    last.aug_lagrangian = t.value;
    last.primal_residual = norm(ax - pt.z);
    last.violation_pz = squared_norm(pt.p - pt.z);
    last.delta_w = kNaN;
    if (opts.trace.residuals) {
      last.residuals = stationarity_residuals(pt);
    } else {
      last.residuals.fill(kNaN);
    }
    res.trace.push_back(last);
  }

  res.iterations = k;
  res.dual_residual = dual_res;
  res.f = objective_f(pt.x, pt.y, rho);
  res.violation_pz = squared_norm(pt.p - pt.z);
  res.primal_residual = norm(op_.apply(pt.x) - pt.z);
  res.stationarity = stationarity_residuals(pt);

  res.polished_y = pt.y.cwiseMax(0.0);
  res.polished_y /= res.polished_y.sum();
  res.polished_x.blocks.reserve(pt.x.blocks.size());
  for (const auto& b : pt.x.blocks) res.polished_x.blocks.push_back(project_psd(b));
  res.feasible_f = objective_f(res.polished_x, res.polished_y, rho);
  res.point = std::move(pt);
  return res;
}

PrimalDualPoint init_point(const ModelProblem& problem, const SolverParams& params,
                           std::uint64_t seed) {
  return Lpadmm(problem, params).init_point(seed);
}

Lpadmm::StepOutput step(const PrimalDualPoint& pt, const SolverParams& params,
                        const ModelProblem& problem) {
  return Lpadmm(problem, params).step(pt);
}

Residuals stationarity_residuals(const PrimalDualPoint& pt, const SolverParams& params,
                                 const ModelProblem& problem) {
  return Lpadmm(problem, params).stationarity_residuals(pt);
}

SolveResult solve(const ModelProblem& problem, const SolverParams& params,
                  const PrimalDualPoint& init, const SolverOptions& opts) {
  return Lpadmm(problem, params).solve(init, opts);
}

TrialsResult run_trials(const ModelProblem& problem, const SolverParams& params, int n_trials,
                        std::uint64_t base_seed, int threads, const SolverOptions& opts,
                        const std::function<std::optional<PrimalDualPoint>(std::uint64_t)>&
                            init_override) {
  if (n_trials < 1) throw DomainError("run_trials: need at least one trial");
  const Lpadmm solver(problem, params);
  TrialsResult out;
  out.per_trial.resize(static_cast<std::size_t>(n_trials));

  std::mutex mu;
  bool have_best = false;
  std::atomic<int> next{0};
  std::exception_ptr failure;

  const auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= n_trials) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(t);
      try {
        std::optional<PrimalDualPoint> init;
        if (init_override) init = init_override(seed);
        SolveResult r = solver.solve(init ? *init : solver.init_point(seed), opts);
        r.seed = seed;
        TrialSummary s{seed, r.f, r.feasible_f, r.violation_pz, r.iterations, r.termination};
        std::lock_guard<std::mutex> lock(mu);
        out.per_trial[static_cast<std::size_t>(t)] = s;
        const bool better =
            !have_best || r.f < out.best.f || (r.f == out.best.f && seed < out.best.seed);
        if (better) {
          out.best = std::move(r);
          out.best_index = t;
          have_best = true;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::clamp(threads, 1, n_trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

DescentReport descent_certificate(const std::vector<IterationRecord>& trace,
                                  const SolverParams& params) {
  DescentReport rep;
  const ParamCheck chk = validate_params(params);
  rep.nu = chk.nu;
  rep.applicable = chk.mode == ParamMode::Strict && !trace.empty() && trace.front().iter == 0;
  if (!rep.applicable) return rep;
  const double l0 = trace.front().aug_lagrangian;
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const IterationRecord& prev = trace[i - 1];
    const IterationRecord& cur = trace[i];
    if (std::isnan(cur.delta_w)) continue;
    if (cur.iter == prev.iter + 1) {
      ++rep.checked;
      const double lhs = cur.aug_lagrangian - prev.aug_lagrangian;
      if (lhs > -rep.nu * cur.delta_w + 1e-8 * (1.0 + std::abs(prev.aug_lagrangian))) {
        if (rep.descent_violations++ == 0) rep.first_descent_violation = cur.iter;
      }
    }
    min_delta = std::min(min_delta, cur.delta_w);
    const double bound =
        (l0 - cur.aug_lagrangian) / (rep.nu * static_cast<double>(cur.iter)) + 1e-12;
    if (min_delta > bound) {
      if (rep.bound_violations++ == 0) rep.first_bound_violation = cur.iter;
    }
  }
  return rep;
}

long complexity_bound_violations(const std::vector<IterationRecord>& trace, double nu) {
  if (trace.empty() || trace.front().iter != 0 || !(nu > 0.0)) return -1;
  const double l0 = trace.front().aug_lagrangian;
  double min_delta = std::numeric_limits<double>::infinity();
  long bad = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (std::isnan(trace[i].delta_w)) continue;
    min_delta = std::min(min_delta, trace[i].delta_w);
    if (min_delta > l0 / (nu * static_cast<double>(trace[i].iter))) ++bad;
  }
  return bad;
}

}  // namespace bippt

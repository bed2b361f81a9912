#pragma once

// Linearized proximal ADMM on the penalized bi-PPT splitting model.
//
// One iteration, in order:
//   y <- simplex QP on f(x, .) + mu1/2 ||y - y_k||^2
//   x <- PSD projection of the linearized x subproblem
//   p <- projection onto Z of (xi z + mu3 p) / (xi + mu3)
//   z <- (lambda + eta A x + xi p) / (eta + xi)
//   lambda <- lambda + eta (A x - z)
//
// After the z step the multiplier satisfies lambda = xi (z - p) exactly.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bippt/objective.hpp"
#include "bippt/params.hpp"
#include "bippt/splitting.hpp"

namespace bippt {

using Residuals = std::array<double, 5>;

struct IterationRecord {
  long iter = 0;
  double f = 0.0;
  double aug_lagrangian = 0.0;
  double primal_residual = 0.0;  // ||A x - z||
  double violation_pz = 0.0;     // ||p - z||^2
  double delta_w = 0.0;          // ||w_k - w_{k-1}||^2, w = (y, x, p, z)
  Residuals residuals{};         // NaN when not computed for this record
};

enum class Termination { Tolerance, MaxIter, Stagnation };
std::string termination_name(Termination t);

struct TraceOptions {
  long dense_until = 1000;  // record every iteration up to here
  long stride = 100;        // then every stride-th iteration
  bool residuals = true;    // fill stationarity residuals on recorded rows
};

struct SolverOptions {
  TraceOptions trace;
  long stagnation_window = 100;
  double stagnation_delta = 1e-30;
  // Permit running with parameters outside the convergent region (diagnostics).
  bool allow_invalid_params = false;
};

// Cheap scalar checks evaluated at every iteration, independent of thinning.
struct RunMonitor {
  double nu = 0.0;
  long descent_violations = 0;
  long first_descent_violation = -1;
  double max_descent_excess = -std::numeric_limits<double>::infinity();
  double max_dual_identity_error = 0.0;  // ||lambda - xi (z - p)|| / (1 + ||lambda||)
  double min_aug_lagrangian = std::numeric_limits<double>::infinity();
  double initial_aug_lagrangian = 0.0;
  long certificate_violations = 0;  // min_k Delta_k > (L_0 - L_N) / (nu N)
  double max_iterate_norm = 0.0;
};

struct SolveResult {
  PrimalDualPoint point;       // last iterate
  Vector polished_y;           // y clipped to the simplex
  ComponentStack polished_x;   // x blocks re-projected onto the PSD cone
  double f = 0.0;              // f at the last iterate
  double feasible_f = 0.0;     // f at the polished point
  double violation_pz = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;  // eta ||z_k - z_{k-1}||
  long iterations = 0;
  Termination termination = Termination::MaxIter;
  Residuals stationarity{};
  ParamCheck params_check;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> trace;
  RunMonitor monitor;
};

// Holds the operator and target for one problem; cheap to copy.
class Lpadmm {
 public:
  Lpadmm(ModelProblem problem, SolverParams params);

  const ModelProblem& problem() const { return problem_; }
  const SolverParams& params() const { return params_; }
  const SplittingOperator& op() const { return op_; }

  // x_i = G G^T / tr(G G^T) with standard normal G; y uniform;
  // p = z = projection of A x onto Z; lambda = 0.
  PrimalDualPoint init_point(std::uint64_t seed) const;

  struct StepOutput {
    PrimalDualPoint point;
    IterationRecord record;
    double dual_residual = 0.0;
  };
  // Throws NumericalError tagged with `iter` when a subproblem fails.
  StepOutput step(const PrimalDualPoint& pt, long iter = 0, bool with_residuals = true) const;

  Residuals stationarity_residuals(const PrimalDualPoint& pt) const;
  LagrangianTerms lagrangian(const PrimalDualPoint& pt,
                             IndicatorCheck check = IndicatorCheck::Evaluate) const;

  SolveResult solve(const PrimalDualPoint& init, const SolverOptions& opts = {}) const;

 private:
  ModelProblem problem_;
  SolverParams params_;
  SplittingOperator op_;
  ParamCheck check_;
};

PrimalDualPoint init_point(const ModelProblem& problem, const SolverParams& params,
                           std::uint64_t seed);
Lpadmm::StepOutput step(const PrimalDualPoint& pt, const SolverParams& params,
                        const ModelProblem& problem);
Residuals stationarity_residuals(const PrimalDualPoint& pt, const SolverParams& params,
                                 const ModelProblem& problem);
SolveResult solve(const ModelProblem& problem, const SolverParams& params,
                  const PrimalDualPoint& init, const SolverOptions& opts = {});

struct TrialSummary {
  std::uint64_t seed = 0;
  double f = 0.0;
  double feasible_f = 0.0;
  double violation_pz = 0.0;
  long iterations = 0;
  Termination termination = Termination::MaxIter;
};

struct TrialsResult {
  SolveResult best;
  std::vector<TrialSummary> per_trial;  // in seed order
  int best_index = 0;
};

// Seeds base_seed .. base_seed + n_trials - 1, at most `threads` at a time.
// Best = minimum final f, ties broken by lower seed. `init_override`, when
// given, replaces the random initial point for a seed.
TrialsResult run_trials(const ModelProblem& problem, const SolverParams& params, int n_trials,
                        std::uint64_t base_seed, int threads = 1, const SolverOptions& opts = {},
                        const std::function<std::optional<PrimalDualPoint>(std::uint64_t)>&
                            init_override = {});

struct DescentReport {
  bool applicable = false;  // strict-mode parameters only
  double nu = 0.0;
  long checked = 0;
  long descent_violations = 0;
  long first_descent_violation = -1;  // iteration index
  long bound_violations = 0;
  long first_bound_violation = -1;
  bool ok() const { return applicable && descent_violations == 0 && bound_violations == 0; }
};

// Per consecutive pair of records (k, k+1):
//   L_{k+1} - L_k <= -nu Delta_{k+1} + 1e-8 (1 + |L_k|),
// and for every record N >= 1:
//   min_{1<=k<=N} Delta_k <= (L_0 - L_N) / (nu N) + 1e-12,
// where L_0 comes from the iteration-0 record. Consecutive means iter
// indices differ by one; thinned stretches are skipped for the first check.
DescentReport descent_certificate(const std::vector<IterationRecord>& trace,
                                  const SolverParams& params);

// Complexity bound with a zero lower bound on L: min_{k<=N} Delta_k <= L_0 / (nu N).
long complexity_bound_violations(const std::vector<IterationRecord>& trace, double nu);

}  // namespace bippt

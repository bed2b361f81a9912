#include "bippt/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>


#include "bippt/errors.hpp"
#include "bippt/matrix_io.hpp"

namespace bippt {

ModeRequest parse_mode(const std::string& s) {
  if (s == "strict") return ModeRequest::Strict;
  if (s == "tightened") return ModeRequest::Tightened;
  throw ConfigError("--mode must be strict or tightened, got '" + s + "'");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& s, Parse parse, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const T v = parse(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " list entry '" + item + "' in '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  return parse_list<int>(s, [](const std::string& x, std::size_t* n) { return std::stoi(x, n); }, "integer");
}

std::vector<double> parse_double_list(const std::string& s) {
  return parse_list<double>(s, [](const std::string& x, std::size_t* n) { return std::stod(x, n); }, "number");
}

int threads_from_env() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("BIPPT_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) throw ConfigError("BIPPT_THREADS must be a positive integer");
    n = std::min<long>(n, cap);
  }
  return n;
}

DensityMatrix build_state(const RunConfig& cfg) {
  try {
    if (!cfg.state_path.empty()) {
      DensityMatrix rho = read_matrix_file(cfg.state_path);
      if (cfg.dims && !(*cfg.dims == rho.dims())) {
        throw ConfigError("--dims (" + cfg.dims->to_string() + ") disagree with the file's dims (" +
                          rho.dims().to_string() + ")");
      }
      return rho;
    }
    const SubsystemDims dims = cfg.dims ? *cfg.dims : default_dims(cfg.kind);
    return make_state(cfg.kind, dims, cfg.noise, cfg.coeffs);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

SolverParams resolve_params(const RunConfig& cfg, double xi) {
  SolverParams p = SolverParams::defaults_for(xi);
  if (cfg.mode == ModeRequest::Tightened) p.mu2 = 0.0;
  if (cfg.eta) p.eta = *cfg.eta;
  if (cfg.mu1) p.mu1 = *cfg.mu1;
  if (cfg.mu2) p.mu2 = *cfg.mu2;
  if (cfg.mu3) p.mu3 = *cfg.mu3;
  p.tol = cfg.tol;
  p.max_iter = cfg.max_iter;
  p.seed = cfg.seed;
  const ParamCheck c = validate_params(p);
  if (c.mode == ParamMode::Invalid) throw ConfigError("invalid solver parameters: " + c.reason);
  if (cfg.mode == ModeRequest::Strict && c.mode != ParamMode::Strict) {
    throw ConfigError("parameters are not strict (" + c.reason + "); pass --mode tightened");
  }
  return p;
}

TrialsResult run_config(const RunConfig& cfg, double xi, const DensityMatrix& rho) {
  if (cfg.trials < 1) throw ConfigError("--trials must be >= 1");
  const SolverParams params = resolve_params(cfg, xi);
  SolverOptions opts;
  opts.trace.residuals = cfg.residuals_in_trace;
  return run_trials(ModelProblem::full(rho, xi), params, cfg.trials, cfg.seed, cfg.threads, opts);
}

nlohmann::json result_json(const TrialsResult& r, const SolverParams& params) {
  using nlohmann::json;
  const SolveResult& b = r.best;
  json per = json::array();
  for (const auto& t : r.per_trial) {
    per.push_back({{"seed", t.seed},
                   {"f", t.f},
                   {"feasible_f", t.feasible_f},
                   {"violation_pz", t.violation_pz},
                   {"iterations", t.iterations},
                   {"termination", termination_name(t.termination)}});
  }
  json weights = json::array();
  for (Eigen::Index i = 0; i < b.polished_y.size(); ++i) weights.push_back(b.polished_y(i));
  return {{"f", b.f},
          {"feasible_f", b.feasible_f},
          {"violation_pz", b.violation_pz},
          {"primal_residual", b.primal_residual},
          {"dual_residual", b.dual_residual},
          {"iterations", b.iterations},
          {"termination", termination_name(b.termination)},
          {"weights", weights},
          {"stationarity", b.stationarity},
          {"params_mode", param_mode_name(b.params_check.mode)},
          {"best_seed", b.seed},
          {"per_trial", per},
          {"params",
           {{"xi", params.xi},
            {"eta", params.eta},
            {"mu1", params.mu1},
            {"mu2", params.mu2},
            {"mu3", params.mu3},
            {"tol", params.tol},
            {"max_iter", params.max_iter},
            {"nu", b.params_check.nu}}},
          {"monitor",
           {{"descent_violations", b.monitor.descent_violations},
            {"certificate_violations", b.monitor.certificate_violations},
            {"max_dual_identity_error", b.monitor.max_dual_identity_error},
            {"max_iterate_norm", b.monitor.max_iterate_norm}}}};
}

const char* const kTraceHeader =
    "iter,f,aug_lagrangian,primal_residual,violation_pz,delta_w,r1,r2,r3,r4,r5";

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << kTraceHeader << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace) {
    os << r.iter << ',' << r.f << ',' << r.aug_lagrangian << ',' << r.primal_residual << ','
       << r.violation_pz << ',' << r.delta_w;
    for (double x : r.residuals) os << ',' << x;
    os << '\n';
  }
}

std::vector<XiSweepRow> sweep_xi(const RunConfig& cfg, double from, double to, double step) {
  if (!(step > 0.0)) throw ConfigError("xi step must be > 0");
  if (!(from <= to)) throw ConfigError("xi range is empty (from > to)");
  const DensityMatrix rho = build_state(cfg);
  std::vector<XiSweepRow> rows;
  const long n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double xi = from + static_cast<double>(k) * step;
    const TrialsResult r = run_config(cfg, xi, rho);
    const SolverParams params = resolve_params(cfg, xi);
    const Lpadmm solver(ModelProblem::full(rho, xi), params);
    const LagrangianTerms t = solver.lagrangian(r.best.point);
    rows.push_back({xi, r.best.f, r.best.violation_pz, t.feasible ? "ok" : t.violated});
  }
  return rows;
}

void write_xi_sweep_csv(std::ostream& os, const std::vector<XiSweepRow>& rows) {
  os << "xi,f,violation,constraint_flags\n" << std::setprecision(17);
  for (const auto& r : rows) os << r.xi << ',' << r.f << ',' << r.violation << ',' << r.constraint_flags << '\n';
}

std::vector<NoiseSweepRow> sweep_noise(const RunConfig& cfg, const std::vector<double>& levels) {
  if (levels.empty()) throw ConfigError("no noise levels given");
  if (!cfg.state_path.empty()) throw ConfigError("noise sweeps need a named state kind, not --state");
  std::vector<NoiseSweepRow> rows;
  for (double l : levels) {
    RunConfig c = cfg;
    c.noise = l;
    const TrialsResult r = run_config(c, cfg.xi, build_state(c));
    rows.push_back({l, r.best.f, r.best.violation_pz});
  }
  return rows;
}

void write_noise_sweep_csv(std::ostream& os, const std::vector<NoiseSweepRow>& rows) {
  os << "l,f,violation\n" << std::setprecision(17);
  for (const auto& r : rows) os << r.l << ',' << r.f << ',' << r.violation << '\n';
}

}  // namespace bippt

// bippt: state generation, solves and parameter sweeps.

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "bippt/errors.hpp"
#include "bippt/experiments.hpp"
#include "bippt/matrix_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string kind = "ghz3";
  std::string state;
  std::string dims;
  std::string coeffs;
  double noise = 1.0;
  double xi = 100.0;
  std::optional<double> eta, mu1, mu2, mu3;
  double tol = 1e-8;
  long max_iter = 200000;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string mode = "strict";
  std::string out;
  std::string trace;

  double xi_from = 100.0, xi_to = 1000.0, xi_step = 50.0;
  std::string levels = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
};

void add_state_flags(CLI::App* cmd, Flags& f, bool with_file) {
  cmd->add_option("--kind", f.kind, "w3 | ghz3 | ghz5 | mghz5")->capture_default_str();
  cmd->add_option("--dims", f.dims, "Comma-separated subsystem dims");
  cmd->add_option("--noise", f.noise, "Identity weight l")->capture_default_str();
  cmd->add_option("--coeffs", f.coeffs, "multiGHZ weights m,n,s");
  if (with_file) cmd->add_option("--state", f.state, "Read the state from a matrix file")->check(CLI::ExistingFile);
}

void add_solver_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--xi", f.xi, "Penalty weight")->capture_default_str();
  cmd->add_option("--eta", f.eta, "Augmented Lagrangian penalty (default 2 xi + 1)");
  cmd->add_option("--mu1", f.mu1, "Proximal weight, y step (default 0.1)");
  cmd->add_option("--mu2", f.mu2, "Proximal weight, x step (default 1.1, 0 when tightened)");
  cmd->add_option("--mu3", f.mu3, "Proximal weight, p step (default xi)");
  cmd->add_option("--tol", f.tol, "Stop when max(primal, dual residual) < tol")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration cap")->capture_default_str();
  cmd->add_option("--trials", f.trials, "Random initializations")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  cmd->add_option("--mode", f.mode, "Parameter regime")
      ->check(CLI::IsMember({"strict", "tightened"}))
      ->capture_default_str();
}

bippt::RunConfig to_config(const Flags& f) {
  bippt::RunConfig c;
  try {
    c.kind = bippt::parse_state_kind(f.kind);
    if (!f.dims.empty()) c.dims = bippt::SubsystemDims(bippt::parse_int_list(f.dims));
  } catch (const bippt::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw bippt::ConfigError(e.what());
  }
  c.state_path = f.state;
  c.noise = f.noise;
  if (!f.coeffs.empty()) {
    const auto v = bippt::parse_double_list(f.coeffs);
    if (v.size() != 3) throw bippt::ConfigError("--coeffs takes three values m,n,s");
    c.coeffs = {v[0], v[1], v[2]};
  }
  c.xi = f.xi;
  c.eta = f.eta;
  c.mu1 = f.mu1;
  c.mu2 = f.mu2;
  c.mu3 = f.mu3;
  c.tol = f.tol;
  c.max_iter = f.max_iter;
  c.trials = f.trials;
  c.seed = f.seed;
  c.mode = bippt::parse_mode(f.mode);
  c.threads = bippt::threads_from_env();
  c.residuals_in_trace = !f.trace.empty();
  return c;
}

// Writes through `body` to a file, or stdout when path is empty.
template <typename Body>
void emit(const std::string& path, Body body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw bippt::ConfigError("cannot open '" + path + "' for writing");
  body(os);
  if (!os) throw bippt::ConfigError("write to '" + path + "' failed");
}

void cmd_gen_state(const Flags& f) {
  const bippt::DensityMatrix rho = bippt::build_state(to_config(f));
  emit(f.out, [&](std::ostream& os) { bippt::write_matrix(os, rho); });
}

void cmd_solve(const Flags& f) {
  const bippt::RunConfig cfg = to_config(f);
  const bippt::DensityMatrix rho = bippt::build_state(cfg);
  const bippt::TrialsResult r = bippt::run_config(cfg, cfg.xi, rho);
  const auto j = bippt::result_json(r, bippt::resolve_params(cfg, cfg.xi));
  emit(f.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!f.trace.empty()) {
    emit(f.trace, [&](std::ostream& os) { bippt::write_trace_csv(os, r.best.trace); });
  }
}

void cmd_sweep_xi(const Flags& f) {
  const auto rows = bippt::sweep_xi(to_config(f), f.xi_from, f.xi_to, f.xi_step);
  emit(f.out, [&](std::ostream& os) { bippt::write_xi_sweep_csv(os, rows); });
}

void cmd_sweep_noise(const Flags& f) {
  const auto rows = bippt::sweep_noise(to_config(f), bippt::parse_double_list(f.levels));
  emit(f.out, [&](std::ostream& os) { bippt::write_noise_sweep_csv(os, rows); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-PPT decomposition by linearized proximal ADMM"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen-state", "Write a test state in matrix text format");
  add_state_flags(gen, f, false);
  gen->add_option("--out", f.out, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Best-of-trials decomposition, JSON result");
  add_state_flags(solve, f, true);
  add_solver_flags(solve, f);
  solve->add_option("--out", f.out, "JSON output file (default stdout)");
  solve->add_option("--trace", f.trace, "Per-iteration CSV of the best trial");

  auto* sxi = app.add_subcommand("sweep-xi", "One solve per penalty weight, CSV");
  add_state_flags(sxi, f, true);
  add_solver_flags(sxi, f);
  sxi->add_option("--xi-from", f.xi_from)->capture_default_str();
  sxi->add_option("--xi-to", f.xi_to)->capture_default_str();
  sxi->add_option("--xi-step", f.xi_step)->capture_default_str();
  sxi->add_option("--out", f.out, "CSV output file (default stdout)");

  auto* snoise = app.add_subcommand("sweep-noise", "One solve per noise level, CSV");
  add_state_flags(snoise, f, false);
  add_solver_flags(snoise, f);
  snoise->add_option("--levels", f.levels, "Comma-separated noise levels")->capture_default_str();
  snoise->add_option("--out", f.out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) cmd_gen_state(f);
    else if (*solve) cmd_solve(f);
    else if (*sxi) cmd_sweep_xi(f);
    else cmd_sweep_noise(f);
  } catch (const bippt::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const bippt::ModelError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

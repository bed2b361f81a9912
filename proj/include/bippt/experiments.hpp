#pragma once

// Configuration, runners and serializers behind the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bippt/multipartite.hpp"
#include "bippt/solver.hpp"

namespace bippt {

// Raised for unusable user input: bad flag values, unreadable files,
// parameters outside the convergent region.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModeRequest { Strict, Tightened };

struct RunConfig {
  StateKind kind = StateKind::GHZ3;
  std::string state_path;           // when set, overrides kind/noise/coeffs
  std::optional<SubsystemDims> dims;
  double noise = 1.0;
  MultiGhzCoeffs coeffs;

  double xi = 100.0;
  std::optional<double> eta;        // default 2 xi + 1
  std::optional<double> mu1;        // default 0.1
  std::optional<double> mu2;        // default 1.1 (strict) or 0 (tightened)
  std::optional<double> mu3;        // default xi
  double tol = 1e-8;
  long max_iter = 200000;
  ModeRequest mode = ModeRequest::Strict;

  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool residuals_in_trace = true;
};

ModeRequest parse_mode(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

// Worker count: hardware concurrency capped by BIPPT_THREADS when set.
// Throws ConfigError on a malformed value.
int threads_from_env();

DensityMatrix build_state(const RunConfig& cfg);

// Defaults for a given xi plus the overrides in cfg; throws ConfigError when
// the result is not admissible for the requested mode.
SolverParams resolve_params(const RunConfig& cfg, double xi);

TrialsResult run_config(const RunConfig& cfg, double xi, const DensityMatrix& rho);

nlohmann::json result_json(const TrialsResult& r, const SolverParams& params);

extern const char* const kTraceHeader;
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace);

struct XiSweepRow {
  double xi = 0.0;
  double f = 0.0;
  double violation = 0.0;
  std::string constraint_flags;  // "ok" or the violated indicator sets
};
std::vector<XiSweepRow> sweep_xi(const RunConfig& cfg, double from, double to, double step);
void write_xi_sweep_csv(std::ostream& os, const std::vector<XiSweepRow>& rows);

struct NoiseSweepRow {
  double l = 0.0;
  double f = 0.0;
  double violation = 0.0;
};
std::vector<NoiseSweepRow> sweep_noise(const RunConfig& cfg, const std::vector<double>& levels);
void write_noise_sweep_csv(std::ostream& os, const std::vector<NoiseSweepRow>& rows);

}  // namespace bippt

#pragma once

#include <cstdint>
#include <string>

namespace bippt {

struct SolverParams {
  double xi = 100.0;   // penalty weight on ||p - z||^2
  double eta = 201.0;  // augmented Lagrangian penalty
  double mu1 = 0.1;    // proximal weight, y step
  double mu2 = 1.1;    // proximal weight, x step
  double mu3 = 100.0;  // proximal weight, p step
  double lipschitz_bound = 1.0;
  double tol = 1e-8;
  long max_iter = 200000;
  std::uint64_t seed = 0;

  // mu1 = 0.1, mu2 = 1.1, mu3 = xi, eta = 2 xi + 1.
  static SolverParams defaults_for(double xi);
};

enum class ParamMode { Strict, Tightened, Invalid };

std::string param_mode_name(ParamMode mode);

struct ParamCheck {
  ParamMode mode = ParamMode::Invalid;
  std::string reason;
  // min{eta + mu2 - L, eta/2 - 2 xi^2/eta, mu3 - 2 xi^2/eta, mu1}; the
  // per-iteration descent constant. Meaningful only in strict mode.
  double nu = 0.0;
};

// Strict: eta > 2 xi, mu2 > L, mu3 > 2 xi^2 / eta, mu1 > 0.
// Tightened: as strict but mu2 may be anything >= 0 provided eta > max{L, 2 xi}.
ParamCheck validate_params(const SolverParams& params);

}  // namespace bippt

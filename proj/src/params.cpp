#include "bippt/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bippt {

SolverParams SolverParams::defaults_for(double xi) {
  SolverParams p;
  p.xi = xi;
  p.eta = 2.0 * xi + 1.0;
  p.mu1 = 0.1;
  p.mu2 = 1.1;
  p.mu3 = xi;
  return p;
}

std::string param_mode_name(ParamMode mode) {
  switch (mode) {
    case ParamMode::Strict: return "strict";
    case ParamMode::Tightened: return "tightened";
    case ParamMode::Invalid: return "invalid";
  }
  return "invalid";
}

ParamCheck validate_params(const SolverParams& p) {
  ParamCheck out;
  const auto fail = [&](const std::string& why) {
    out.mode = ParamMode::Invalid;
    out.reason = why;
    return out;
  };
  for (double v : {p.xi, p.eta, p.mu1, p.mu2, p.mu3, p.lipschitz_bound, p.tol}) {
    if (!std::isfinite(v)) return fail("non-finite parameter");
  }
  if (!(p.xi > 0)) return fail("xi must be > 0");
  if (!(p.eta > 0)) return fail("eta must be > 0");
  if (!(p.mu1 > 0)) return fail("mu1 must be > 0");
  if (!(p.mu2 >= 0)) return fail("mu2 must be >= 0");
  if (!(p.mu3 > 0)) return fail("mu3 must be > 0");
  if (!(p.lipschitz_bound > 0)) return fail("lipschitz bound must be > 0");
  if (!(p.tol > 0)) return fail("tol must be > 0");
  if (p.max_iter < 1) return fail("max_iter must be >= 1");

  const double dual_term = 2.0 * p.xi * p.xi / p.eta;
  std::ostringstream why;
  if (!(p.eta > 2.0 * p.xi)) {
    why << "eta <= 2 xi (" << p.eta << " <= " << 2.0 * p.xi << ")";
    return fail(why.str());
  }
  if (!(p.mu3 > dual_term)) {
    why << "mu3 <= 2 xi^2 / eta (" << p.mu3 << " <= " << dual_term << ")";
    return fail(why.str());
  }
  out.nu = std::min({p.eta + p.mu2 - p.lipschitz_bound, p.eta / 2.0 - dual_term,
                     p.mu3 - dual_term, p.mu1});
  if (p.mu2 > p.lipschitz_bound) {
    out.mode = ParamMode::Strict;
    return out;
  }
  if (p.eta > std::max(p.lipschitz_bound, 2.0 * p.xi)) {
    out.mode = ParamMode::Tightened;
    out.reason = "mu2 <= L accepted since eta > max{L, 2 xi}";
    return out;
  }
  why << "mu2 <= L (" << p.mu2 << " <= " << p.lipschitz_bound << ") and eta <= L";
  return fail(why.str());
}

}  // namespace bippt

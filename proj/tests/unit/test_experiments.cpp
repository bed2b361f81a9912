#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "bippt/errors.hpp"
#include "bippt/experiments.hpp"
#include "bippt/matrix_io.hpp"
#include "doctest.h"

using namespace bippt;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.kind = StateKind::GHZ3;
  c.noise = 0.5;
  c.xi = 50.0;
  c.max_iter = 300;
  c.trials = 2;
  return c;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("list and mode parsing") {
  CHECK(parse_int_list("2,3,2") == std::vector<int>{2, 3, 2});
  CHECK(parse_double_list("1,1,5") == std::vector<double>{1.0, 1.0, 5.0});
  CHECK(parse_double_list("0.5") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_int_list("2,x"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("2.5"), ConfigError);
  CHECK_THROWS_AS(parse_double_list(""), ConfigError);
  CHECK(parse_mode("strict") == ModeRequest::Strict);
  CHECK(parse_mode("tightened") == ModeRequest::Tightened);
  CHECK_THROWS_AS(parse_mode("loose"), ConfigError);
}

TEST_CASE("thread cap from the environment") {
  setenv("BIPPT_THREADS", "1", 1);
  CHECK(threads_from_env() == 1);
  setenv("BIPPT_THREADS", "0", 1);
  CHECK_THROWS_AS(threads_from_env(), ConfigError);
  setenv("BIPPT_THREADS", "two", 1);
  CHECK_THROWS_AS(threads_from_env(), ConfigError);
  unsetenv("BIPPT_THREADS");
  CHECK(threads_from_env() >= 1);
}

TEST_CASE("parameter resolution") {
  RunConfig c = small_config();
  const SolverParams p = resolve_params(c, 300.0);
  CHECK(p.eta == 601.0);
  CHECK(p.mu3 == 300.0);
  CHECK(p.mu2 == 1.1);

  c.eta = 500.0;  // below 2 xi
  CHECK_THROWS_AS(resolve_params(c, 300.0), ConfigError);

  c = small_config();
  c.mu2 = 0.0;  // fine only when tightened
  CHECK_THROWS_AS(resolve_params(c, 300.0), ConfigError);
  c.mode = ModeRequest::Tightened;
  CHECK(validate_params(resolve_params(c, 300.0)).mode == ParamMode::Tightened);
}

TEST_CASE("state construction errors are config errors") {
  RunConfig c = small_config();
  c.dims = SubsystemDims({2, 3, 2});
  CHECK_THROWS_AS(build_state(c), ConfigError);
  c = small_config();
  c.noise = -1.0;
  CHECK_THROWS_AS(build_state(c), ConfigError);
  c = small_config();
  c.state_path = "/nonexistent/state.txt";
  CHECK_THROWS_AS(build_state(c), ConfigError);
}

TEST_CASE("file round trip reproduces the in-memory solve exactly") {
  const RunConfig mem = small_config();
  const DensityMatrix rho = build_state(mem);
  const auto path = std::filesystem::temp_directory_path() / "bippt_roundtrip_state.txt";
  write_matrix_file(path.string(), rho);
  RunConfig file = mem;
  file.state_path = path.string();
  const DensityMatrix back = build_state(file);
  CHECK((back.data().array() == rho.data().array()).all());

  const TrialsResult a = run_config(mem, mem.xi, rho);
  const TrialsResult b = run_config(file, file.xi, back);
  CHECK(a.best.f == b.best.f);
  CHECK(result_json(a, resolve_params(mem, mem.xi)).dump() ==
        result_json(b, resolve_params(file, file.xi)).dump());
  std::filesystem::remove(path);
}

TEST_CASE("result json fields") {
  const RunConfig c = small_config();
  const TrialsResult r = run_config(c, c.xi, build_state(c));
  const auto j = result_json(r, resolve_params(c, c.xi));
  for (const char* key : {"f", "violation_pz", "iterations", "termination", "weights", "per_trial",
                          "stationarity", "params_mode", "feasible_f"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["per_trial"].size() == 2);
  CHECK(j["weights"].size() == 3);
  CHECK(j["stationarity"].size() == 5);
  CHECK(j["params_mode"] == "strict");
  CHECK(j["iterations"] == 300);
  CHECK(j["termination"] == "max_iter");
  CHECK(j["f"].get<double>() == r.best.f);
}

TEST_CASE("trace csv") {
  RunConfig c = small_config();
  c.trials = 1;
  c.max_iter = 1200;
  const TrialsResult r = run_config(c, c.xi, build_state(c));
  std::ostringstream os;
  write_trace_csv(os, r.best.trace);
  const auto lines = lines_of(os.str());
  CHECK(lines.front() == "iter,f,aug_lagrangian,primal_residual,violation_pz,delta_w,r1,r2,r3,r4,r5");
  // Rows 0..1000, then 1100 and 1200.
  CHECK(lines.size() == 1 + 1001 + 2);
  CHECK(lines[1].rfind("0,", 0) == 0);
  CHECK(lines.back().rfind("1200,", 0) == 0);
  for (const auto& l : lines) CHECK(std::count(l.begin(), l.end(), ',') == 10);
}

TEST_CASE("single-point xi sweep equals a solve") {
  const RunConfig c = small_config();
  const auto rows = sweep_xi(c, 50.0, 50.0, 10.0);
  REQUIRE(rows.size() == 1);
  const TrialsResult r = run_config(c, 50.0, build_state(c));
  CHECK(rows[0].xi == 50.0);
  CHECK(rows[0].f == r.best.f);
  CHECK(rows[0].violation == r.best.violation_pz);
  CHECK(rows[0].constraint_flags == "ok");

  std::ostringstream os;
  write_xi_sweep_csv(os, rows);
  CHECK(lines_of(os.str()).front() == "xi,f,violation,constraint_flags");
}

TEST_CASE("xi sweep grid and parameter rederivation") {
  RunConfig c = small_config();
  c.trials = 1;
  c.max_iter = 20;
  const auto rows = sweep_xi(c, 100.0, 200.0, 50.0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].xi == 100.0);
  CHECK(rows[2].xi == 200.0);
  CHECK_THROWS_AS(sweep_xi(c, 200.0, 100.0, 50.0), ConfigError);
  CHECK_THROWS_AS(sweep_xi(c, 100.0, 200.0, 0.0), ConfigError);
  // A fixed eta valid at xi = 100 stops being valid at xi = 200.
  c.eta = 250.0;
  CHECK_THROWS_AS(sweep_xi(c, 100.0, 200.0, 100.0), ConfigError);
}

TEST_CASE("noise sweep") {
  RunConfig c = small_config();
  c.trials = 1;
  c.max_iter = 50;
  const auto rows = sweep_noise(c, {0.3, 1.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].l == 0.3);
  CHECK(rows[1].l == 1.0);
  const auto one = sweep_noise(c, {0.3});
  CHECK(one.size() == 1);
  CHECK(one[0].f == rows[0].f);

  std::ostringstream os;
  write_noise_sweep_csv(os, rows);
  CHECK(lines_of(os.str()).front() == "l,f,violation");
  CHECK_THROWS_AS(sweep_noise(c, {}), ConfigError);
}

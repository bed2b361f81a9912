#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bippt/errors.hpp"
#include "bippt/experiments.hpp"
#include "bippt/matrix_io.hpp"
#include "bippt/objective.hpp"
#include "bippt/prox.hpp"
#include "bippt/solver.hpp"

namespace py = pybind11;
using namespace bippt;

namespace {

SubsystemDims dims_or_default(const std::optional<std::vector<int>>& dims, StateKind kind) {
  return dims ? SubsystemDims(*dims) : default_dims(kind);
}

Bipartition part_of(const std::vector<int>& left) { return Bipartition{left}; }

ComponentStack stack_of(const std::vector<Matrix>& blocks) {
  ComponentStack x;
  x.blocks = blocks;
  return x;
}

py::dict solve_py(const Matrix& rho, const std::vector<int>& dims, double xi, int trials,
                  std::uint64_t seed, long max_iter, double tol, const std::string& mode, int threads) {
  RunConfig cfg;
  cfg.xi = xi;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.max_iter = max_iter;
  cfg.tol = tol;
  cfg.mode = parse_mode(mode);
  cfg.threads = threads > 0 ? threads : threads_from_env();
  cfg.residuals_in_trace = false;
  const DensityMatrix state(rho, SubsystemDims(dims));
  TrialsResult r;
  {
    py::gil_scoped_release release;
    r = run_config(cfg, xi, state);
  }
  const SolveResult& b = r.best;
  py::dict out;
  out["f"] = b.f;
  out["feasible_f"] = b.feasible_f;
  out["violation_pz"] = b.violation_pz;
  out["iterations"] = b.iterations;
  out["termination"] = termination_name(b.termination);
  out["weights"] = Vector(b.polished_y);
  out["components"] = b.polished_x.blocks;
  out["stationarity"] = std::vector<double>(b.stationarity.begin(), b.stationarity.end());
  out["params_mode"] = param_mode_name(b.params_check.mode);
  out["best_seed"] = b.seed;
  py::list per;
  for (const auto& t : r.per_trial) {
    py::dict d;
    d["seed"] = t.seed;
    d["f"] = t.f;
    d["iterations"] = t.iterations;
    d["termination"] = termination_name(t.termination);
    per.append(d);
  }
  out["per_trial"] = per;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bi-PPT decomposition of real multipartite density matrices";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "make_state",
      [](const std::string& kind, double noise, std::optional<std::vector<int>> dims,
         std::vector<double> coeffs) {
        if (coeffs.size() != 3) throw DomainError("coeffs takes three values m, n, s");
        const StateKind k = parse_state_kind(kind);
        return make_state(k, dims_or_default(dims, k), noise, {coeffs[0], coeffs[1], coeffs[2]}).data();
      },
      py::arg("kind"), py::arg("noise") = 1.0, py::arg("dims") = py::none(),
      py::arg("coeffs") = std::vector<double>{1.0, 1.0, 1.0});

  m.def("enumerate_bipartitions", [](int n) {
    std::vector<std::vector<int>> out;
    for (const auto& p : enumerate_bipartitions(n)) out.push_back(p.left);
    return out;
  });

  m.def(
      "partial_transpose",
      [](const Matrix& rho, const std::vector<int>& dims, const std::vector<int>& left) {
        return partial_transpose(rho, SubsystemDims(dims), part_of(left));
      },
      py::arg("matrix"), py::arg("dims"), py::arg("left"));

  m.def("project_psd", &project_psd);
  m.def("project_trace_one", &project_trace_one);
  m.def("project_simplex", &project_simplex);

  m.def(
      "objective",
      [](const std::vector<Matrix>& x, const Vector& y, const Matrix& rho) {
        return objective_f(stack_of(x), y, rho);
      },
      py::arg("components"), py::arg("weights"), py::arg("rho"));

  m.def(
      "read_matrix", [](const std::string& path) {
        const DensityMatrix d = read_matrix_file(path);
        return py::make_tuple(d.data(), d.dims().dims());
      },
      py::arg("path"));
  m.def(
      "write_matrix",
      [](const std::string& path, const Matrix& rho, const std::vector<int>& dims) {
        write_matrix_file(path, DensityMatrix(rho, SubsystemDims(dims)));
      },
      py::arg("path"), py::arg("matrix"), py::arg("dims"));

  m.def("solve", &solve_py, py::arg("rho"), py::arg("dims"), py::arg("xi") = 100.0,
        py::arg("trials") = 1, py::arg("seed") = 0, py::arg("max_iter") = 200000,
        py::arg("tol") = 1e-8, py::arg("mode") = "strict", py::arg("threads") = 0,
        "Best-of-trials decomposition; returns a dict shaped like the CLI's JSON result.");
}

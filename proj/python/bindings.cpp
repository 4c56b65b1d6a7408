#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gdgm/checkpoint.hpp"
#include "gdgm/commands.hpp"
#include "gdgm/config.hpp"
#include "gdgm/errors.hpp"
#include "gdgm/evaluation.hpp"
#include "gdgm/sampling.hpp"
#include "gdgm/training.hpp"

namespace py = pybind11;
using namespace gdgm;

namespace {

// Python passes points as (n, d) arrays; the core works on d x n.
Eigen::MatrixXd columns(const Eigen::MatrixXd& rows, int dim) {
  if (rows.cols() != dim) {
    throw py::value_error("expected points of shape (n, " + std::to_string(dim) + "), got (" +
                          std::to_string(rows.rows()) + ", " + std::to_string(rows.cols()) + ")");
  }
  return rows.transpose();
}

Eigen::VectorXd row_to_vector(const Eigen::RowVectorXd& r) { return r.transpose(); }

py::dict log_entry(const EpochLog& l) {
  py::dict d;
  d["epoch"] = l.epoch;
  d["stage"] = l.stage;
  d["loss_interior"] = l.loss_interior;
  d["loss_boundary"] = l.loss_boundary;
  d["loss_total"] = l.loss_total;
  d["relative_error"] = l.relative_error;
  d["wall_ms"] = l.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SIREN/DGM Poisson solver core";

  static py::exception<Error> error(m, "GdgmError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<ArchitectureConfig>(m, "ArchitectureConfig")
      .def(py::init<>())
      .def_readwrite("hidden_layers", &ArchitectureConfig::hidden_layers)
      .def_readwrite("width", &ArchitectureConfig::width)
      .def_readwrite("omega0", &ArchitectureConfig::omega0)
      .def_readwrite("fourier_enabled", &ArchitectureConfig::fourier_enabled)
      .def_readwrite("fourier_sigma", &ArchitectureConfig::fourier_sigma)
      .def_readwrite("fourier_n", &ArchitectureConfig::fourier_n);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("M", &TrainConfig::M)
      .def_readwrite("Nb", &TrainConfig::Nb)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("eta", &TrainConfig::eta)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("K", &TrainConfig::K)
      .def_readwrite("eval_points", &TrainConfig::eval_points)
      .def_readwrite("log_every", &TrainConfig::log_every)
      .def_property(
          "beta1", [](const TrainConfig& c) { return c.adam.beta1; },
          [](TrainConfig& c, double v) { c.adam.beta1 = v; })
      .def_property(
          "beta2", [](const TrainConfig& c) { return c.adam.beta2; },
          [](TrainConfig& c, double v) { c.adam.beta2 = v; })
      .def_property(
          "eps", [](const TrainConfig& c) { return c.adam.eps; },
          [](TrainConfig& c, double v) { c.adam.eps = v; })
      .def("validate", &TrainConfig::validate);

  py::class_<Network>(m, "Network")
      .def_readonly("input_dim", &Network::input_dim)
      .def_readonly("omega0", &Network::omega0)
      .def_property_readonly("hidden_layers", &Network::hidden_layers)
      .def_property_readonly("parameter_count", &Network::parameter_count)
      .def_property_readonly("has_fourier", [](const Network& n) { return n.fourier.has_value(); })
      .def_property(
          "parameters", [](const Network& n) { return flatten_parameters(n); },
          [](Network& n, const Eigen::VectorXd& theta) { assign_parameters(n, theta); })
      .def("__call__", [](const Network& n, const Eigen::MatrixXd& points) {
        return row_to_vector(forward_batch(n, columns(points, n.input_dim), false).value);
      }, py::arg("points"));

  py::class_<CorrectionStack>(m, "CorrectionStack")
      .def(py::init([](const std::string& problem) { return CorrectionStack(builtin_problem(problem)); }),
           py::arg("problem"))
      .def_property_readonly("problem", [](const CorrectionStack& s) { return s.problem().name; })
      .def_property_readonly("dim", [](const CorrectionStack& s) { return s.problem().dim(); })
      .def("__len__", &CorrectionStack::size)
      .def("push", [](CorrectionStack& s, const Network& n) { s.push(n); }, py::arg("network"))
      .def("network", [](const CorrectionStack& s, std::size_t k) {
        const auto* net = std::get_if<Network>(&s.member(k));
        if (!net) throw py::value_error("stack member is a closed form, not a network");
        return *net;
      }, py::arg("k"))
      .def("logs", [](const CorrectionStack& s, std::size_t k) {
        py::list out;
        for (const EpochLog& l : s.logs(k)) out.append(log_entry(l));
        return out;
      }, py::arg("k"))
      .def("__call__", [](const CorrectionStack& s, const Eigen::MatrixXd& points,
                          std::optional<std::size_t> prefix) {
        return row_to_vector(
            s.fields(columns(points, s.problem().dim()), prefix.value_or(s.size()), false).value);
      }, py::arg("points"), py::arg("prefix") = py::none());

  m.def("builtin_problem_names", &builtin_problem_names);
  m.def("exact_solution", [](const std::string& problem, const Eigen::MatrixXd& points) {
    const PdeProblem p = builtin_problem(problem);
    if (!p.exact) throw py::value_error(problem + " has no closed-form solution");
    return row_to_vector(member_fields(*p.exact, columns(points, p.dim()), false).value);
  }, py::arg("problem"), py::arg("points"));

  m.def("init_siren", &init_siren, py::arg("input_dim"), py::arg("hidden_layers"),
        py::arg("width"), py::arg("omega0") = 30.0, py::arg("seed") = 1);
  m.def("make_network", &make_network, py::arg("arch"), py::arg("input_dim"), py::arg("seed"));
  m.def("forward_with_laplacian", [](const Network& n, const Eigen::MatrixXd& points) {
    const BatchOutput o = forward_batch(n, columns(points, n.input_dim), true);
    return py::make_tuple(row_to_vector(o.value), Eigen::MatrixXd(o.gradient.transpose()),
                          row_to_vector(o.laplacian));
  }, py::arg("network"), py::arg("points"),
     "Returns (value, gradient, laplacian) with shapes (n,), (n, d), (n,).");

  m.def("sample_interior", [](const std::string& problem, int count, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return Eigen::MatrixXd(sample_interior(builtin_problem(problem).domain, count, rng).points.transpose());
  }, py::arg("problem"), py::arg("count"), py::arg("seed"));
  m.def("sample_boundary", [](const std::string& problem, int count, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return Eigen::MatrixXd(sample_boundary(builtin_problem(problem).domain, count, rng).points.transpose());
  }, py::arg("problem"), py::arg("count"), py::arg("seed"));
  m.def("evaluation_set", [](const std::string& problem, int count, std::uint64_t seed) {
    return Eigen::MatrixXd(evaluation_set(builtin_problem(problem).domain, count, seed).transpose());
  }, py::arg("problem"), py::arg("count"), py::arg("seed"));

  m.def("residual_fk", [](const CorrectionStack& s, const Network& candidate,
                          const Eigen::MatrixXd& points) {
    const Eigen::MatrixXd cols = columns(points, s.problem().dim());
    Eigen::VectorXd out(cols.cols());
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
      const Eigen::VectorXd x = cols.col(j);
      out(j) = residual_Fk(s, candidate, as_span(x));
    }
    return out;
  }, py::arg("stack"), py::arg("candidate"), py::arg("points"));

  m.def("run_error_correction", [](const std::string& problem, const ArchitectureConfig& arch,
                                   const TrainConfig& config) {
    const PdeProblem p = builtin_problem(problem);
    py::gil_scoped_release release;
    return run_error_correction(p, arch, config);
  }, py::arg("problem"), py::arg("arch"), py::arg("config"));
  m.def("extend_corrections", [](CorrectionStack& s, const ArchitectureConfig& arch,
                                 const TrainConfig& config, int extra) {
    py::gil_scoped_release release;
    extend_corrections(s, arch, config, extra);
  }, py::arg("stack"), py::arg("arch"), py::arg("config"), py::arg("extra"));

  m.def("relative_error", [](const CorrectionStack& s, const Eigen::MatrixXd& points) {
    return make_report(s, columns(points, s.problem().dim())).relative_error;
  }, py::arg("stack"), py::arg("points"));

  m.def("save_checkpoint", [](const CorrectionStack& s, const std::filesystem::path& path,
                              std::uint64_t seed) { save_checkpoint(s, seed, path); },
        py::arg("stack"), py::arg("path"), py::arg("seed") = 0);
  m.def("load_checkpoint", [](const std::filesystem::path& path) {
    Checkpoint cp = load_checkpoint(path);
    return py::make_tuple(std::move(cp.stack), cp.seed);
  }, py::arg("path"), "Returns (stack, seed).");

  m.def("train_from_config", [](const std::filesystem::path& config,
                                std::optional<std::filesystem::path> out_dir) {
    RunConfig c = parse_config(config);
    if (out_dir) c.out_dir = *out_dir;
    std::ostringstream log;
    CorrectionStack stack = [&] {
      py::gil_scoped_release release;
      return cmd_train(c, log);
    }();
    return py::make_tuple(std::move(stack), log.str());
  }, py::arg("config"), py::arg("out_dir") = py::none(),
     "Runs the train command. Returns (stack, log text).");
}

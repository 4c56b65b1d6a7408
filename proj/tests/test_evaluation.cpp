#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <doctest.h>

#include "gdgm/errors.hpp"
#include "gdgm/evaluation.hpp"
#include "gdgm/sampling.hpp"
#include "gdgm/training.hpp"

using namespace gdgm;
using doctest::Approx;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("gdgm_eval_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> svg_fills(const std::string& svg) {
  std::vector<std::string> fills;
  const std::regex re("fill=\"(rgb\\([0-9,]+\\))\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    fills.push_back((*it)[1]);
  }
  return fills;
}

// f = 0, g = 0: a network with a zeroed output layer solves the problem.
PdeProblem homogeneous(int dim) {
  PdeProblem p = builtin_problem(dim == 1 ? "sine1d_1" : "sine2d_1");
  p.source = [](std::span<const double>) { return 0.0; };
  p.exact.reset();
  return p;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("relative_error examples") {
  const std::vector<double> phi{0.0, 1.0};
  CHECK(relative_error(phi, phi) == 0.0);
  CHECK(relative_error(std::vector<double>{0.0, 0.0}, phi) == 1.0);
  CHECK(relative_error(std::vector<double>{0.1, 1.1}, phi) == Approx(0.02).epsilon(1e-12));

  Eigen::MatrixXd s(1, 2);
  s << 0.0, pi / 2;
  const ScalarField sine = [](std::span<const double> x) { return std::sin(x[0]); };
  const ScalarField shifted = [](std::span<const double> x) { return std::sin(x[0]) + 0.1; };
  CHECK(relative_error(shifted, sine, s) == Approx(0.02).epsilon(1e-12));
}

TEST_CASE("relative_error error cases") {
  try {
    relative_error(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0});
    FAIL("expected degenerate metric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMetric);
  }
  CHECK_THROWS_AS(relative_error(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(relative_error(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("relative_error is quadratic along a perturbation") {
  Rng rng = make_rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> phi(200), e(200);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = n(rng);
    e[i] = n(rng);
  }
  auto at = [&](double t) {
    std::vector<double> pred(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) pred[i] = phi[i] + t * e[i];
    return relative_error(pred, phi);
  };
  CHECK(at(0.0) == 0.0);
  CHECK(at(1.0) == Approx(4.0 * at(0.5)).epsilon(1e-12));
  for (int t = 0; t < 20; ++t) {
    std::vector<double> phi2(50);
    for (double& v : phi2) v = n(rng);
    CHECK(relative_error(std::vector<double>(50, 0.0), phi2) == 1.0);
  }
}

TEST_CASE("quadrature gradient vanishes at a solution") {
  for (int d : {1, 2}) {
    Network net = init_siren(d, 2, 8, 2.0, 3);
    net.layers.back().weight.setZero();
    net.layers.back().bias.setZero();
    const ObjectiveGradient g = quadrature_objective_gradient(homogeneous(d), net, 32);
    CHECK(g.loss.total() == 0.0);
    CHECK(g.grad.flatten().norm() <= 1e-10);
  }
}

TEST_CASE("quadrature gradient converges at second order") {
  for (int d : {1, 2}) {
    INFO("d=" << d);
    const PdeProblem p = builtin_problem(d == 1 ? "sine1d_1" : "sine2d_1");
    const Network net = init_siren(d, 2, 8, 1.0, 11);
    const Eigen::VectorXd g32 = quadrature_objective_gradient(p, net, 33).grad.flatten();
    const Eigen::VectorXd g64 = quadrature_objective_gradient(p, net, 65).grad.flatten();
    const Eigen::VectorXd g128 = quadrature_objective_gradient(p, net, 129).grad.flatten();
    const double ratio = (g32 - g64).norm() / (g64 - g128).norm();
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("quadrature oracle limits") {
  const PdeProblem p = builtin_problem("p1_3d");
  const Network net = init_siren(3, 1, 4, 2.0, 1);
  try {
    quadrature_objective_gradient(p, net, 16);
    FAIL("expected unsupported oracle");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedOracle);
  }
  CHECK_THROWS_AS(quadrature_objective_gradient(builtin_problem("sine1d_1"),
                                                init_siren(1, 1, 4, 2.0, 1), 4),
                  Error);
}

TEST_CASE("zero field exports as mid-scale") {
  const fs::path dir = scratch_dir("zero");
  const Eigen::MatrixXd grid = eval_grid(Box::cube(2, -pi, pi), 16);
  export_field(grid, Eigen::RowVectorXd::Zero(grid.cols()), dir / "zero");
  const std::vector<std::string> fills = svg_fills(slurp(dir / "zero.svg"));
  REQUIRE(fills.size() == 256);
  CHECK(std::set<std::string>(fills.begin(), fills.end()).size() == 1);
  const FieldTable t = read_field_values(dir / "zero.csv");
  CHECK(t.values.isZero(0.0));
  CHECK(t.points == grid);
}

TEST_CASE("p2 solution exports as a checkerboard") {
  const fs::path dir = scratch_dir("p2");
  const PdeProblem p = builtin_problem("p2_2d");
  const Eigen::MatrixXd grid = eval_grid(p.domain, 128);
  export_field(p.exact->value, grid, dir / "p2");
  const FieldTable t = read_field_values(dir / "p2.csv");
  REQUIRE(t.values.size() == 128 * 128);
  // along x at fixed y = grid row 40, sin(20x) has 39 interior zeros
  int changes = 0;
  for (int i = 1; i < 128; ++i) {
    const double a = t.values(static_cast<Eigen::Index>((i - 1) * 128 + 40));
    const double b = t.values(static_cast<Eigen::Index>(i * 128 + 40));
    changes += (a < 0) != (b < 0);
  }
  CHECK(changes == 39);
  const std::vector<std::string> fills = svg_fills(slurp(dir / "p2.svg"));
  CHECK(fills.size() == 128 * 128);
  CHECK(slurp(dir / "p2.svg").find("colormap") != std::string::npos);
}

TEST_CASE("field export round trips") {
  const fs::path dir = scratch_dir("roundtrip");
  const PdeProblem p = builtin_problem("p1_3d");
  const Eigen::MatrixXd grid = eval_grid(p.domain, 20, {{2, pi / 10}});
  export_field(p.exact->value, grid, dir / "slice");
  const FieldTable t = read_field_values(dir / "slice.csv");
  REQUIRE(t.points.rows() == 3);
  CHECK(t.points == grid);
  for (Eigen::Index j = 0; j < grid.cols(); ++j) {
    const Eigen::VectorXd x = grid.col(j);
    CHECK(std::abs(t.values(j) - p.exact->value(as_span(x))) <= 1e-15);
  }
  CHECK(slurp(dir / "slice.csv").rfind("x,y,z,value\n", 0) == 0);
}

TEST_CASE("export to an unwritable path reports the path") {
  const fs::path dir = scratch_dir("io");
  std::ofstream(dir / "blocker") << "x";
  const fs::path target = dir / "blocker" / "field";
  const Eigen::MatrixXd grid = eval_grid(Box::cube(2, -1.0, 1.0), 4);
  try {
    export_field(grid, Eigen::RowVectorXd::Zero(16), target);
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find(target.string()) != std::string::npos);
  }
}

TEST_CASE("logs round trip and keep stage order") {
  const fs::path dir = scratch_dir("logs");
  std::vector<EpochLog> one{{0, 0, 1.5, 0.25, 1.75, 0.125, 3.0}};
  write_logs(one, dir / "one.csv");
  const std::string text = slurp(dir / "one.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind(std::string(kLogHeader) + "\n", 0) == 0);

  const PdeProblem p = builtin_problem("sine1d_1");
  ArchitectureConfig arch;
  arch.hidden_layers = 1;
  arch.width = 8;
  arch.omega0 = 2.0;
  TrainConfig cfg;
  cfg.M = 32;
  cfg.Nb = 8;
  cfg.epochs = 3;
  cfg.eta = 1e-3;
  cfg.K = 2;
  cfg.eval_points = 64;
  const CorrectionStack stack = run_error_correction(p, arch, cfg);
  write_logs(stack.logs(0), dir / "run.csv");
  write_logs(stack.logs(1), dir / "run.csv", true);
  write_logs(stack.logs(2), dir / "run.csv", true);
  const std::vector<EpochLog> back = read_logs(dir / "run.csv");
  const std::vector<EpochLog> all = stack.all_logs();
  REQUIRE(back.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(back[i].epoch == all[i].epoch);
    CHECK(back[i].stage == all[i].stage);
    CHECK(back[i].loss_interior == all[i].loss_interior);
    CHECK(back[i].loss_boundary == all[i].loss_boundary);
    CHECK(back[i].loss_total == all[i].loss_total);
    CHECK(back[i].relative_error == all[i].relative_error);
    CHECK(back[i].wall_ms == all[i].wall_ms);
    if (i > 0) CHECK(back[i].stage >= back[i - 1].stage);
  }
  CHECK(back.back().stage == 2);
}

TEST_CASE("report lists each prefix") {
  const PdeProblem p = builtin_problem("p3_2d");
  CorrectionStack stack(p);
  stack.push(*p.exact);
  const Eigen::MatrixXd s = evaluation_set(p.domain, 500, 1);
  const EvalReport r = make_report(stack, s);
  CHECK(r.relative_error == 0.0);
  CHECK(r.point_count == 500);
  REQUIRE(r.stage_relative_errors.size() == 1);
  CHECK(r.stage_relative_errors[0] == 0.0);
}

}  // TEST_SUITE

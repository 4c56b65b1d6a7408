#include "gdgm/problem.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "gdgm/errors.hpp"

namespace gdgm {
namespace {

constexpr double kPi = std::numbers::pi;

double zero(std::span<const double>) { return 0.0; }

double sine_product(std::span<const double> x, double k) {
  double p = 1.0;
  for (double xi : x) p *= std::sin(k * xi);
  return p;
}

PdeProblem poisson(std::string name, int dim, ScalarField source, ClosedForm exact) {
  PdeProblem p;
  p.name = std::move(name);
  p.domain = Box::cube(dim, -kPi, kPi);
  p.nonlinear = Nonlinearity::none();
  p.source = std::move(source);
  p.boundary = zero;
  p.exact = std::move(exact);
  return p;
}

}  // namespace

Box Box::cube(int dim, double lo, double hi) {
  const auto n = static_cast<std::size_t>(dim);
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) {
    fail(ErrorKind::InvalidConfig, "box: bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
      fail(ErrorKind::InvalidConfig, "box: need finite lo < hi on axis " + std::to_string(i));
    }
  }
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

bool Box::strictly_contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
  }
  return true;
}

bool Box::on_boundary(std::span<const double> x) const {
  if (!contains(x)) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == lo[i] || x[i] == hi[i]) return true;
  }
  return false;
}

Nonlinearity Nonlinearity::none() { return {}; }

Nonlinearity Nonlinearity::sinh() {
  return {"sinh", [](double u) { return std::sinh(u); }, [](double u) { return std::cosh(u); }};
}

PdeProblem sine_product_problem(int dim, int frequency) {
  if (dim < 1 || frequency < 1) {
    fail(ErrorKind::UnknownProblem, "sine problem needs dim >= 1 and frequency >= 1");
  }
  const double k = frequency;
  const double scale = -dim * k * k;
  std::string name = "sine" + std::to_string(dim) + "d_" + std::to_string(frequency);
  ClosedForm exact{name + ".exact", [k](std::span<const double> x) { return sine_product(x, k); },
                   [k, scale](std::span<const double> x) { return scale * sine_product(x, k); }};
  return poisson(name, dim,
                 [k, scale](std::span<const double> x) { return scale * sine_product(x, k); },
                 std::move(exact));
}

PdeProblem builtin_problem(std::string_view name) {
  if (name == "p1_3d") {
    // phi = sin5x sin5y sin5z, Laplacian = -75 phi
    PdeProblem p = sine_product_problem(3, 5);
    p.name = "p1_3d";
    p.exact->name = "p1_3d.exact";
    return p;
  }
  if (name == "p2_2d") {
    // phi = sin20x sin20y, Laplacian = -800 phi
    PdeProblem p = sine_product_problem(2, 20);
    p.name = "p2_2d";
    p.exact->name = "p2_2d.exact";
    return p;
  }
  if (name == "p3_2d") {
    auto phi = [](std::span<const double> x) {
      return (kPi * kPi - x[1] * x[1]) * std::sin(10.0 * x[0]);
    };
    auto lap = [](std::span<const double> x) {
      return (100.0 * x[1] * x[1] - 100.0 * kPi * kPi - 2.0) * std::sin(10.0 * x[0]);
    };
    return poisson("p3_2d", 2, lap, ClosedForm{"p3_2d.exact", phi, lap});
  }
  if (name == "pb_demo") {
    // Laplacian(phi) + sinh(phi) = f with phi = sin x sin y.
    auto phi = [](std::span<const double> x) { return std::sin(x[0]) * std::sin(x[1]); };
    auto lap = [phi](std::span<const double> x) { return -2.0 * phi(x); };
    PdeProblem p = poisson(
        "pb_demo", 2, [phi](std::span<const double> x) { return -2.0 * phi(x) + std::sinh(phi(x)); },
        ClosedForm{"pb_demo.exact", phi, lap});
    p.nonlinear = Nonlinearity::sinh();
    return p;
  }
  if (name.starts_with("sine")) {
    const auto d_pos = name.find("d_");
    int dim = 0;
    int freq = 0;
    if (d_pos != std::string_view::npos) {
      const char* first = name.data();
      auto r1 = std::from_chars(first + 4, first + d_pos, dim);
      auto r2 = std::from_chars(first + d_pos + 2, first + name.size(), freq);
      if (r1.ec == std::errc{} && r1.ptr == first + d_pos && r2.ec == std::errc{} &&
          r2.ptr == first + name.size() && dim >= 1 && freq >= 1) {
        return sine_product_problem(dim, freq);
      }
    }
  }
  fail(ErrorKind::UnknownProblem, "unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> builtin_problem_names() {
  return {"p1_3d", "p2_2d", "p3_2d", "pb_demo"};
}

double residual_F0(const PdeProblem& problem, double value, double laplacian,
                   std::span<const double> x) {
  return laplacian + problem.nonlinear(value) - problem.source(x);
}

}  // namespace gdgm

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdgm {

using ScalarField = std::function<double(std::span<const double>)>;

// Axis-aligned box [lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(int dim, double lo, double hi);
  int dim() const noexcept { return static_cast<int>(lo.size()); }
  void validate() const;
  bool contains(std::span<const double> x) const;
  bool strictly_contains(std::span<const double> x) const;
  bool on_boundary(std::span<const double> x) const;
};

// Scalar nonlinearity B[u](x) = b(u(x)). An empty `value` means B = 0.
struct Nonlinearity {
  std::string name = "none";
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  static Nonlinearity none();
  static Nonlinearity sinh();

  bool active() const noexcept { return static_cast<bool>(value); }
  double operator()(double u) const { return value ? value(u) : 0.0; }
  double slope(double u) const { return derivative ? derivative(u) : 0.0; }
};

// A closed-form function together with its analytic Laplacian.
struct ClosedForm {
  std::string name;
  ScalarField value;
  ScalarField laplacian;
};

// Laplacian(u) + B[u] = f in the box, u = g on its boundary.
struct PdeProblem {
  std::string name;
  Box domain;
  Nonlinearity nonlinear;
  ScalarField source;
  ScalarField boundary;
  std::optional<ClosedForm> exact;

  int dim() const noexcept { return domain.dim(); }
};

// Registered names: p1_3d, p2_2d, p3_2d, pb_demo, plus the manufactured
// family sine<d>d_<k> (see sine_product_problem).
PdeProblem builtin_problem(std::string_view name);
std::vector<std::string> builtin_problem_names();

// phi = prod_i sin(k x_i) on [-pi, pi]^d with g = 0 and f = -d k^2 phi.
PdeProblem sine_product_problem(int dim, int frequency);

double residual_F0(const PdeProblem& problem, double value, double laplacian,
                   std::span<const double> x);

}  // namespace gdgm

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gdgm {

// Value of a scalar quantity together with its exact first derivatives and
// pure second derivatives with respect to the d input coordinates. Mixed
// partials are never carried: every network here mixes units only through
// affine maps, so the diagonal closes over itself.
struct Jet {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> second;

  Jet() = default;
  Jet(double v, std::vector<double> g, std::vector<double> s);
  static Jet constant(double v, std::size_t dim);

  std::size_t dim() const noexcept { return grad.size(); }
  double laplacian() const noexcept;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator*(double a, const Jet& j);

// Jet i carries x_i with unit gradient e_i and zero curvature.
std::vector<Jet> seed_jets(std::span<const double> x);

// out_j = sum_k W(j,k) in_k + b_j applied to value, grad and second alike.
std::vector<Jet> jet_affine(const Eigen::MatrixXd& weight,
                            const Eigen::VectorXd& bias,
                            std::span<const Jet> in);

// Element-wise sin(omega * u).
std::vector<Jet> jet_sin(double omega, std::span<const Jet> in);

}  // namespace gdgm

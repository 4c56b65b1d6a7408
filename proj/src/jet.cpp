#include "gdgm/jet.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gdgm/errors.hpp"

namespace gdgm {

Jet::Jet(double v, std::vector<double> g, std::vector<double> s)
    : value(v), grad(std::move(g)), second(std::move(s)) {
  if (grad.size() != second.size() || grad.empty()) {
    fail(ErrorKind::Shape, "jet: grad and second must share a length >= 1");
  }
}

Jet Jet::constant(double v, std::size_t dim) {
  return Jet(v, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0));
}

double Jet::laplacian() const noexcept {
  return std::accumulate(second.begin(), second.end(), 0.0);
}

Jet operator+(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::Shape, "jet: dimension mismatch in sum");
  Jet out = a;
  out.value += b.value;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out.grad[i] += b.grad[i];
    out.second[i] += b.second[i];
  }
  return out;
}

Jet operator*(double a, const Jet& j) {
  Jet out = j;
  out.value *= a;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out.grad[i] *= a;
    out.second[i] *= a;
  }
  return out;
}

std::vector<Jet> seed_jets(std::span<const double> x) {
  if (x.empty()) fail(ErrorKind::InvalidInput, "seed_jets: empty point");
  std::vector<Jet> jets;
  jets.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      fail(ErrorKind::InvalidInput,
           "seed_jets: coordinate " + std::to_string(i) + " is not finite");
    }
    Jet j = Jet::constant(x[i], x.size());
    j.grad[i] = 1.0;
    jets.push_back(std::move(j));
  }
  return jets;
}

std::vector<Jet> jet_affine(const Eigen::MatrixXd& weight,
                            const Eigen::VectorXd& bias,
                            std::span<const Jet> in) {
  if (static_cast<Eigen::Index>(in.size()) != weight.cols() ||
      bias.size() != weight.rows()) {
    fail(ErrorKind::Shape, "jet_affine: expected " + std::to_string(weight.cols()) +
                               " input jets, got " + std::to_string(in.size()));
  }
  if (in.empty()) fail(ErrorKind::Shape, "jet_affine: no input jets");
  const std::size_t d = in.front().dim();
  for (const Jet& j : in) {
    if (j.dim() != d) fail(ErrorKind::Shape, "jet_affine: input jets disagree on dimension");
  }
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(weight.rows()));
  for (Eigen::Index r = 0; r < weight.rows(); ++r) {
    Jet o = Jet::constant(bias(r), d);
    for (Eigen::Index c = 0; c < weight.cols(); ++c) {
      const double w = weight(r, c);
      const Jet& j = in[static_cast<std::size_t>(c)];
      o.value += w * j.value;
      for (std::size_t i = 0; i < d; ++i) {
        o.grad[i] += w * j.grad[i];
        o.second[i] += w * j.second[i];
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Jet> jet_sin(double omega, std::span<const Jet> in) {
  std::vector<Jet> out;
  out.reserve(in.size());
  for (const Jet& u : in) {
    const double s = std::sin(omega * u.value);
    const double c = std::cos(omega * u.value);
    Jet o = Jet::constant(s, u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
      o.grad[i] = omega * c * u.grad[i];
      o.second[i] = -omega * omega * s * u.grad[i] * u.grad[i] + omega * c * u.second[i];
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace gdgm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdgm/jet.hpp"

namespace gdgm {

// Identity is a diagnostic activation only: it turns the network into an
// affine map whose Laplacian vanishes identically.
enum class Activation { Sine, Identity };

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Frozen Gaussian random Fourier features x -> [cos(2 pi B x), sin(2 pi B x)].
struct FourierFeatureMap {
  Eigen::MatrixXd frequencies;  // B, n x d
  double sigma = 1.0;

  int features() const noexcept { return static_cast<int>(frequencies.rows()); }
  int input_dim() const noexcept { return static_cast<int>(frequencies.cols()); }
  int output_dim() const noexcept { return 2 * features(); }
};

// Sine-activated MLP N(x; theta) with scalar output. Every layer except the
// last applies sin(omega0 * (W a + b)); the last layer is affine.
struct Network {
  int input_dim = 0;
  double omega0 = 30.0;
  Activation activation = Activation::Sine;
  std::optional<FourierFeatureMap> fourier;
  std::vector<Layer> layers;

  // Throws a shape or config error when the invariants do not hold.
  void validate() const;
  std::size_t parameter_count() const;
  int hidden_layers() const noexcept { return static_cast<int>(layers.size()) - 1; }
};

struct ArchitectureConfig {
  int hidden_layers = 5;
  int width = 128;
  double omega0 = 30.0;
  bool fourier_enabled = false;
  double fourier_sigma = 1.0;
  int fourier_n = 256;
};

Network init_siren(int input_dim, int hidden_layers, int width, double omega0,
                   std::uint64_t seed);

FourierFeatureMap sample_fourier_map(int input_dim, int features, double sigma,
                                     std::uint64_t seed);

// Builds a freshly initialised network (and Fourier map, if enabled) for the
// given architecture. Map and weights use independent streams of `seed`.
Network make_network(const ArchitectureConfig& arch, int input_dim, std::uint64_t seed);

Eigen::VectorXd apply_fourier(const FourierFeatureMap& map, std::span<const double> x);
std::vector<Jet> apply_fourier(const FourierFeatureMap& map, std::span<const Jet> x);

double evaluate(const Network& net, std::span<const double> x);

struct PointDerivatives {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double laplacian = 0.0;
};

PointDerivatives forward_with_laplacian(const Network& net, std::span<const double> x);

// Reference implementation through the scalar jet operations; slow, used to
// cross-check the batched engine.
Jet forward_jet(const Network& net, std::span<const double> x);

// ---------------------------------------------------------------------------
// Batched engine. Points are stored column-wise (d x P).

struct BatchOutput {
  Eigen::RowVectorXd value;      // 1 x P
  Eigen::MatrixXd gradient;      // d x P, empty without derivatives
  Eigen::RowVectorXd laplacian;  // 1 x P, empty without derivatives
};

// d(loss)/d(output). Entries left at zero contribute nothing.
struct OutputAdjoint {
  Eigen::RowVectorXd value;
  Eigen::MatrixXd gradient;
  Eigen::RowVectorXd laplacian;
};

struct ParameterGradient {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  static ParameterGradient zeros_like(const Network& net);

  ParameterGradient& operator+=(const ParameterGradient& other);
  ParameterGradient& operator*=(double scale);

  // Layer order, weights row-major followed by the bias of the same layer.
  Eigen::VectorXd flatten() const;
  bool all_finite() const;
  bool congruent_with(const Network& net) const;
};

Eigen::VectorXd flatten_parameters(const Network& net);
void assign_parameters(Network& net, const Eigen::VectorXd& flat);

// Records a forward pass over a batch so parameter gradients of any loss
// built from the outputs can be pulled back exactly.
class ForwardTape {
 public:
  ForwardTape(const Network& net, const Eigen::MatrixXd& points, bool derivatives);

  const BatchOutput& output() const noexcept { return output_; }
  bool has_derivatives() const noexcept { return derivatives_; }
  OutputAdjoint zero_adjoint() const;

  // Accumulates into `grad`; the tape itself is left untouched.
  void backward(const OutputAdjoint& adjoint, ParameterGradient& grad) const;

 private:
  struct Stage {
    Eigen::MatrixXd value;
    std::vector<Eigen::MatrixXd> first;
    std::vector<Eigen::MatrixXd> second;
  };

  const Network& net_;
  bool derivatives_;
  int dim_;
  std::vector<Stage> inputs_;  // input to layer l
  std::vector<Stage> pre_;     // pre-activation of hidden layer l
  BatchOutput output_;
};

BatchOutput forward_batch(const Network& net, const Eigen::MatrixXd& points,
                          bool derivatives);

using LossEvaluator = std::function<double(const BatchOutput&, OutputAdjoint&)>;

struct LossGradient {
  double loss = 0.0;
  ParameterGradient grad;
};

// The evaluator returns the loss and writes d(loss)/d(outputs). Throws
// DivergedError (with the first offending point) on non-finite results.
LossGradient loss_param_gradient(const Network& net, const Eigen::MatrixXd& points,
                                 bool derivatives, const LossEvaluator& evaluator);

Eigen::MatrixXd to_matrix(std::span<const double> x);

inline std::span<const double> as_span(const Eigen::VectorXd& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

}  // namespace gdgm

#include "gdgm/network.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gdgm/errors.hpp"

namespace gdgm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

void check_point(const Network& net, Eigen::Index rows) {
  if (rows != net.input_dim) {
    fail(ErrorKind::Shape, "network expects dimension " + std::to_string(net.input_dim) +
                               ", got " + std::to_string(rows));
  }
}

}  // namespace

void Network::validate() const {
  if (input_dim < 1) fail(ErrorKind::InvalidConfig, "network: input dimension must be >= 1");
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    fail(ErrorKind::InvalidConfig, "network: omega0 must be positive");
  }
  if (layers.size() < 2) fail(ErrorKind::Shape, "network: need at least one hidden layer");
  Eigen::Index width = input_dim;
  if (fourier) {
    if (fourier->input_dim() != input_dim) {
      fail(ErrorKind::Shape, "network: Fourier map dimension does not match input");
    }
    if (!fourier->frequencies.allFinite()) {
      fail(ErrorKind::InvalidConfig, "network: Fourier frequencies must be finite");
    }
    width = fourier->output_dim();
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.weight.cols() != width || layer.bias.size() != layer.weight.rows()) {
      fail(ErrorKind::Shape, "network: layer " + std::to_string(l) + " does not compose");
    }
    width = layer.weight.rows();
  }
  if (width != 1) fail(ErrorKind::Shape, "network: output dimension must be 1");
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) {
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

Network init_siren(int input_dim, int hidden_layers, int width, double omega0,
                   std::uint64_t seed) {
  if (input_dim < 1 || hidden_layers < 1 || width < 1) {
    fail(ErrorKind::InvalidConfig, "init_siren: dimensions must be >= 1");
  }
  if (!(omega0 > 0.0)) fail(ErrorKind::InvalidConfig, "init_siren: omega0 must be positive");

  auto engine = make_engine(seed, 0);
  Network net;
  net.input_dim = input_dim;
  net.omega0 = omega0;
  int fan_in = input_dim;
  for (int l = 0; l <= hidden_layers; ++l) {
    const int fan_out = (l == hidden_layers) ? 1 : width;
    const double bound = (l == 0) ? 1.0 / fan_in : std::sqrt(6.0 / fan_in) / omega0;
    std::uniform_real_distribution<double> dist(-bound, bound);
    Layer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(engine);
    }
    net.layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return net;
}

FourierFeatureMap sample_fourier_map(int input_dim, int features, double sigma,
                                     std::uint64_t seed) {
  if (input_dim < 1 || features < 1) {
    fail(ErrorKind::InvalidConfig, "fourier map: dimension and feature count must be >= 1");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::InvalidConfig, "fourier map: sigma must be positive");
  }
  auto engine = make_engine(seed, 1);
  std::normal_distribution<double> dist(0.0, sigma);
  FourierFeatureMap map{Eigen::MatrixXd(features, input_dim), sigma};
  for (Eigen::Index r = 0; r < map.frequencies.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.frequencies.cols(); ++c) map.frequencies(r, c) = dist(engine);
  }
  return map;
}

Network make_network(const ArchitectureConfig& arch, int input_dim, std::uint64_t seed) {
  if (!arch.fourier_enabled) {
    return init_siren(input_dim, arch.hidden_layers, arch.width, arch.omega0, seed);
  }
  FourierFeatureMap map = sample_fourier_map(input_dim, arch.fourier_n, arch.fourier_sigma, seed);
  Network net = init_siren(map.output_dim(), arch.hidden_layers, arch.width, arch.omega0, seed);
  net.input_dim = input_dim;
  net.fourier = std::move(map);
  return net;
}

Eigen::VectorXd apply_fourier(const FourierFeatureMap& map, std::span<const double> x) {
  if (static_cast<int>(x.size()) != map.input_dim()) {
    fail(ErrorKind::Shape, "apply_fourier: dimension mismatch");
  }
  const Eigen::VectorXd z =
      kTwoPi * (map.frequencies * Eigen::Map<const Eigen::VectorXd>(x.data(), map.input_dim()));
  Eigen::VectorXd out(map.output_dim());
  out.head(map.features()) = z.array().cos();
  out.tail(map.features()) = z.array().sin();
  return out;
}

std::vector<Jet> apply_fourier(const FourierFeatureMap& map, std::span<const Jet> x) {
  if (static_cast<int>(x.size()) != map.input_dim()) {
    fail(ErrorKind::Shape, "apply_fourier: dimension mismatch");
  }
  const Eigen::MatrixXd scaled = kTwoPi * map.frequencies;
  const std::vector<Jet> z = jet_affine(scaled, Eigen::VectorXd::Zero(map.features()), x);
  std::vector<Jet> cosines;
  std::vector<Jet> sines;
  for (const Jet& zj : z) {
    const double c = std::cos(zj.value);
    const double s = std::sin(zj.value);
    Jet cj = Jet::constant(c, zj.dim());
    Jet sj = Jet::constant(s, zj.dim());
    for (std::size_t i = 0; i < zj.dim(); ++i) {
      const double g = zj.grad[i];
      const double h = zj.second[i];
      cj.grad[i] = -s * g;
      cj.second[i] = -c * g * g - s * h;
      sj.grad[i] = c * g;
      sj.second[i] = -s * g * g + c * h;
    }
    cosines.push_back(std::move(cj));
    sines.push_back(std::move(sj));
  }
  std::vector<Jet> out = std::move(cosines);
  out.insert(out.end(), sines.begin(), sines.end());
  return out;
}

Jet forward_jet(const Network& net, std::span<const double> x) {
  net.validate();
  check_point(net, static_cast<Eigen::Index>(x.size()));
  std::vector<Jet> act = seed_jets(x);
  if (net.fourier) act = apply_fourier(*net.fourier, act);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    std::vector<Jet> pre = jet_affine(net.layers[l].weight, net.layers[l].bias, act);
    if (l + 1 == net.layers.size()) return pre.front();
    act = net.activation == Activation::Sine ? jet_sin(net.omega0, pre) : std::move(pre);
  }
  return act.front();
}

// ---------------------------------------------------------------------------

ParameterGradient ParameterGradient::zeros_like(const Network& net) {
  ParameterGradient g;
  for (const Layer& layer : net.layers) {
    g.weight.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
  return g;
}

ParameterGradient& ParameterGradient::operator+=(const ParameterGradient& other) {
  if (other.weight.size() != weight.size()) fail(ErrorKind::Shape, "gradient: layer count mismatch");
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] += other.weight[l];
    bias[l] += other.bias[l];
  }
  return *this;
}

ParameterGradient& ParameterGradient::operator*=(double scale) {
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] *= scale;
    bias[l] *= scale;
  }
  return *this;
}

Eigen::VectorXd ParameterGradient::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weight.size(); ++l) n += weight[l].size() + bias[l].size();
  Eigen::VectorXd flat(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    for (Eigen::Index r = 0; r < weight[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weight[l].cols(); ++c) flat(k++) = weight[l](r, c);
    }
    for (Eigen::Index r = 0; r < bias[l].size(); ++r) flat(k++) = bias[l](r);
  }
  return flat;
}

bool ParameterGradient::all_finite() const {
  for (std::size_t l = 0; l < weight.size(); ++l) {
    if (!weight[l].allFinite() || !bias[l].allFinite()) return false;
  }
  return true;
}

bool ParameterGradient::congruent_with(const Network& net) const {
  if (weight.size() != net.layers.size() || bias.size() != net.layers.size()) return false;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    if (weight[l].rows() != net.layers[l].weight.rows() ||
        weight[l].cols() != net.layers[l].weight.cols() ||
        bias[l].size() != net.layers[l].bias.size()) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd flatten_parameters(const Network& net) {
  ParameterGradient view;
  for (const Layer& layer : net.layers) {
    view.weight.push_back(layer.weight);
    view.bias.push_back(layer.bias);
  }
  return view.flatten();
}

void assign_parameters(Network& net, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != net.parameter_count()) {
    fail(ErrorKind::Shape, "assign_parameters: wrong parameter count");
  }
  Eigen::Index k = 0;
  for (Layer& layer : net.layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = flat(k++);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = flat(k++);
  }
}

// ---------------------------------------------------------------------------

ForwardTape::ForwardTape(const Network& net, const Eigen::MatrixXd& points, bool derivatives)
    : net_(net), derivatives_(derivatives), dim_(net.input_dim) {
  net.validate();
  check_point(net, points.rows());
  const Eigen::Index count = points.cols();
  const int d = derivatives ? dim_ : 0;

  Stage cur;
  cur.value = points;
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(dim_, count);
    unit.row(i).setOnes();
    cur.first.push_back(std::move(unit));
    cur.second.push_back(Eigen::MatrixXd::Zero(dim_, count));
  }

  if (net.fourier) {
    const Eigen::MatrixXd scaled = kTwoPi * net.fourier->frequencies;
    const Eigen::Index n = net.fourier->features();
    const Eigen::ArrayXXd z = (scaled * cur.value).array();
    const Eigen::ArrayXXd cz = z.cos();
    const Eigen::ArrayXXd sz = z.sin();
    Stage mapped;
    mapped.value.resize(2 * n, count);
    mapped.value.topRows(n) = cz.matrix();
    mapped.value.bottomRows(n) = sz.matrix();
    for (int i = 0; i < d; ++i) {
      // The seeded input has zero curvature, so z'' vanishes.
      const Eigen::ArrayXXd zp = (scaled * cur.first[static_cast<std::size_t>(i)]).array();
      Eigen::MatrixXd first(2 * n, count);
      Eigen::MatrixXd second(2 * n, count);
      first.topRows(n) = (-sz * zp).matrix();
      first.bottomRows(n) = (cz * zp).matrix();
      second.topRows(n) = (-cz * zp * zp).matrix();
      second.bottomRows(n) = (-sz * zp * zp).matrix();
      mapped.first.push_back(std::move(first));
      mapped.second.push_back(std::move(second));
    }
    cur = std::move(mapped);
  }

  const double w = net.omega0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    Stage pre;
    pre.value = layer.weight * cur.value;
    pre.value.colwise() += layer.bias;
    for (int i = 0; i < d; ++i) {
      pre.first.push_back(layer.weight * cur.first[static_cast<std::size_t>(i)]);
      pre.second.push_back(layer.weight * cur.second[static_cast<std::size_t>(i)]);
    }
    inputs_.push_back(std::move(cur));

    if (l + 1 == net.layers.size()) {
      output_.value = pre.value.row(0);
      if (derivatives) {
        output_.gradient.resize(dim_, count);
        output_.laplacian = Eigen::RowVectorXd::Zero(count);
        for (int i = 0; i < d; ++i) {
          output_.gradient.row(i) = pre.first[static_cast<std::size_t>(i)].row(0);
          output_.laplacian += pre.second[static_cast<std::size_t>(i)].row(0);
        }
      }
      break;
    }

    Stage act;
    if (net.activation == Activation::Identity) {
      act = pre;
    } else {
      const Eigen::ArrayXXd s = (w * pre.value.array()).sin();
      const Eigen::ArrayXXd c = (w * pre.value.array()).cos();
      act.value = s.matrix();
      for (int i = 0; i < d; ++i) {
        const auto up = pre.first[static_cast<std::size_t>(i)].array();
        const auto upp = pre.second[static_cast<std::size_t>(i)].array();
        act.first.push_back((w * c * up).matrix());
        act.second.push_back((-w * w * s * up * up + w * c * upp).matrix());
      }
    }
    pre_.push_back(std::move(pre));
    cur = std::move(act);
  }
}

OutputAdjoint ForwardTape::zero_adjoint() const {
  const Eigen::Index count = output_.value.size();
  OutputAdjoint adj;
  adj.value = Eigen::RowVectorXd::Zero(count);
  if (derivatives_) {
    adj.gradient = Eigen::MatrixXd::Zero(dim_, count);
    adj.laplacian = Eigen::RowVectorXd::Zero(count);
  }
  return adj;
}

void ForwardTape::backward(const OutputAdjoint& adjoint, ParameterGradient& grad) const {
  if (!grad.congruent_with(net_)) fail(ErrorKind::Shape, "backward: gradient shape mismatch");
  const Eigen::Index count = output_.value.size();
  if (adjoint.value.size() != count) fail(ErrorKind::Shape, "backward: adjoint size mismatch");
  const int d = derivatives_ ? dim_ : 0;
  if (derivatives_ && (adjoint.laplacian.size() != count || adjoint.gradient.rows() != dim_ ||
                       adjoint.gradient.cols() != count)) {
    fail(ErrorKind::Shape, "backward: derivative adjoint size mismatch");
  }

  Stage adj;
  adj.value = adjoint.value;
  for (int i = 0; i < d; ++i) {
    adj.first.emplace_back(adjoint.gradient.row(i));
    adj.second.emplace_back(adjoint.laplacian);
  }

  const double w = net_.omega0;
  for (std::size_t l = net_.layers.size(); l-- > 0;) {
    const Layer& layer = net_.layers[l];
    const Stage& in = inputs_[l];
    grad.weight[l].noalias() += adj.value * in.value.transpose();
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      grad.weight[l].noalias() += adj.first[k] * in.first[k].transpose();
      grad.weight[l].noalias() += adj.second[k] * in.second[k].transpose();
    }
    grad.bias[l] += adj.value.rowwise().sum();
    if (l == 0) break;

    Stage up;
    up.value = layer.weight.transpose() * adj.value;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      up.first.push_back(layer.weight.transpose() * adj.first[k]);
      up.second.push_back(layer.weight.transpose() * adj.second[k]);
    }

    if (net_.activation == Activation::Identity) {
      adj = std::move(up);
      continue;
    }

    const Stage& pre = pre_[l - 1];
    const Eigen::ArrayXXd s = (w * pre.value.array()).sin();
    const Eigen::ArrayXXd c = (w * pre.value.array()).cos();
    Stage down;
    Eigen::ArrayXXd value_bar = w * c * up.value.array();
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto u1 = pre.first[k].array();
      const auto u2 = pre.second[k].array();
      const auto a1 = up.first[k].array();
      const auto a2 = up.second[k].array();
      value_bar += -w * w * s * u1 * a1 + a2 * (-w * w * w * c * u1 * u1 - w * w * s * u2);
      down.first.push_back((a1 * w * c - 2.0 * w * w * s * u1 * a2).matrix());
      down.second.push_back((a2 * w * c).matrix());
    }
    down.value = value_bar.matrix();
    adj = std::move(down);
  }
}

BatchOutput forward_batch(const Network& net, const Eigen::MatrixXd& points, bool derivatives) {
  return ForwardTape(net, points, derivatives).output();
}

Eigen::MatrixXd to_matrix(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

double evaluate(const Network& net, std::span<const double> x) {
  return forward_batch(net, to_matrix(x), false).value(0);
}

PointDerivatives forward_with_laplacian(const Network& net, std::span<const double> x) {
  const BatchOutput out = forward_batch(net, to_matrix(x), true);
  return {out.value(0), out.gradient.col(0), out.laplacian(0)};
}

LossGradient loss_param_gradient(const Network& net, const Eigen::MatrixXd& points,
                                 bool derivatives, const LossEvaluator& evaluator) {
  ForwardTape tape(net, points, derivatives);
  OutputAdjoint adjoint = tape.zero_adjoint();
  LossGradient result;
  result.loss = evaluator(tape.output(), adjoint);
  result.grad = ParameterGradient::zeros_like(net);
  if (std::isfinite(result.loss)) tape.backward(adjoint, result.grad);
  if (!std::isfinite(result.loss) || !result.grad.all_finite()) {
    long bad = -1;
    const BatchOutput& out = tape.output();
    for (Eigen::Index p = 0; p < out.value.size() && bad < 0; ++p) {
      bool finite = std::isfinite(out.value(p)) && std::isfinite(adjoint.value(p));
      if (derivatives) {
        finite = finite && std::isfinite(out.laplacian(p)) && out.gradient.col(p).allFinite() &&
                 std::isfinite(adjoint.laplacian(p));
      }
      if (!finite) bad = static_cast<long>(p);
    }
    throw DivergedError("non-finite loss or gradient (batch index " + std::to_string(bad) + ")",
                        bad);
  }
  return result;
}

}  // namespace gdgm

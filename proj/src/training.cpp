#include "gdgm/training.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "gdgm/evaluation.hpp"

namespace gdgm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Eigen::RowVectorXd field_values(const Eigen::MatrixXd& points, const ScalarField& field) {
  Eigen::RowVectorXd out(points.cols());
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const Eigen::VectorXd x = points.col(p);
    out(p) = field(as_span(x));
  }
  return out;
}

// Interior residuals F_k[N_k] over a batch given the candidate's outputs.
Eigen::RowVectorXd interior_residuals(const CorrectionStack& stack, const FieldValues& frozen,
                                      const Eigen::RowVectorXd& value,
                                      const Eigen::RowVectorXd& laplacian,
                                      const Eigen::RowVectorXd& source) {
  const Nonlinearity& b = stack.problem().nonlinear;
  Eigen::RowVectorXd r = frozen.laplacian + laplacian - source;
  if (b.active()) {
    for (Eigen::Index p = 0; p < r.size(); ++p) r(p) += b(frozen.value(p) + value(p));
  }
  return r;
}

void check_region(const SampleBatch& batch, Region expected, const char* what) {
  if (batch.region != expected) fail(ErrorKind::InvalidInput, std::string(what) + ": wrong region");
  if (batch.size() < 1) fail(ErrorKind::InvalidInput, std::string(what) + ": empty batch");
}

}  // namespace

void TrainConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    fail(ErrorKind::InvalidConfig, "key '" + key + "': " + why);
  };
  if (Nb < 1) bad("train.Nb", "must be >= 1");
  if (M <= Nb) bad("train.Nb", "must be less than train.M");
  if (epochs < 0) bad("train.epochs", "must be >= 0");
  if (!(eta > 0.0)) bad("train.eta", "must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) bad("adam.beta1", "must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) bad("adam.beta2", "must lie in [0, 1)");
  if (!(adam.eps > 0.0)) bad("adam.eps", "must be positive");
  if (K < 0) bad("ec.K", "must be >= 0");
  if (eval_points < 1) bad("eval.points", "must be >= 1");
  if (log_every < 1) bad("train.log_every", "must be >= 1");
}

AdamState AdamState::for_network(const Network& net) {
  return {ParameterGradient::zeros_like(net), ParameterGradient::zeros_like(net), 0};
}

void adam_step(AdamState& state, Network& net, const ParameterGradient& grad, double eta,
               const AdamConfig& adam) {
  if (!grad.congruent_with(net) || !state.m.congruent_with(net)) {
    fail(ErrorKind::Shape, "adam_step: gradient and parameters are not congruent");
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(state.t));
  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = adam.beta1 * m + (1.0 - adam.beta1) * g;
    v = adam.beta2 * v + (1.0 - adam.beta2) * g.cwiseProduct(g);
    theta.array() -= eta * (m.array() / c1) / ((v.array() / c2).sqrt() + adam.eps);
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    update(net.layers[l].weight, state.m.weight[l], state.v.weight[l], grad.weight[l]);
    update(net.layers[l].bias, state.m.bias[l], state.v.bias[l], grad.bias[l]);
  }
}

LossTerms minibatch_loss(const CorrectionStack& stack, const StackMember& candidate,
                         const SampleBatch& interior, const SampleBatch& boundary) {
  check_region(interior, Region::Interior, "minibatch_loss");
  check_region(boundary, Region::Boundary, "minibatch_loss");
  const PdeProblem& problem = stack.problem();

  const FieldValues frozen_in = stack.fields(interior.points, true);
  const FieldValues cand_in = member_fields(candidate, interior.points, true);
  const Eigen::RowVectorXd r =
      interior_residuals(stack, frozen_in, cand_in.value, cand_in.laplacian,
                         field_values(interior.points, problem.source));

  const FieldValues frozen_bd = stack.fields(boundary.points, false);
  const FieldValues cand_bd = member_fields(candidate, boundary.points, false);
  const Eigen::RowVectorXd e =
      cand_bd.value + frozen_bd.value - field_values(boundary.points, problem.boundary);

  LossTerms loss{r.squaredNorm() / static_cast<double>(r.size()),
                 e.squaredNorm() / static_cast<double>(e.size())};
  if (!std::isfinite(loss.interior) || !std::isfinite(loss.boundary)) {
    long bad = -1;
    for (Eigen::Index p = 0; p < r.size() && bad < 0; ++p) {
      if (!std::isfinite(r(p))) bad = static_cast<long>(p);
    }
    throw DivergedError("minibatch_loss: non-finite loss", bad);
  }
  return loss;
}

ObjectiveGradient objective_gradient(const CorrectionStack& stack, const Network& candidate,
                                     const Eigen::MatrixXd& interior,
                                     const Eigen::VectorXd& interior_weights,
                                     const Eigen::MatrixXd& boundary,
                                     const Eigen::VectorXd& boundary_weights) {
  if (interior_weights.size() != interior.cols() || boundary_weights.size() != boundary.cols()) {
    fail(ErrorKind::Shape, "objective_gradient: weights do not match point counts");
  }
  const PdeProblem& problem = stack.problem();
  const Nonlinearity& b = problem.nonlinear;
  ObjectiveGradient out;

  const FieldValues frozen_in = stack.fields(interior, true);
  const Eigen::RowVectorXd source = field_values(interior, problem.source);
  LossGradient in = loss_param_gradient(
      candidate, interior, true, [&](const BatchOutput& o, OutputAdjoint& adj) {
        const Eigen::RowVectorXd r =
            interior_residuals(stack, frozen_in, o.value, o.laplacian, source);
        const Eigen::RowVectorXd wr = 2.0 * interior_weights.transpose().cwiseProduct(r);
        adj.laplacian = wr;
        if (b.active()) {
          for (Eigen::Index p = 0; p < r.size(); ++p) {
            adj.value(p) = wr(p) * b.slope(frozen_in.value(p) + o.value(p));
          }
        }
        return interior_weights.dot(r.cwiseProduct(r).transpose());
      });

  const FieldValues frozen_bd = stack.fields(boundary, false);
  const Eigen::RowVectorXd g = field_values(boundary, problem.boundary);
  LossGradient bd = loss_param_gradient(
      candidate, boundary, false, [&](const BatchOutput& o, OutputAdjoint& adj) {
        const Eigen::RowVectorXd e = o.value + frozen_bd.value - g;
        adj.value = 2.0 * boundary_weights.transpose().cwiseProduct(e);
        return boundary_weights.dot(e.cwiseProduct(e).transpose());
      });

  out.loss = {in.loss, bd.loss};
  out.grad = std::move(in.grad);
  out.grad += bd.grad;
  return out;
}

ObjectiveGradient minibatch_gradient(const CorrectionStack& stack, const Network& candidate,
                                     const SampleBatch& interior, const SampleBatch& boundary) {
  check_region(interior, Region::Interior, "minibatch_gradient");
  check_region(boundary, Region::Boundary, "minibatch_gradient");
  const Eigen::VectorXd wi =
      Eigen::VectorXd::Constant(interior.size(), 1.0 / static_cast<double>(interior.size()));
  const Eigen::VectorXd wb =
      Eigen::VectorXd::Constant(boundary.size(), 1.0 / static_cast<double>(boundary.size()));
  return objective_gradient(stack, candidate, interior.points, wi, boundary.points, wb);
}

std::uint64_t stage_seed(std::uint64_t seed, int stage) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stage) + 1));
}

StageResult train_stage(const CorrectionStack& stack, const ArchitectureConfig& arch,
                        const TrainConfig& config, int stage, const Eigen::MatrixXd* eval_set) {
  config.validate();
  if (stage < 0 || static_cast<std::size_t>(stage) != stack.size()) {
    fail(ErrorKind::InvalidInput, "train_stage: stack holds " + std::to_string(stack.size()) +
                                      " nets, expected " + std::to_string(stage));
  }
  const PdeProblem& problem = stack.problem();
  const std::uint64_t seed = stage_seed(config.seed, stage);
  StageResult result{make_network(arch, problem.dim(), seed), {}};
  Rng rng = make_rng(seed, 7);

  // Relative error of N^(k) on the fixed evaluation set; the frozen part of
  // the prediction is computed once per stage.
  Eigen::MatrixXd own_set;
  if (eval_set == nullptr && problem.exact) {
    own_set = evaluation_set(problem.domain, config.eval_points, config.seed);
    eval_set = &own_set;
  }
  Eigen::RowVectorXd frozen_pred;
  Eigen::RowVectorXd exact;
  if (problem.exact && eval_set != nullptr) {
    frozen_pred = stack.fields(*eval_set, false).value;
    exact = member_fields(*problem.exact, *eval_set, false).value;
  }
  auto current_error = [&]() {
    if (exact.size() == 0) return std::nan("");
    const Eigen::RowVectorXd pred = frozen_pred + forward_batch(result.net, *eval_set, false).value;
    return relative_error(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
                          std::span<const double>(exact.data(), static_cast<std::size_t>(exact.size())));
  };

  AdamState adam = AdamState::for_network(result.net);
  const auto start = std::chrono::steady_clock::now();
  for (long epoch = 0; epoch <= config.epochs; ++epoch) {
    const SampleBatch interior = sample_interior(problem.domain, config.M, rng);
    const SampleBatch boundary = sample_boundary(problem.domain, config.Nb, rng);
    const bool last = epoch == config.epochs;
    const bool logged = last || epoch % config.log_every == 0;

    LossTerms loss;
    ObjectiveGradient step;
    try {
      if (last) {
        loss = minibatch_loss(stack, result.net, interior, boundary);
      } else {
        step = minibatch_gradient(stack, result.net, interior, boundary);
        loss = step.loss;
      }
    } catch (const DivergedError& e) {
      throw DivergedError(std::string(e.what()) + " at stage " + std::to_string(stage) +
                              ", epoch " + std::to_string(epoch),
                          e.batch_index(), epoch);
    }

    if (logged) {
      EpochLog log;
      log.epoch = epoch;
      log.stage = stage;
      log.loss_interior = loss.interior;
      log.loss_boundary = loss.boundary;
      log.loss_total = loss.total();
      log.relative_error = current_error();
      log.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start).count();
      result.logs.push_back(log);
    }
    if (!last) adam_step(adam, result.net, step.grad, config.eta, config.adam);
  }
  return result;
}

StageFailure::StageFailure(const DivergedError& cause, int stage,
                           std::shared_ptr<CorrectionStack> partial)
    : DivergedError(cause.what(), cause.batch_index(), cause.epoch()),
      stage_(stage),
      partial_(std::move(partial)) {}

void extend_corrections(CorrectionStack& stack, const ArchitectureConfig& arch,
                        const TrainConfig& config, int extra) {
  config.validate();
  if (extra < 0) fail(ErrorKind::InvalidConfig, "extend_corrections: negative order count");
  Eigen::MatrixXd eval_set;
  if (stack.problem().exact) {
    eval_set = evaluation_set(stack.problem().domain, config.eval_points, config.seed);
  }
  const Eigen::MatrixXd* eval_ptr = stack.problem().exact ? &eval_set : nullptr;
  for (int i = 0; i < extra; ++i) {
    const int stage = static_cast<int>(stack.size());
    try {
      StageResult r = train_stage(stack, arch, config, stage, eval_ptr);
      stack.push(std::move(r.net), std::move(r.logs));
    } catch (const DivergedError& e) {
      throw StageFailure(e, stage, std::make_shared<CorrectionStack>(stack));
    }
  }
}

CorrectionStack run_error_correction(const PdeProblem& problem, const ArchitectureConfig& arch,
                                     const TrainConfig& config) {
  config.validate();
  CorrectionStack stack(problem);
  extend_corrections(stack, arch, config, config.K + 1);
  return stack;
}

}  // namespace gdgm

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gdgm/correction_stack.hpp"
#include "gdgm/epoch_log.hpp"
#include "gdgm/errors.hpp"
#include "gdgm/network.hpp"
#include "gdgm/sampling.hpp"

namespace gdgm {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  int M = 256;           // interior batch size
  int Nb = 64;           // boundary batch size
  long epochs = 1024;    // per stage; one fresh minibatch and one step each
  double eta = 1e-4;
  AdamConfig adam;
  std::uint64_t seed = 1;
  int K = 0;             // number of corrections after the base network
  int eval_points = 32768;
  int log_every = 1;

  void validate() const;
};

struct AdamState {
  ParameterGradient m;
  ParameterGradient v;
  long t = 0;

  static AdamState for_network(const Network& net);
};

// Bias-corrected Adam update of `net` in place.
void adam_step(AdamState& state, Network& net, const ParameterGradient& grad, double eta,
               const AdamConfig& adam = {});

struct LossTerms {
  double interior = 0.0;
  double boundary = 0.0;
  double total() const noexcept { return interior + boundary; }
};

// Mean squared F_k residual over the interior batch plus mean squared
// mismatch to g - N^(k-1) over the boundary batch.
LossTerms minibatch_loss(const CorrectionStack& stack, const StackMember& candidate,
                         const SampleBatch& interior, const SampleBatch& boundary);

struct ObjectiveGradient {
  LossTerms loss;
  ParameterGradient grad;
};

// sum_i w_i F_k[N_k](x_i)^2 + sum_j u_j (N_k(y_j) - g(y_j) + N^(k-1)(y_j))^2
// and its exact gradient with respect to the candidate's parameters.
ObjectiveGradient objective_gradient(const CorrectionStack& stack, const Network& candidate,
                                     const Eigen::MatrixXd& interior,
                                     const Eigen::VectorXd& interior_weights,
                                     const Eigen::MatrixXd& boundary,
                                     const Eigen::VectorXd& boundary_weights);

// objective_gradient with weights 1/M and 1/Nb.
ObjectiveGradient minibatch_gradient(const CorrectionStack& stack, const Network& candidate,
                                     const SampleBatch& interior, const SampleBatch& boundary);

struct StageResult {
  Network net;
  std::vector<EpochLog> logs;
};

// Seed used for stage k's network initialisation and sampling streams.
std::uint64_t stage_seed(std::uint64_t seed, int stage);

// Trains N_k against the stack's current correction problem. Requires the
// stack to hold exactly `stage` members. `eval_set` defaults to the run's
// seeded relative-error set when null.
StageResult train_stage(const CorrectionStack& stack, const ArchitectureConfig& arch,
                        const TrainConfig& config, int stage,
                        const Eigen::MatrixXd* eval_set = nullptr);

// Thrown when a stage diverges; carries the stack trained so far.
class StageFailure : public DivergedError {
 public:
  StageFailure(const DivergedError& cause, int stage, std::shared_ptr<CorrectionStack> partial);

  int stage() const noexcept { return stage_; }
  const CorrectionStack& partial() const noexcept { return *partial_; }

 private:
  int stage_;
  std::shared_ptr<CorrectionStack> partial_;
};

// Appends `extra` trained corrections to `stack`. Frozen members are never
// modified.
void extend_corrections(CorrectionStack& stack, const ArchitectureConfig& arch,
                        const TrainConfig& config, int extra);

// Stages 0..K in sequence, freezing each before the next.
CorrectionStack run_error_correction(const PdeProblem& problem, const ArchitectureConfig& arch,
                                     const TrainConfig& config);

}  // namespace gdgm

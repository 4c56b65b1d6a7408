#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gdgm/epoch_log.hpp"
#include "gdgm/network.hpp"
#include "gdgm/problem.hpp"

namespace gdgm {

// A stack entry is either a trained network or a closed-form stand-in
// (used to plant exact solutions in tests and pseudo-checkpoints).
using StackMember = std::variant<Network, ClosedForm>;

struct FieldValues {
  Eigen::RowVectorXd value;
  Eigen::RowVectorXd laplacian;  // empty when derivatives were not requested
};

PointDerivatives member_derivatives(const StackMember& member, std::span<const double> x);
double member_value(const StackMember& member, std::span<const double> x);
FieldValues member_fields(const StackMember& member, const Eigen::MatrixXd& points,
                          bool derivatives);
int member_input_dim(const StackMember& member);

// Frozen nets N_0 ... N_{k-1}; their sum is the current approximation N^(k-1).
class CorrectionStack {
 public:
  explicit CorrectionStack(PdeProblem problem);

  const PdeProblem& problem() const noexcept { return problem_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  void push(StackMember member, std::vector<EpochLog> logs = {});
  const StackMember& member(std::size_t k) const { return members_.at(k); }
  const std::vector<EpochLog>& logs(std::size_t k) const { return logs_.at(k); }
  std::vector<EpochLog> all_logs() const;

  // Sum of the first `prefix` members (all of them by default).
  double evaluate(std::span<const double> x) const { return evaluate(x, size()); }
  double evaluate(std::span<const double> x, std::size_t prefix) const;
  FieldValues fields(const Eigen::MatrixXd& points, bool derivatives) const {
    return fields(points, size(), derivatives);
  }
  FieldValues fields(const Eigen::MatrixXd& points, std::size_t prefix, bool derivatives) const;

 private:
  PdeProblem problem_;
  std::vector<StackMember> members_;
  std::vector<std::vector<EpochLog>> logs_;
};

// F_k[N_k](x) through F_0 of the summed approximation N^(k-1) + N_k.
double residual_Fk(const CorrectionStack& stack, const StackMember& candidate,
                   std::span<const double> x);

// F_k[N_k](x) = F_{k-1}[N_{k-1}] + Lap N_k - B[N^(k-1)] + B[N^(k-1) + N_k],
// unrolled from F_0[N_0]. Independent of residual_Fk; used to cross-check it.
double residual_Fk_recursive(const CorrectionStack& stack, const StackMember& candidate,
                             std::span<const double> x);

// g(y) - N^(k-1)(y): the Dirichlet data for the next correction.
double boundary_target_k(const CorrectionStack& stack, std::span<const double> y);

}  // namespace gdgm

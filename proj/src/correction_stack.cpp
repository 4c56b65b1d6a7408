#include "gdgm/correction_stack.hpp"

#include "gdgm/errors.hpp"

namespace gdgm {

PointDerivatives member_derivatives(const StackMember& member, std::span<const double> x) {
  if (const auto* net = std::get_if<Network>(&member)) return forward_with_laplacian(*net, x);
  const auto& closed = std::get<ClosedForm>(member);
  // The gradient is not carried for closed forms; nothing downstream reads it.
  return {closed.value(x), Eigen::VectorXd(), closed.laplacian(x)};
}

double member_value(const StackMember& member, std::span<const double> x) {
  if (const auto* net = std::get_if<Network>(&member)) return evaluate(*net, x);
  return std::get<ClosedForm>(member).value(x);
}

FieldValues member_fields(const StackMember& member, const Eigen::MatrixXd& points,
                          bool derivatives) {
  if (const auto* net = std::get_if<Network>(&member)) {
    BatchOutput out = forward_batch(*net, points, derivatives);
    return {std::move(out.value), std::move(out.laplacian)};
  }
  const auto& closed = std::get<ClosedForm>(member);
  FieldValues f;
  f.value.resize(points.cols());
  if (derivatives) f.laplacian.resize(points.cols());
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const Eigen::VectorXd x = points.col(p);
    f.value(p) = closed.value(as_span(x));
    if (derivatives) f.laplacian(p) = closed.laplacian(as_span(x));
  }
  return f;
}

int member_input_dim(const StackMember& member) {
  if (const auto* net = std::get_if<Network>(&member)) return net->input_dim;
  return -1;
}

CorrectionStack::CorrectionStack(PdeProblem problem) : problem_(std::move(problem)) {
  problem_.domain.validate();
}

void CorrectionStack::push(StackMember member, std::vector<EpochLog> logs) {
  const int dim = member_input_dim(member);
  if (dim >= 0 && dim != problem_.dim()) {
    fail(ErrorKind::Shape, "correction stack: member dimension " + std::to_string(dim) +
                               " does not match problem dimension " +
                               std::to_string(problem_.dim()));
  }
  members_.push_back(std::move(member));
  logs_.push_back(std::move(logs));
}

std::vector<EpochLog> CorrectionStack::all_logs() const {
  std::vector<EpochLog> out;
  for (const auto& stage : logs_) out.insert(out.end(), stage.begin(), stage.end());
  return out;
}

double CorrectionStack::evaluate(std::span<const double> x, std::size_t prefix) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < prefix && k < members_.size(); ++k) {
    sum += member_value(members_[k], x);
  }
  return sum;
}

FieldValues CorrectionStack::fields(const Eigen::MatrixXd& points, std::size_t prefix,
                                    bool derivatives) const {
  FieldValues sum;
  sum.value = Eigen::RowVectorXd::Zero(points.cols());
  if (derivatives) sum.laplacian = Eigen::RowVectorXd::Zero(points.cols());
  for (std::size_t k = 0; k < prefix && k < members_.size(); ++k) {
    const FieldValues f = member_fields(members_[k], points, derivatives);
    sum.value += f.value;
    if (derivatives) sum.laplacian += f.laplacian;
  }
  return sum;
}

double residual_Fk(const CorrectionStack& stack, const StackMember& candidate,
                   std::span<const double> x) {
  if (stack.empty()) fail(ErrorKind::StackUnderflow, "residual_Fk: stack holds no frozen nets");
  double value = 0.0;
  double laplacian = 0.0;
  for (std::size_t j = 0; j < stack.size(); ++j) {
    const PointDerivatives m = member_derivatives(stack.member(j), x);
    value += m.value;
    laplacian += m.laplacian;
  }
  const PointDerivatives c = member_derivatives(candidate, x);
  return residual_F0(stack.problem(), value + c.value, laplacian + c.laplacian, x);
}

double residual_Fk_recursive(const CorrectionStack& stack, const StackMember& candidate,
                             std::span<const double> x) {
  if (stack.empty()) {
    fail(ErrorKind::StackUnderflow, "residual_Fk_recursive: stack holds no frozen nets");
  }
  const PdeProblem& problem = stack.problem();
  const PointDerivatives first = member_derivatives(stack.member(0), x);
  double previous = residual_F0(problem, first.value, first.laplacian, x);
  double partial_sum = first.value;
  auto step = [&](const StackMember& member) {
    const PointDerivatives m = member_derivatives(member, x);
    previous = previous + m.laplacian - problem.nonlinear(partial_sum) +
               problem.nonlinear(partial_sum + m.value);
    partial_sum += m.value;
  };
  for (std::size_t j = 1; j < stack.size(); ++j) step(stack.member(j));
  step(candidate);
  return previous;
}

double boundary_target_k(const CorrectionStack& stack, std::span<const double> y) {
  return stack.problem().boundary(y) - stack.evaluate(y);
}

}  // namespace gdgm

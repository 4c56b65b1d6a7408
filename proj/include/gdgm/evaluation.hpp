#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdgm/correction_stack.hpp"
#include "gdgm/epoch_log.hpp"
#include "gdgm/problem.hpp"
#include "gdgm/training.hpp"

namespace gdgm {

// sum (phi - predict)^2 / sum phi^2 over S.
double relative_error(std::span<const double> predicted, std::span<const double> exact);
double relative_error(const ScalarField& predict, const ScalarField& phi,
                      const Eigen::MatrixXd& points);

// Gradient of the trapezoid approximation of
//   J = int (F_k[N])^2 dnu_1 + int (N - g + N^(k-1))^2 dnu_2
// with nu_1, nu_2 the uniform probability measures on the box and its
// boundary. Only d <= 2 is supported.
ObjectiveGradient quadrature_objective_gradient(const CorrectionStack& stack,
                                                const Network& candidate, int resolution);
ObjectiveGradient quadrature_objective_gradient(const PdeProblem& problem, const Network& net,
                                                int resolution);

struct FieldTable {
  Eigen::MatrixXd points;  // d x P
  Eigen::RowVectorXd values;
};

// Writes `<base>.svg` (heatmap over the two free axes of the grid) and
// `<base>.csv` (x,y[,z],value rows at 17 significant digits).
void export_field(const Eigen::MatrixXd& grid, const Eigen::RowVectorXd& values,
                  const std::filesystem::path& base);
void export_field(const ScalarField& predict, const Eigen::MatrixXd& grid,
                  const std::filesystem::path& base);
FieldTable read_field_values(const std::filesystem::path& csv);

inline constexpr const char* kLogHeader =
    "epoch,stage,loss_interior,loss_boundary,loss_total,relative_error,wall_ms";

// With `append`, rows are added to an existing file (the header is only
// written when the file is new or empty).
void write_logs(const std::vector<EpochLog>& logs, const std::filesystem::path& path,
                bool append = false);
std::vector<EpochLog> read_logs(const std::filesystem::path& path);

struct EvalReport {
  double relative_error = std::nan("");
  std::size_t point_count = 0;
  std::vector<double> stage_final_losses;
  std::vector<double> stage_relative_errors;  // error of N^(k) for each prefix k
};

EvalReport make_report(const CorrectionStack& stack, const Eigen::MatrixXd& eval_set);

}  // namespace gdgm

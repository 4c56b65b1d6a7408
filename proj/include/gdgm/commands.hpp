#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gdgm/checkpoint.hpp"
#include "gdgm/config.hpp"
#include "gdgm/evaluation.hpp"

namespace gdgm {

// File names written into the run directory.
inline constexpr const char* kCheckpointFile = "checkpoint.gdgm";
inline constexpr const char* kLogFile = "logs.csv";
inline constexpr const char* kRunLogFile = "run.log";
inline constexpr const char* kReportFile = "report.txt";
inline constexpr const char* kSweepFile = "sweep_sigma.csv";

// Trains N_0 ... N_K and writes checkpoint, logs and field exports into
// config.out_dir. Progress and the config echo go to `log`.
CorrectionStack cmd_train(const RunConfig& config, std::ostream& log);

// Appends `extra_orders` corrections to a saved stack. Frozen members are
// carried over verbatim; new log rows are appended to logs.csv.
CorrectionStack cmd_correct(const RunConfig& config, const std::filesystem::path& checkpoint,
                            int extra_orders, std::ostream& log);

struct SweepRow {
  double sigma = 0.0;
  double final_loss = std::nan("");
  double relative_error = std::nan("");
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> selected;  // sigma with the lowest relative error
};

// One run per distinct sigma with identical seeds. A failing run is
// recorded and the sweep continues.
SweepResult cmd_sweep_sigma(const RunConfig& config, std::vector<double> sigmas,
                            std::ostream& log);

EvalReport cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint,
                    std::ostream& log);

// Field exports for every prefix N^(k) of the stack, plus the closed form.
void cmd_plot(const RunConfig& config, const std::filesystem::path& checkpoint,
              std::ostream& log);

// The grid used for field exports: 3D problems are sliced at the configured
// axes (default z = pi/10).
Eigen::MatrixXd plot_grid(const RunConfig& config, const PdeProblem& problem);

std::string format_report(const std::string& problem, const EvalReport& report);

}  // namespace gdgm

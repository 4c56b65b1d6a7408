#include "gdgm/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "gdgm/errors.hpp"

namespace gdgm {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::filesystem::path in_out(const RunConfig& config, const char* name) {
  return config.out_dir / name;
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::ios::openmode mode = std::ios::trunc) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::out | mode);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void echo(const RunConfig& config, const std::string& verb, std::ostream& log) {
  const std::string text = "# solver " + verb + "\n" + echo_config(config);
  log << text;
  write_text(in_out(config, kRunLogFile), text, std::ios::app);
}

// Exports N^(K) (and the closed form when registered) on the plot grid.
void export_fields(const RunConfig& config, const CorrectionStack& stack, std::ostream& log,
                   bool every_prefix) {
  const PdeProblem& problem = stack.problem();
  if (problem.dim() < 2) {
    log << "notice: field export needs a 2D grid; skipped for " << problem.name << "\n";
    return;
  }
  const Eigen::MatrixXd grid = plot_grid(config, problem);
  const std::size_t first = every_prefix ? 1 : stack.size();
  for (std::size_t k = first; k <= stack.size(); ++k) {
    if (k == 0) continue;
    const Eigen::RowVectorXd values = stack.fields(grid, k, false).value;
    const auto base = config.out_dir / ("field_N" + std::to_string(k - 1));
    export_field(grid, values, base);
    log << "wrote " << base.string() << ".svg\n";
  }
  if (problem.exact) {
    export_field(grid, member_fields(*problem.exact, grid, false).value, config.out_dir / "field_exact");
  }
}

Eigen::MatrixXd relative_error_set(const RunConfig& config, const PdeProblem& problem,
                                   std::uint64_t seed) {
  return evaluation_set(problem.domain, config.train.eval_points, seed);
}

}  // namespace

Eigen::MatrixXd plot_grid(const RunConfig& config, const PdeProblem& problem) {
  SliceSpec slice = config.slice;
  if (problem.dim() == 3 && slice.empty()) slice[2] = std::numbers::pi / 10.0;
  return eval_grid(problem.domain, config.eval_resolution, slice);
}

CorrectionStack cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  echo(config, "train", log);
  const PdeProblem problem = builtin_problem(config.problem);
  CorrectionStack stack(problem);
  try {
    extend_corrections(stack, config.arch, config.train, config.train.K + 1);
  } catch (const StageFailure& failure) {
    // Keep whatever finished before the failing stage.
    if (!failure.partial().empty()) {
      save_checkpoint(failure.partial(), config.train.seed, in_out(config, kCheckpointFile));
      write_logs(failure.partial().all_logs(), in_out(config, kLogFile));
    }
    throw;
  }
  save_checkpoint(stack, config.train.seed, in_out(config, kCheckpointFile));
  write_logs(stack.all_logs(), in_out(config, kLogFile));
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const EpochLog& last = stack.logs(k).back();
    log << "stage " << k << ": loss " << fmt17(last.loss_total) << ", relative error "
        << fmt17(last.relative_error) << "\n";
  }
  export_fields(config, stack, log, false);
  return stack;
}

CorrectionStack cmd_correct(const RunConfig& config, const std::filesystem::path& checkpoint,
                            int extra_orders, std::ostream& log) {
  config.validate();
  if (extra_orders < 1) fail(ErrorKind::InvalidConfig, "extra orders must be >= 1");
  echo(config, "correct", log);
  Checkpoint cp = load_checkpoint(checkpoint);
  if (cp.stack.problem().name != config.problem) {
    log << "warning: checkpoint problem " << cp.stack.problem().name
        << " overrides config problem " << config.problem << "\n";
  }
  const std::size_t before = cp.stack.size();
  try {
    extend_corrections(cp.stack, config.arch, config.train, extra_orders);
  } catch (const StageFailure& failure) {
    save_checkpoint(failure.partial(), config.train.seed, in_out(config, kCheckpointFile));
    throw;
  }
  save_checkpoint(cp.stack, config.train.seed, in_out(config, kCheckpointFile));
  std::vector<EpochLog> fresh;
  for (std::size_t k = before; k < cp.stack.size(); ++k) {
    fresh.insert(fresh.end(), cp.stack.logs(k).begin(), cp.stack.logs(k).end());
  }
  write_logs(fresh, in_out(config, kLogFile), true);
  log << "stack now holds " << cp.stack.size() << " networks\n";
  export_fields(config, cp.stack, log, false);
  return std::move(cp.stack);
}

SweepResult cmd_sweep_sigma(const RunConfig& config, std::vector<double> sigmas,
                            std::ostream& log) {
  config.validate();
  if (sigmas.empty()) fail(ErrorKind::InvalidConfig, "sweep needs at least one sigma");
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::InvalidConfig, "sigmas must be positive");
  }
  std::vector<double> distinct;
  for (double s : sigmas) {
    if (std::find(distinct.begin(), distinct.end(), s) != distinct.end()) {
      log << "warning: duplicate sigma " << fmt17(s) << " ignored\n";
      continue;
    }
    distinct.push_back(s);
  }
  echo(config, "sweep-sigma", log);

  const PdeProblem problem = builtin_problem(config.problem);
  SweepResult result;
  double best = 0.0;
  std::string csv = "sigma,final_loss,relative_error,status\n";
  for (double sigma : distinct) {
    ArchitectureConfig arch = config.arch;
    arch.fourier_enabled = true;
    arch.fourier_sigma = sigma;
    SweepRow row;
    row.sigma = sigma;
    try {
      const CorrectionStack stack = run_error_correction(problem, arch, config.train);
      const EpochLog& last = stack.logs(stack.size() - 1).back();
      row.final_loss = last.loss_total;
      row.relative_error = last.relative_error;
    } catch (const Error& e) {
      row.status = std::string("failed: ") + to_string(e.kind());
      log << "sigma " << fmt17(sigma) << " failed: " << e.what() << "\n";
    }
    log << "sigma " << fmt17(sigma) << ": loss " << fmt17(row.final_loss) << ", relative error "
        << fmt17(row.relative_error) << "\n";
    csv += fmt17(row.sigma) + "," + fmt17(row.final_loss) + "," + fmt17(row.relative_error) + "," +
           row.status + "\n";
    result.rows.push_back(row);
  }
  write_text(in_out(config, kSweepFile), csv);
  for (const SweepRow& row : result.rows) {
    if (row.status != "ok" || !std::isfinite(row.relative_error)) continue;
    const bool better = !result.selected || row.relative_error < best;
    if (better) {
      result.selected = row.sigma;
      best = row.relative_error;
    }
  }
  if (result.selected) log << "selected sigma " << fmt17(*result.selected) << "\n";
  return result;
}

std::string format_report(const std::string& problem, const EvalReport& report) {
  std::string out = "problem = " + problem + "\n";
  out += "stages = " + std::to_string(report.stage_final_losses.size()) + "\n";
  out += "points = " + std::to_string(report.point_count) + "\n";
  if (std::isfinite(report.relative_error)) {
    out += "relative_error = " + fmt17(report.relative_error) + "\n";
  }
  for (std::size_t k = 0; k < report.stage_relative_errors.size(); ++k) {
    out += "relative_error.N" + std::to_string(k) + " = " + fmt17(report.stage_relative_errors[k]) + "\n";
  }
  for (std::size_t k = 0; k < report.stage_final_losses.size(); ++k) {
    if (!std::isfinite(report.stage_final_losses[k])) continue;
    out += "final_loss.N" + std::to_string(k) + " = " + fmt17(report.stage_final_losses[k]) + "\n";
  }
  return out;
}

EvalReport cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint,
                    std::ostream& log) {
  config.validate();
  const Checkpoint cp = load_checkpoint(checkpoint);
  const PdeProblem& problem = cp.stack.problem();
  const EvalReport report =
      make_report(cp.stack, relative_error_set(config, problem, config.train.seed));
  if (!problem.exact) log << "notice: " << problem.name << " has no closed form; relative error omitted\n";
  const std::string text = format_report(problem.name, report);
  write_text(in_out(config, kReportFile), text);
  log << text;
  export_fields(config, cp.stack, log, false);
  return report;
}

void cmd_plot(const RunConfig& config, const std::filesystem::path& checkpoint, std::ostream& log) {
  config.validate();
  const Checkpoint cp = load_checkpoint(checkpoint);
  export_fields(config, cp.stack, log, true);
}

}  // namespace gdgm

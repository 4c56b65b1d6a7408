// Command-line front end: solver <train|correct|eval|sweep-sigma|plot> --config <file>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdgm/commands.hpp"
#include "gdgm/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::string checkpoint;
  std::string out;
  std::optional<std::uint64_t> seed;
  int orders = 1;
  std::vector<double> sigmas{0.1, 1.0, 10.0};
};

gdgm::RunConfig load(const Options& opt) {
  gdgm::RunConfig config = gdgm::parse_config(opt.config);
  if (!opt.out.empty()) config.out_dir = opt.out;
  if (opt.seed) config.train.seed = *opt.seed;
  config.validate();
  return config;
}

std::string require_checkpoint(const Options& opt, const gdgm::RunConfig& config) {
  if (!opt.checkpoint.empty()) return opt.checkpoint;
  return (config.out_dir / gdgm::kCheckpointFile).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-free Poisson solver with sine networks and error correction"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "Run configuration (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out, "Output directory (overrides out.dir)");
    cmd->add_option("--seed", opt.seed, "Seed (overrides seed)");
  };

  auto* train = app.add_subcommand("train", "Train N_0 ... N_K and write checkpoint, logs, fields");
  common(train);
  auto* correct = app.add_subcommand("correct", "Append error-correction networks to a checkpoint");
  common(correct);
  correct->add_option("--checkpoint", opt.checkpoint, "Checkpoint to extend")->required();
  correct->add_option("--orders", opt.orders, "Number of corrections to add")
      ->check(CLI::PositiveNumber);
  auto* eval = app.add_subcommand("eval", "Relative-error report and field export");
  common(eval);
  eval->add_option("--checkpoint", opt.checkpoint, "Checkpoint (default: <out>/checkpoint.gdgm)");
  auto* sweep = app.add_subcommand("sweep-sigma", "Short runs over Fourier feature scales");
  common(sweep);
  sweep->add_option("--sigmas", opt.sigmas, "Sigma values")->delimiter(',');
  auto* plot = app.add_subcommand("plot", "Field export for every prefix N^(k)");
  common(plot);
  plot->add_option("--checkpoint", opt.checkpoint, "Checkpoint (default: <out>/checkpoint.gdgm)");

  CLI11_PARSE(app, argc, argv);

  try {
    const gdgm::RunConfig config = load(opt);
    if (train->parsed()) {
      gdgm::cmd_train(config, std::cerr);
    } else if (correct->parsed()) {
      gdgm::cmd_correct(config, opt.checkpoint, opt.orders, std::cerr);
    } else if (eval->parsed()) {
      gdgm::cmd_eval(config, require_checkpoint(opt, config), std::cout);
    } else if (sweep->parsed()) {
      gdgm::cmd_sweep_sigma(config, opt.sigmas, std::cerr);
    } else if (plot->parsed()) {
      gdgm::cmd_plot(config, require_checkpoint(opt, config), std::cerr);
    }
  } catch (const gdgm::Error& e) {
    std::cerr << "error: " << gdgm::to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

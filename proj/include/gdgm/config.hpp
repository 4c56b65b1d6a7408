#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gdgm/network.hpp"
#include "gdgm/sampling.hpp"
#include "gdgm/training.hpp"

namespace gdgm {

struct RunConfig {
  std::string problem = "p1_3d";
  ArchitectureConfig arch;
  TrainConfig train;
  std::filesystem::path out_dir = "out";
  int eval_resolution = 64;
  SliceSpec slice;

  void validate() const;
};

// Flat `key = value` lines; `#` starts a comment. Unknown keys, duplicate
// keys and malformed values raise an InvalidConfig error naming the key.
RunConfig parse_config(const std::filesystem::path& file);
RunConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

// Every effective key with its value, in a fixed order.
std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& config);
std::string echo_config(const RunConfig& config);

// "z=pi/10", "2=0.5; x=-1" -> axis map. Values accept plain numbers and
// [c*]pi[/d].
SliceSpec parse_slice(std::string_view text);
std::string format_slice(const SliceSpec& slice);

}  // namespace gdgm

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gdgm/correction_stack.hpp"

namespace gdgm {

inline constexpr const char* kCheckpointVersion = "GDGM1";

struct Checkpoint {
  CorrectionStack stack;
  std::uint64_t seed = 0;
};

// Versioned plain text: header `GDGM1`, problem and seed lines, then each
// stack member. Networks are written as an architecture line followed by
// their parameters in layer order (row-major weights, then bias) at 17
// significant digits, so reloading reproduces every double exactly.
// Closed-form members are stored by name (`member exact <problem>`).
std::string checkpoint_text(const CorrectionStack& stack, std::uint64_t seed);
Checkpoint parse_checkpoint(std::string_view text, std::string_view origin = "<checkpoint>");

void save_checkpoint(const CorrectionStack& stack, std::uint64_t seed,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// A one-member stack holding the problem's closed-form solution.
CorrectionStack exact_solution_stack(const PdeProblem& problem);

}  // namespace gdgm

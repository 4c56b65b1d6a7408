#include "gdgm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "gdgm/errors.hpp"
#include "gdgm/problem.hpp"

namespace gdgm {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
  fail(ErrorKind::InvalidConfig, "key '" + key + "': " + why);
}

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error(key, "expected a real number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    config_error(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  config_error(key, "expected a boolean, got '" + text + "'");
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) config_error(key, "integer out of range");
  return static_cast<int>(v);
}

double parse_slice_value(std::string_view text) {
  const std::string t = trim(text);
  const auto pi_pos = t.find("pi");
  if (pi_pos == std::string::npos) return parse_real("eval.slice", t);
  double coefficient = 1.0;
  std::string head = trim(std::string_view(t).substr(0, pi_pos));
  if (!head.empty()) {
    if (head == "-") {
      coefficient = -1.0;
    } else {
      if (head.back() == '*') head.pop_back();
      coefficient = parse_real("eval.slice", trim(head));
    }
  }
  double divisor = 1.0;
  const std::string tail = trim(std::string_view(t).substr(pi_pos + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') config_error("eval.slice", "cannot parse value '" + t + "'");
    divisor = parse_real("eval.slice", trim(std::string_view(tail).substr(1)));
    if (divisor == 0.0) config_error("eval.slice", "division by zero");
  }
  return coefficient * std::numbers::pi / divisor;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"problem", [](RunConfig& c, const auto&, const auto& v) { c.problem = v; }},
      {"layers", [](RunConfig& c, const auto& k, const auto& v) { c.arch.hidden_layers = parse_int(k, v); }},
      {"width", [](RunConfig& c, const auto& k, const auto& v) { c.arch.width = parse_int(k, v); }},
      {"omega0", [](RunConfig& c, const auto& k, const auto& v) { c.arch.omega0 = parse_real(k, v); }},
      {"fourier.enabled", [](RunConfig& c, const auto& k, const auto& v) { c.arch.fourier_enabled = parse_bool(k, v); }},
      {"fourier.sigma", [](RunConfig& c, const auto& k, const auto& v) { c.arch.fourier_sigma = parse_real(k, v); }},
      {"fourier.n", [](RunConfig& c, const auto& k, const auto& v) { c.arch.fourier_n = parse_int(k, v); }},
      {"train.M", [](RunConfig& c, const auto& k, const auto& v) { c.train.M = parse_int(k, v); }},
      {"train.Nb", [](RunConfig& c, const auto& k, const auto& v) { c.train.Nb = parse_int(k, v); }},
      {"train.epochs", [](RunConfig& c, const auto& k, const auto& v) { c.train.epochs = parse_integer(k, v); }},
      {"train.eta", [](RunConfig& c, const auto& k, const auto& v) { c.train.eta = parse_real(k, v); }},
      {"train.log_every", [](RunConfig& c, const auto& k, const auto& v) { c.train.log_every = parse_int(k, v); }},
      {"adam.beta1", [](RunConfig& c, const auto& k, const auto& v) { c.train.adam.beta1 = parse_real(k, v); }},
      {"adam.beta2", [](RunConfig& c, const auto& k, const auto& v) { c.train.adam.beta2 = parse_real(k, v); }},
      {"adam.eps", [](RunConfig& c, const auto& k, const auto& v) { c.train.adam.eps = parse_real(k, v); }},
      {"ec.K", [](RunConfig& c, const auto& k, const auto& v) { c.train.K = parse_int(k, v); }},
      {"seed", [](RunConfig& c, const auto& k, const auto& v) {
         const long long s = parse_integer(k, v);
         if (s < 0) config_error(k, "must be non-negative");
         c.train.seed = static_cast<std::uint64_t>(s);
       }},
      {"eval.resolution", [](RunConfig& c, const auto& k, const auto& v) { c.eval_resolution = parse_int(k, v); }},
      {"eval.points", [](RunConfig& c, const auto& k, const auto& v) { c.train.eval_points = parse_int(k, v); }},
      {"eval.slice", [](RunConfig& c, const auto&, const auto& v) { c.slice = parse_slice(v); }},
      {"out.dir", [](RunConfig& c, const auto&, const auto& v) { c.out_dir = v; }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    (void)builtin_problem(problem);
  } catch (const Error& e) {
    config_error("problem", e.what());
  }
  if (arch.hidden_layers < 1) config_error("layers", "must be >= 1");
  if (arch.width < 1) config_error("width", "must be >= 1");
  if (!(arch.omega0 > 0.0)) config_error("omega0", "must be positive");
  if (!(arch.fourier_sigma > 0.0)) config_error("fourier.sigma", "must be positive");
  if (arch.fourier_n < 1) config_error("fourier.n", "must be >= 1");
  if (eval_resolution < 2) config_error("eval.resolution", "must be >= 2");
  const int dim = builtin_problem(problem).dim();
  for (const auto& [axis, value] : slice) {
    if (axis < 0 || axis >= dim) config_error("eval.slice", "axis out of range for " + problem);
  }
  train.validate();
}

SliceSpec parse_slice(std::string_view text) {
  SliceSpec slice;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) config_error("eval.slice", "expected axis=value, got '" + item + "'");
    const std::string axis_text = trim(std::string_view(item).substr(0, eq));
    int axis = -1;
    if (axis_text == "x") axis = 0;
    else if (axis_text == "y") axis = 1;
    else if (axis_text == "z") axis = 2;
    else axis = parse_int("eval.slice", axis_text);
    if (axis < 0) config_error("eval.slice", "negative axis");
    if (slice.contains(axis)) config_error("eval.slice", "axis pinned twice");
    slice[axis] = parse_slice_value(std::string_view(item).substr(eq + 1));
  }
  return slice;
}

std::string format_slice(const SliceSpec& slice) {
  std::string out;
  for (const auto& [axis, value] : slice) {
    if (!out.empty()) out += "; ";
    static constexpr const char* kNames[] = {"x", "y", "z"};
    out += (axis < 3 ? std::string(kNames[axis]) : std::to_string(axis)) + "=" + shortest(value);
  }
  return out;
}

RunConfig parse_config_text(std::string_view text, std::string_view origin) {
  RunConfig config;
  std::set<std::string> seen;
  std::stringstream ss{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::InvalidConfig, std::string(origin) + ":" + std::to_string(line_no) +
                                         ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) config_error(key, "unknown key");
    if (!seen.insert(key).second) config_error(key, "set more than once");
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

RunConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot read config file '" + file.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), file.string());
}

std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& c) {
  return {
      {"problem", c.problem},
      {"layers", std::to_string(c.arch.hidden_layers)},
      {"width", std::to_string(c.arch.width)},
      {"omega0", shortest(c.arch.omega0)},
      {"fourier.enabled", c.arch.fourier_enabled ? "true" : "false"},
      {"fourier.sigma", shortest(c.arch.fourier_sigma)},
      {"fourier.n", std::to_string(c.arch.fourier_n)},
      {"train.M", std::to_string(c.train.M)},
      {"train.Nb", std::to_string(c.train.Nb)},
      {"train.epochs", std::to_string(c.train.epochs)},
      {"train.eta", shortest(c.train.eta)},
      {"train.log_every", std::to_string(c.train.log_every)},
      {"adam.beta1", shortest(c.train.adam.beta1)},
      {"adam.beta2", shortest(c.train.adam.beta2)},
      {"adam.eps", shortest(c.train.adam.eps)},
      {"ec.K", std::to_string(c.train.K)},
      {"seed", std::to_string(c.train.seed)},
      {"eval.resolution", std::to_string(c.eval_resolution)},
      {"eval.points", std::to_string(c.train.eval_points)},
      {"eval.slice", format_slice(c.slice)},
      {"out.dir", c.out_dir.string()},
  };
}

std::string echo_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : effective_config(config)) out += key + " = " + value + "\n";
  return out;
}

}  // namespace gdgm

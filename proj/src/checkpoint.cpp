#include "gdgm/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gdgm/errors.hpp"

namespace gdgm {
namespace {

void put(std::ostringstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_row(std::ostringstream& out, const auto& row) {
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    if (c) out << ' ';
    put(out, row(c));
  }
  out << '\n';
}

class Reader {
 public:
  Reader(std::string_view text, std::string_view origin) : in_{std::string(text)}, origin_(origin) {}

  std::istringstream next_line(const std::string& expect_what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return std::istringstream(line);
    }
    error("unexpected end of file, expected " + expect_what);
  }

  void expect_word(std::istringstream& line, const std::string& word) {
    std::string w;
    if (!(line >> w) || w != word) error("expected '" + word + "'");
  }

  template <typename T>
  T read(std::istringstream& line, const std::string& what) {
    T v{};
    if (!(line >> v)) error("cannot read " + what);
    return v;
  }

  double read_double(std::istringstream& line, const std::string& what) {
    std::string token;
    if (!(line >> token)) error("cannot read " + what);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) error("malformed number '" + token + "'");
    return v;
  }

  void expect_end(std::istringstream& line) {
    std::string extra;
    if (line >> extra) error("trailing data '" + extra + "'");
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Checkpoint, std::string(origin_) + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istringstream in_;
  std::string origin_;
  int line_no_ = 0;
};

Network read_network(Reader& r) {
  auto arch = r.next_line("architecture line");
  r.expect_word(arch, "arch");
  Network net;
  r.expect_word(arch, "input_dim");
  net.input_dim = r.read<int>(arch, "input_dim");
  r.expect_word(arch, "activation");
  const auto act = r.read<std::string>(arch, "activation");
  if (act == "sine") net.activation = Activation::Sine;
  else if (act == "identity") net.activation = Activation::Identity;
  else r.error("unknown activation '" + act + "'");
  r.expect_word(arch, "omega0");
  net.omega0 = r.read_double(arch, "omega0");
  r.expect_word(arch, "layers");
  const int layers = r.read<int>(arch, "layer count");
  r.expect_word(arch, "fourier");
  const int features = r.read<int>(arch, "fourier feature count");
  r.expect_end(arch);
  if (layers < 2 || features < 0) r.error("invalid architecture");

  if (features > 0) {
    auto head = r.next_line("fourier line");
    r.expect_word(head, "fourier_map");
    FourierFeatureMap map;
    map.sigma = r.read_double(head, "sigma");
    r.expect_end(head);
    map.frequencies.resize(features, net.input_dim);
    for (int i = 0; i < features; ++i) {
      auto row = r.next_line("fourier row");
      for (int j = 0; j < net.input_dim; ++j) map.frequencies(i, j) = r.read_double(row, "frequency");
      r.expect_end(row);
    }
    net.fourier = std::move(map);
  }
  for (int l = 0; l < layers; ++l) {
    auto head = r.next_line("layer line");
    r.expect_word(head, "layer");
    const int rows = r.read<int>(head, "rows");
    const int cols = r.read<int>(head, "cols");
    r.expect_end(head);
    if (rows < 1 || cols < 1) r.error("invalid layer shape");
    Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (int i = 0; i < rows; ++i) {
      auto row = r.next_line("weight row");
      for (int j = 0; j < cols; ++j) layer.weight(i, j) = r.read_double(row, "weight");
      r.expect_end(row);
    }
    auto bias = r.next_line("bias row");
    for (int i = 0; i < rows; ++i) layer.bias(i) = r.read_double(bias, "bias");
    r.expect_end(bias);
    net.layers.push_back(std::move(layer));
  }
  try {
    net.validate();
  } catch (const Error& e) {
    r.error(e.what());
  }
  return net;
}

}  // namespace

std::string checkpoint_text(const CorrectionStack& stack, std::uint64_t seed) {
  std::ostringstream out;
  out << kCheckpointVersion << '\n';
  out << "problem " << stack.problem().name << '\n';
  out << "seed " << seed << '\n';
  out << "stages " << stack.size() << '\n';
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const StackMember& member = stack.member(k);
    if (const auto* closed = std::get_if<ClosedForm>(&member)) {
      const auto dot = closed->name.rfind(".exact");
      if (dot == std::string::npos) {
        fail(ErrorKind::Checkpoint, "closed-form member '" + closed->name + "' is not serialisable");
      }
      out << "member exact " << closed->name.substr(0, dot) << '\n';
      continue;
    }
    const Network& net = std::get<Network>(member);
    out << "member network\n";
    out << "arch input_dim " << net.input_dim << " activation "
        << (net.activation == Activation::Sine ? "sine" : "identity") << " omega0 ";
    put(out, net.omega0);
    out << " layers " << net.layers.size() << " fourier "
        << (net.fourier ? net.fourier->features() : 0) << '\n';
    if (net.fourier) {
      out << "fourier_map ";
      put(out, net.fourier->sigma);
      out << '\n';
      for (Eigen::Index i = 0; i < net.fourier->frequencies.rows(); ++i) {
        put_row(out, net.fourier->frequencies.row(i));
      }
    }
    for (const Layer& layer : net.layers) {
      out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) put_row(out, layer.weight.row(i));
      put_row(out, layer.bias.transpose());
    }
  }
  return out.str();
}

Checkpoint parse_checkpoint(std::string_view text, std::string_view origin) {
  Reader r(text, origin);
  auto header = r.next_line("version header");
  const auto version = r.read<std::string>(header, "version");
  if (version != kCheckpointVersion) {
    r.error("version mismatch: expected " + std::string(kCheckpointVersion) + ", got " + version);
  }
  auto problem_line = r.next_line("problem line");
  r.expect_word(problem_line, "problem");
  const auto problem_name = r.read<std::string>(problem_line, "problem name");
  PdeProblem problem;
  try {
    problem = builtin_problem(problem_name);
  } catch (const Error& e) {
    r.error(e.what());
  }
  auto seed_line = r.next_line("seed line");
  r.expect_word(seed_line, "seed");
  const auto seed = r.read<std::uint64_t>(seed_line, "seed");
  auto stages_line = r.next_line("stages line");
  r.expect_word(stages_line, "stages");
  const auto stages = r.read<std::size_t>(stages_line, "stage count");

  Checkpoint cp{CorrectionStack(problem), seed};
  for (std::size_t k = 0; k < stages; ++k) {
    auto member = r.next_line("member line");
    r.expect_word(member, "member");
    const auto kind = r.read<std::string>(member, "member kind");
    if (kind == "network") {
      r.expect_end(member);
      Network net = read_network(r);
      if (net.input_dim != problem.dim()) r.error("network dimension does not match the problem");
      cp.stack.push(std::move(net));
    } else if (kind == "exact") {
      const auto name = r.read<std::string>(member, "problem name");
      PdeProblem source;
      try {
        source = builtin_problem(name);
      } catch (const Error& e) {
        r.error(e.what());
      }
      if (!source.exact) r.error("problem '" + name + "' has no closed-form solution");
      cp.stack.push(*source.exact);
    } else {
      r.error("unknown member kind '" + kind + "'");
    }
  }
  return cp;
}

void save_checkpoint(const CorrectionStack& stack, std::uint64_t seed,
                     const std::filesystem::path& path) {
  const std::string text = checkpoint_text(stack, seed);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_checkpoint(buffer.str(), path.string());
}

CorrectionStack exact_solution_stack(const PdeProblem& problem) {
  if (!problem.exact) {
    fail(ErrorKind::InvalidInput, "problem '" + problem.name + "' has no closed-form solution");
  }
  CorrectionStack stack(problem);
  stack.push(*problem.exact);
  return stack;
}

}  // namespace gdgm

#include "gdgm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gdgm/errors.hpp"

namespace gdgm {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& cell, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    fail(ErrorKind::Io, path.string() + ": cannot parse number '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

// Composite trapezoid nodes and weights on [lo, hi], normalised to sum 1.
void trapezoid(double lo, double hi, int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes(i) = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
    weights(i) = (i == 0 || i == n - 1) ? 0.5 : 1.0;
  }
  weights /= static_cast<double>(n - 1);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

double relative_error(std::span<const double> predicted, std::span<const double> exact) {
  if (exact.empty()) fail(ErrorKind::InvalidInput, "relative_error: empty evaluation set");
  if (predicted.size() != exact.size()) fail(ErrorKind::Shape, "relative_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double diff = exact[i] - predicted[i];
    num += diff * diff;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) {
    fail(ErrorKind::DegenerateMetric, "relative_error: exact solution vanishes on the set");
  }
  return num / den;
}

double relative_error(const ScalarField& predict, const ScalarField& phi,
                      const Eigen::MatrixXd& points) {
  std::vector<double> pred;
  std::vector<double> exact;
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const Eigen::VectorXd x = points.col(p);
    pred.push_back(predict(as_span(x)));
    exact.push_back(phi(as_span(x)));
  }
  return relative_error(pred, exact);
}

ObjectiveGradient quadrature_objective_gradient(const CorrectionStack& stack,
                                                const Network& candidate, int resolution) {
  const Box& box = stack.problem().domain;
  const int d = box.dim();
  if (d > 2) fail(ErrorKind::UnsupportedOracle, "quadrature oracle supports d <= 2 only");
  if (resolution < 8) fail(ErrorKind::InvalidConfig, "quadrature oracle needs resolution >= 8");

  Eigen::VectorXd xs, wx;
  trapezoid(box.lo[0], box.hi[0], resolution, xs, wx);
  Eigen::MatrixXd interior;
  Eigen::VectorXd wi;
  Eigen::MatrixXd boundary;
  Eigen::VectorXd wb;

  if (d == 1) {
    interior = xs.transpose();
    wi = wx;
    boundary.resize(1, 2);
    boundary << box.lo[0], box.hi[0];
    wb = Eigen::Vector2d(0.5, 0.5);
  } else {
    Eigen::VectorXd ys, wy;
    trapezoid(box.lo[1], box.hi[1], resolution, ys, wy);
    interior.resize(2, resolution * resolution);
    wi.resize(resolution * resolution);
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        interior.col(i * resolution + j) << xs(i), ys(j);
        wi(i * resolution + j) = wx(i) * wy(j);
      }
    }
    const double lx = box.hi[0] - box.lo[0];
    const double ly = box.hi[1] - box.lo[1];
    const double perimeter = 2.0 * (lx + ly);
    boundary.resize(2, 4 * resolution);
    wb.resize(4 * resolution);
    for (int i = 0; i < resolution; ++i) {
      // Faces normal to x carry measure ly, faces normal to y carry lx.
      boundary.col(i) << box.lo[0], ys(i);
      boundary.col(resolution + i) << box.hi[0], ys(i);
      boundary.col(2 * resolution + i) << xs(i), box.lo[1];
      boundary.col(3 * resolution + i) << xs(i), box.hi[1];
      wb(i) = wb(resolution + i) = wy(i) * ly / perimeter;
      wb(2 * resolution + i) = wb(3 * resolution + i) = wx(i) * lx / perimeter;
    }
  }
  return objective_gradient(stack, candidate, interior, wi, boundary, wb);
}

ObjectiveGradient quadrature_objective_gradient(const PdeProblem& problem, const Network& net,
                                                int resolution) {
  return quadrature_objective_gradient(CorrectionStack(problem), net, resolution);
}

void export_field(const Eigen::MatrixXd& grid, const Eigen::RowVectorXd& values,
                  const std::filesystem::path& base) {
  if (grid.cols() != values.size() || grid.cols() == 0) {
    fail(ErrorKind::Shape, "export_field: grid and values disagree");
  }
  std::vector<int> free_axes;
  for (Eigen::Index a = 0; a < grid.rows(); ++a) {
    if (grid.row(a).maxCoeff() > grid.row(a).minCoeff()) free_axes.push_back(static_cast<int>(a));
  }
  if (free_axes.size() != 2) {
    fail(ErrorKind::InvalidInput, "export_field: need a 2D grid or a 2D slice of a 3D grid");
  }
  const auto res = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(grid.cols()))));
  if (res * res != grid.cols()) fail(ErrorKind::InvalidInput, "export_field: grid is not square");

  std::filesystem::path csv_path = base;
  csv_path += ".csv";
  {
    std::ofstream csv = open_out(csv_path, std::ios::out | std::ios::trunc);
    static constexpr const char* kAxes[] = {"x", "y", "z"};
    for (Eigen::Index a = 0; a < grid.rows(); ++a) {
      csv << (a < 3 ? kAxes[a] : ("x" + std::to_string(a)).c_str()) << ',';
    }
    csv << "value\n";
    for (Eigen::Index p = 0; p < grid.cols(); ++p) {
      for (Eigen::Index a = 0; a < grid.rows(); ++a) csv << fmt17(grid(a, p)) << ',';
      csv << fmt17(values(p)) << '\n';
    }
    if (!csv) fail(ErrorKind::Io, "write failed for '" + csv_path.string() + "'");
  }

  const double limit = values.cwiseAbs().maxCoeff();
  constexpr int kCell = 4;
  std::filesystem::path svg_path = base;
  svg_path += ".svg";
  std::ofstream svg = open_out(svg_path, std::ios::out | std::ios::trunc);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << res * kCell << "\" height=\""
      << res * kCell << "\" shape-rendering=\"crispEdges\">\n";
  svg << "<!-- colormap: linear ramp rgb(59,76,192) at -L to rgb(180,4,38) at +L, L = "
      << fmt17(limit) << " -->\n";
  // Points are ordered with the first free axis slowest: index = i * res + j.
  // Column i runs left to right, row j bottom to top.
  for (Eigen::Index i = 0; i < res; ++i) {
    for (Eigen::Index j = 0; j < res; ++j) {
      const double v = values(i * res + j);
      const double t = limit > 0.0 ? 0.5 * (v / limit + 1.0) : 0.5;
      const int r = static_cast<int>(std::lround(59 + t * (180 - 59)));
      const int g = static_cast<int>(std::lround(76 + t * (4 - 76)));
      const int b = static_cast<int>(std::lround(192 + t * (38 - 192)));
      svg << "<rect x=\"" << i * kCell << "\" y=\"" << (res - 1 - j) * kCell << "\" width=\""
          << kCell << "\" height=\"" << kCell << "\" fill=\"rgb(" << r << ',' << g << ',' << b
          << ")\"/>\n";
    }
  }
  svg << "</svg>\n";
  if (!svg) fail(ErrorKind::Io, "write failed for '" + svg_path.string() + "'");
}

void export_field(const ScalarField& predict, const Eigen::MatrixXd& grid,
                  const std::filesystem::path& base) {
  Eigen::RowVectorXd values(grid.cols());
  for (Eigen::Index p = 0; p < grid.cols(); ++p) {
    const Eigen::VectorXd x = grid.col(p);
    values(p) = predict(as_span(x));
  }
  export_field(grid, values, base);
}

FieldTable read_field_values(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) fail(ErrorKind::Io, "cannot open '" + csv.string() + "'");
  std::string line;
  std::getline(in, line);
  const std::size_t columns = split_csv(line).size();
  if (columns < 2) fail(ErrorKind::Io, csv.string() + ": malformed header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != columns) fail(ErrorKind::Io, csv.string() + ": ragged row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, csv));
    rows.push_back(std::move(row));
  }
  FieldTable t;
  const auto d = static_cast<Eigen::Index>(columns - 1);
  t.points.resize(d, static_cast<Eigen::Index>(rows.size()));
  t.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t p = 0; p < rows.size(); ++p) {
    for (Eigen::Index a = 0; a < d; ++a) t.points(a, static_cast<Eigen::Index>(p)) = rows[p][static_cast<std::size_t>(a)];
    t.values(static_cast<Eigen::Index>(p)) = rows[p].back();
  }
  return t;
}

void write_logs(const std::vector<EpochLog>& logs, const std::filesystem::path& path,
                bool append) {
  if (logs.empty()) fail(ErrorKind::InvalidInput, "write_logs: no rows");
  const bool fresh = !append || !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream out = open_out(path, append ? std::ios::app : (std::ios::out | std::ios::trunc));
  if (fresh) out << kLogHeader << '\n';
  for (const EpochLog& l : logs) {
    out << l.epoch << ',' << l.stage << ',' << fmt17(l.loss_interior) << ','
        << fmt17(l.loss_boundary) << ',' << fmt17(l.loss_total) << ',' << fmt17(l.relative_error)
        << ',' << fmt17(l.wall_ms) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<EpochLog> read_logs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader) {
    fail(ErrorKind::Io, path.string() + ": unexpected CSV header");
  }
  std::vector<EpochLog> logs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 7) fail(ErrorKind::Io, path.string() + ": expected 7 columns");
    EpochLog l;
    l.epoch = std::stol(c[0]);
    l.stage = std::stoi(c[1]);
    l.loss_interior = parse_double(c[2], path);
    l.loss_boundary = parse_double(c[3], path);
    l.loss_total = parse_double(c[4], path);
    l.relative_error = parse_double(c[5], path);
    l.wall_ms = parse_double(c[6], path);
    logs.push_back(l);
  }
  return logs;
}

EvalReport make_report(const CorrectionStack& stack, const Eigen::MatrixXd& eval_set) {
  EvalReport report;
  report.point_count = static_cast<std::size_t>(eval_set.cols());
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const auto& logs = stack.logs(k);
    report.stage_final_losses.push_back(logs.empty() ? std::nan("") : logs.back().loss_total);
  }
  const PdeProblem& problem = stack.problem();
  if (!problem.exact || stack.empty()) return report;
  const Eigen::RowVectorXd exact = member_fields(*problem.exact, eval_set, false).value;
  const std::span<const double> exact_span(exact.data(), static_cast<std::size_t>(exact.size()));
  Eigen::RowVectorXd pred = Eigen::RowVectorXd::Zero(eval_set.cols());
  for (std::size_t k = 0; k < stack.size(); ++k) {
    pred += member_fields(stack.member(k), eval_set, false).value;
    report.stage_relative_errors.push_back(relative_error(
        std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())), exact_span));
  }
  report.relative_error = report.stage_relative_errors.back();
  return report;
}

}  // namespace gdgm

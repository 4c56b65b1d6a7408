#include <array>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "gdgm/errors.hpp"
#include "gdgm/problem.hpp"
#include "gdgm/sampling.hpp"

using namespace gdgm;
using std::numbers::pi;

namespace {

// chi-square with 15 degrees of freedom, upper 0.001 quantile
constexpr double kChi2Critical = 37.697;

double chi_square(const Eigen::RowVectorXd& xs, double lo, double hi, int bins) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    int b = static_cast<int>((xs(i) - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double expected = static_cast<double>(xs.size()) / bins;
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

void expect_config_error(auto&& call) {
  try {
    call();
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("interior sample mean") {
  Rng rng = make_rng(1);
  const SampleBatch b = sample_interior(Box::cube(2, -pi, pi), 10000, rng);
  CHECK(b.region == Region::Interior);
  REQUIRE(b.points.rows() == 2);
  REQUIRE(b.size() == 10000);
  const double tol = 3.0 * (2 * pi / std::sqrt(12.0)) / 100.0;
  for (int i = 0; i < 2; ++i) CHECK(std::abs(b.points.row(i).mean()) < tol);
}

TEST_CASE("interior points lie strictly inside") {
  const Box box = Box::cube(2, 0.0, 1.0);
  Rng rng = make_rng(2);
  const SampleBatch b = sample_interior(box, 5000, rng);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const Eigen::VectorXd x = b.points.col(j);
    CHECK(box.strictly_contains({x.data(), 2}));
  }
  const Box thin{{0.0, 0.0}, {1e-9, 1.0}};
  const SampleBatch t = sample_interior(thin, 1000, rng);
  CHECK(t.points.row(0).maxCoeff() < 1e-9);
  CHECK(t.points.row(0).minCoeff() > 0.0);
}

TEST_CASE("same seed gives the same batch") {
  const Box box = Box::cube(3, -pi, pi);
  Rng a = make_rng(5, 3), b = make_rng(5, 3), c = make_rng(5, 4);
  const Eigen::MatrixXd pa = sample_interior(box, 100, a).points;
  CHECK(pa == sample_interior(box, 100, b).points);
  CHECK(pa != sample_interior(box, 100, c).points);
  CHECK(sample_boundary(box, 100, a).points == sample_boundary(box, 100, b).points);
}

TEST_CASE("zero counts are rejected") {
  const Box box = Box::cube(2, -1.0, 1.0);
  Rng rng = make_rng(1);
  expect_config_error([&] { sample_interior(box, 0, rng); });
  expect_config_error([&] { sample_boundary(box, 0, rng); });
}

TEST_CASE("1D boundary hits both endpoints evenly") {
  Rng rng = make_rng(3);
  const SampleBatch b = sample_boundary(Box::cube(1, -pi, pi), 10000, rng);
  CHECK(b.region == Region::Boundary);
  int low = 0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double x = b.points(0, j);
    REQUIRE((x == -pi || x == pi));
    low += x == -pi;
  }
  CHECK(std::abs(low / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("2D boundary faces are equally likely") {
  const Box box = Box::cube(2, -pi, pi);
  Rng rng = make_rng(4);
  const SampleBatch b = sample_boundary(box, 10000, rng);
  std::array<int, 4> faces{};
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double x = b.points(0, j), y = b.points(1, j);
    const Eigen::VectorXd p = b.points.col(j);
    REQUIRE(box.on_boundary({p.data(), 2}));
    if (x == -pi) ++faces[0];
    else if (x == pi) ++faces[1];
    else if (y == -pi) ++faces[2];
    else if (y == pi) ++faces[3];
  }
  for (int f : faces) CHECK(std::abs(f / 10000.0 - 0.25) <= 0.02);
}

TEST_CASE("face probability follows face measure") {
  // faces x=const have length 4, faces y=const have length 1
  const Box box{{0.0, 0.0}, {1.0, 4.0}};
  Rng rng = make_rng(6);
  const SampleBatch b = sample_boundary(box, 20000, rng);
  int on_x_faces = 0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    on_x_faces += b.points(0, j) == 0.0 || b.points(0, j) == 1.0;
  }
  CHECK(std::abs(on_x_faces / 20000.0 - 0.8) <= 0.02);
}

TEST_CASE("per-axis histograms pass chi-square") {
  const Box box = Box::cube(3, -pi, pi);
  Rng rng = make_rng(7);
  const SampleBatch in = sample_interior(box, 100000, rng);
  for (int i = 0; i < 3; ++i) CHECK(chi_square(in.points.row(i), -pi, pi, 16) < kChi2Critical);

  // on the faces x = +-pi, the free coordinates are uniform
  const SampleBatch on = sample_boundary(Box::cube(2, -pi, pi), 100000, rng);
  std::vector<double> free;
  for (Eigen::Index j = 0; j < on.size(); ++j) {
    if (std::abs(on.points(0, j)) == pi) free.push_back(on.points(1, j));
  }
  const Eigen::RowVectorXd fv = Eigen::Map<const Eigen::RowVectorXd>(free.data(), static_cast<Eigen::Index>(free.size()));
  CHECK(chi_square(fv, -pi, pi, 16) < kChi2Critical);
}

TEST_CASE("eval_grid examples") {
  const Eigen::MatrixXd g1 = eval_grid(Box::cube(1, -pi, pi), 3);
  REQUIRE(g1.cols() == 3);
  CHECK(g1(0, 0) == -pi);
  CHECK(std::abs(g1(0, 1)) < 1e-15);
  CHECK(g1(0, 2) == pi);

  const Eigen::MatrixXd g2 = eval_grid(Box::cube(2, -pi, pi), 64);
  REQUIRE(g2.cols() == 4096);
  CHECK(g2(0, 0) == -pi);
  CHECK(g2(1, 1) > g2(1, 0));
  CHECK(g2(0, 1) == g2(0, 0));
  CHECK(g2(0, 64) > g2(0, 63));
  CHECK(g2(0, 4095) == pi);
  CHECK(g2(1, 4095) == pi);

  const Eigen::MatrixXd g3 = eval_grid(Box::cube(3, -pi, pi), 64, {{2, pi / 10}});
  REQUIRE(g3.cols() == 4096);
  CHECK((g3.row(2).array() == pi / 10).all());
}

TEST_CASE("eval_grid rejects bad input") {
  const Box box = Box::cube(2, -pi, pi);
  expect_config_error([&] { eval_grid(box, 1); });
  expect_config_error([&] { eval_grid(box, 8, {{2, 0.0}}); });
  expect_config_error([&] { eval_grid(box, 8, {{-1, 0.0}}); });
}

TEST_CASE("evaluation_set is fixed per seed") {
  const Box box = Box::cube(2, -pi, pi);
  const Eigen::MatrixXd a = evaluation_set(box, 512, 3);
  CHECK(a == evaluation_set(box, 512, 3));
  CHECK(a != evaluation_set(box, 512, 4));
  CHECK(a.cols() == 512);
  CHECK(a.cwiseAbs().maxCoeff() < pi);
}

}  // TEST_SUITE

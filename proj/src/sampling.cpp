#include "gdgm/sampling.hpp"

#include <string>
#include <vector>

#include "gdgm/errors.hpp"

namespace gdgm {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return Rng(seq);
}

SampleBatch sample_interior(const Box& domain, int count, Rng& rng) {
  domain.validate();
  if (count < 1) fail(ErrorKind::InvalidConfig, "sample_interior: M must be >= 1");
  const int d = domain.dim();
  SampleBatch batch{Eigen::MatrixXd(d, count), Region::Interior};
  for (int p = 0; p < count; ++p) {
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      std::uniform_real_distribution<double> dist(domain.lo[k], domain.hi[k]);
      double v = dist(rng);
      while (!(v > domain.lo[k] && v < domain.hi[k])) v = dist(rng);
      batch.points(i, p) = v;
    }
  }
  return batch;
}

SampleBatch sample_boundary(const Box& domain, int count, Rng& rng) {
  domain.validate();
  if (count < 1) fail(ErrorKind::InvalidConfig, "sample_boundary: N must be >= 1");
  const int d = domain.dim();
  // Faces 2i (lo) and 2i+1 (hi) are normal to axis i.
  std::vector<double> measure;
  for (int i = 0; i < d; ++i) {
    double m = 1.0;
    for (int j = 0; j < d; ++j) {
      if (j != i) m *= domain.hi[static_cast<std::size_t>(j)] - domain.lo[static_cast<std::size_t>(j)];
    }
    measure.push_back(m);
    measure.push_back(m);
  }
  std::discrete_distribution<int> pick(measure.begin(), measure.end());
  SampleBatch batch{Eigen::MatrixXd(d, count), Region::Boundary};
  for (int p = 0; p < count; ++p) {
    const int face = pick(rng);
    const int axis = face / 2;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (i == axis) {
        batch.points(i, p) = (face % 2 == 0) ? domain.lo[k] : domain.hi[k];
      } else {
        std::uniform_real_distribution<double> dist(domain.lo[k], domain.hi[k]);
        batch.points(i, p) = dist(rng);
      }
    }
  }
  return batch;
}

Eigen::MatrixXd eval_grid(const Box& domain, int resolution, const SliceSpec& slice) {
  domain.validate();
  if (resolution < 2) fail(ErrorKind::InvalidConfig, "eval_grid: resolution must be >= 2");
  const int d = domain.dim();
  std::vector<int> free_axes;
  for (const auto& [axis, value] : slice) {
    if (axis < 0 || axis >= d) {
      fail(ErrorKind::InvalidConfig, "eval_grid: slice axis " + std::to_string(axis) +
                                         " out of range for dimension " + std::to_string(d));
    }
  }
  for (int i = 0; i < d; ++i) {
    if (!slice.contains(i)) free_axes.push_back(i);
  }
  Eigen::Index total = 1;
  for (std::size_t a = 0; a < free_axes.size(); ++a) total *= resolution;

  auto node = [&](int axis, int index) {
    const auto k = static_cast<std::size_t>(axis);
    if (index == resolution - 1) return domain.hi[k];
    return domain.lo[k] + (domain.hi[k] - domain.lo[k]) * index / (resolution - 1);
  };

  Eigen::MatrixXd grid(d, total);
  std::vector<int> index(free_axes.size(), 0);
  for (Eigen::Index p = 0; p < total; ++p) {
    for (const auto& [axis, value] : slice) grid(axis, p) = value;
    for (std::size_t a = 0; a < free_axes.size(); ++a) grid(free_axes[a], p) = node(free_axes[a], index[a]);
    for (std::size_t a = free_axes.size(); a-- > 0;) {
      if (++index[a] < resolution) break;
      index[a] = 0;
    }
  }
  return grid;
}

Eigen::MatrixXd evaluation_set(const Box& domain, int count, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0xe7a1);
  return sample_interior(domain, count, rng).points;
}

}  // namespace gdgm

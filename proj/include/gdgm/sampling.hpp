#pragma once

#include <cstdint>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "gdgm/problem.hpp"

namespace gdgm {

using Rng = std::mt19937_64;

// Independent, reproducible generator for (seed, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

enum class Region { Interior, Boundary };

struct SampleBatch {
  Eigen::MatrixXd points;  // d x count, one point per column
  Region region = Region::Interior;

  Eigen::Index size() const noexcept { return points.cols(); }
};

// Uniform i.i.d. points in the open box.
SampleBatch sample_interior(const Box& domain, int count, Rng& rng);

// Uniform with respect to surface measure: a face is picked with probability
// proportional to its measure, then a uniform point on it. The face
// coordinate is set exactly to lo or hi.
SampleBatch sample_boundary(const Box& domain, int count, Rng& rng);

// Axis index -> pinned value.
using SliceSpec = std::map<int, double>;

// Tensor grid with endpoints over the free axes, first free axis varying
// slowest. Pinned axes take their slice value in every point.
Eigen::MatrixXd eval_grid(const Box& domain, int resolution, const SliceSpec& slice = {});

// Fixed, seeded uniform interior sample used as the relative-error set.
Eigen::MatrixXd evaluation_set(const Box& domain, int count, std::uint64_t seed);

}  // namespace gdgm

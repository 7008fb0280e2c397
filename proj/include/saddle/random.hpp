#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace saddle {

// Mixes (seed, index) into an independent stream seed so that sampled
// quantities do not depend on evaluation order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

// Uniform point in the closed ball of radius r around the origin.
Eigen::VectorXd uniform_in_ball(std::mt19937_64& rng, int n, double r);

Eigen::VectorXd uniform_on_sphere(std::mt19937_64& rng, int n);

}  // namespace saddle

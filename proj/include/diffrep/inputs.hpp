#pragma once

// Test inputs: polynomial bumps (1 - |p - c|^2 / r^2)^k and their seeded
// random sums, separable functions with a planted z-moment order, z-odd
// products and Gaussians.

#include <random>
#include <vector>

#include "diffrep/sampled.hpp"

namespace diffrep::inputs {

struct Bump {
    std::vector<double> center;
    double radius = 1.0;
    int power = 4;
    cplx amplitude{1.0, 0.0};
};

cplx bump_value(const Bump& b, std::span<const double> p);
/// Sum of bumps; each bump only reads the leading center.size() coordinates.
PointFunction bump_sum(std::vector<Bump> bumps);
PointFunction gaussian(std::vector<double> center, double sigma, cplx amplitude = 1.0);

/// Bumps whose balls lie inside `region`, radii between 35% and 60% of its
/// smallest half-width, amplitudes of modulus 0.5..1.5 with random phase.
std::vector<Bump> random_bumps_in_box(std::mt19937_64& rng, const Box& region, int count, int power = 4);
/// Bumps whose balls lie inside B(0, R).
std::vector<Bump> random_bumps_in_ball(std::mt19937_64& rng, std::size_t dim, double R, int count,
                                       int power = 4);

/// Sampled bump sum with support box `support` (clipped to the grid).
SampledFunction sample_bumps(const std::vector<Bump>& bumps, const GridSpec& grid, const Box& support);

/// phi(x, y) (D^m psi)(z) on an H_n grid, with D the central difference
/// (psi[j+1] - psi[j-1]) / 2h_z on the grid's z nodes. Every discrete z-moment
/// of order below m vanishes up to rounding.
SampledFunction planted_order(const GridSpec& grid, const std::vector<Bump>& phi, const std::vector<Bump>& psi,
                              int m);

/// Random planted-order input supported inside `region` (a box in H_n).
SampledFunction random_planted(std::mt19937_64& rng, const GridSpec& grid, const Box& region, int m,
                               int terms = 2);

/// phi(x, y) z (1 - z^2 / rz^2)^power; odd in z.
SampledFunction z_odd_product(const GridSpec& grid, const std::vector<Bump>& phi, double rz, int power = 4);

/// Real bump centred at (0.4 a, 0, ..., 0) with radius 0.5 a, for V the cube of
/// half-width a.
Bump off_center_bump(std::size_t dim, double a);

}  // namespace diffrep::inputs

/// @file probes.hpp
/// @brief Seeded test-function generator.
///
/// Probes model the dense core class of the solvers: smooth, compactly
/// supported in y, with derivative identically zero on a neighborhood of the
/// singular endpoint y = 0. The planar variants tensor periodic x-bumps with
/// radial profiles. All draws are reproducible from the seed alone.
#pragma once

#include "singulax/grid.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace singulax {

/// C^infty profile equal to 1 on [0, plateau_end], monotone down to 0 at
/// support_end, all derivatives vanishing at both junctions.
double plateau_profile(double y, double plateau_end, double support_end);
double plateau_profile_dy(double y, double plateau_end, double support_end);

/// C^infty bump supported on (center-radius, center+radius), value 1 at center.
double annular_bump(double y, double center, double radius);
double annular_bump_dy(double y, double center, double radius);

class ProbeGenerator {
public:
    explicit ProbeGenerator(std::uint64_t seed) : rng_(seed) {}

    /// Real radial probe: a short random combination of plateau and annular
    /// profiles, flat on a positive neighborhood of 0, supported inside
    /// (0, 0.8 * y_max).
    std::vector<double> radial(const RadialGrid& g);

    /// Same construction with complex coefficients.
    std::vector<cdouble> radial_complex(const RadialGrid& g);

    /// Tensor probe on the periodic box [0, period)^dim_x times the radial
    /// grid; layout is x-fastest, slice j occupies [j*nx^dim_x, (j+1)*nx^dim_x).
    std::vector<cdouble> planar(int dim_x, int nx, double period, const RadialGrid& g);

    double uniform(double lo, double hi);
    std::uint64_t raw() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

} // namespace singulax

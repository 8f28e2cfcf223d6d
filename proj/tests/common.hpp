#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "photoion/bound.hpp"
#include "photoion/constants.hpp"
#include "photoion/grid.hpp"
#include "photoion/potential.hpp"

namespace testutil {

inline const photoion::ModelPotentialParams& rb_params()
{
    static const auto p = photoion::ModelPotentialParams::load(
        std::string(PHOTOION_DATA_DIR) + "/rb.params");
    return p;
}

inline const photoion::ModelPotentialParams& h_params()
{
    static const auto p = photoion::ModelPotentialParams::load(
        std::string(PHOTOION_DATA_DIR) + "/hydrogen.params");
    return p;
}

/// Structure-grade grid: fine spacing, bound-state box.
inline const photoion::RadialGrid& structure_grid()
{
    static const auto g = photoion::RadialGrid::from_extent(0.005, 400.0);
    return g;
}

/// Memoized bound solves on the structure grid.
inline const std::vector<photoion::BoundState>& rb_bound(int l, int n_states)
{
    static std::map<std::pair<int, int>, std::vector<photoion::BoundState>> cache;
    const auto key = std::make_pair(l, n_states);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, photoion::solve_bound(rb_params(), structure_grid(), l,
                                                      n_states)).first;
    return it->second;
}

inline double angle_distance(double a, double b)
{
    double d = std::fmod(a - b, 2.0 * photoion::pi);
    if (d > photoion::pi) d -= 2.0 * photoion::pi;
    if (d < -photoion::pi) d += 2.0 * photoion::pi;
    return std::abs(d);
}

} // namespace testutil

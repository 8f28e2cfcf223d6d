#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "photoion/bound.hpp"
#include "photoion/grid.hpp"

namespace photoion {

using Complex = std::complex<double>;

/// Channel decomposition of the wavepacket, Psi = sum_l b_l(r,t)/r Y_l0.
/// m = 0 throughout (z-polarized light from an s state).
struct ChannelWavepacket {
    RadialGrid grid;
    int l_max = 0;
    double time = 0.0;
    std::vector<std::vector<Complex>> channels; // [l][radial index]

    ChannelWavepacket() = default;
    ChannelWavepacket(const RadialGrid& g, int l_max_)
        : grid(g), l_max(l_max_),
          channels(static_cast<std::size_t>(l_max_) + 1,
                   std::vector<Complex>(g.n_points, Complex(0.0, 0.0)))
    {
        if (l_max < 0) throw std::invalid_argument("ChannelWavepacket: l_max must be >= 0");
    }

    double norm() const
    {
        double acc = 0.0;
        for (const auto& ch : channels)
            for (const auto& v : ch) acc += std::norm(v);
        return acc * grid.dr;
    }

    double boundary_density() const
    {
        double worst = 0.0;
        for (const auto& ch : channels)
            worst = std::max(worst, std::norm(ch.back()));
        return worst;
    }
};

/// Initial condition: the bound orbital fully occupies its own l channel.
inline ChannelWavepacket initial_wavepacket(const RadialGrid& grid, const BoundState& orbital,
                                            int l_max)
{
    if (orbital.u.size() != grid.n_points)
        throw std::invalid_argument("initial_wavepacket: orbital not on this grid");
    if (orbital.l > l_max)
        throw std::invalid_argument("initial_wavepacket: orbital l exceeds l_max");
    ChannelWavepacket wp(grid, l_max);
    auto& ch = wp.channels[static_cast<std::size_t>(orbital.l)];
    for (std::size_t i = 0; i < grid.n_points; ++i) ch[i] = orbital.u[i];
    return wp;
}

/// Occupation |<phi|Psi>|^2 of a bound state, taken against the matching
/// l channel.
inline double occupation(const ChannelWavepacket& wp, const BoundState& state)
{
    if (state.l > wp.l_max) return 0.0;
    const auto& ch = wp.channels[static_cast<std::size_t>(state.l)];
    const std::size_t n = std::min(ch.size(), state.u.size());
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) overlap += state.u[i] * ch[i];
    overlap *= wp.grid.dr;
    return std::norm(overlap);
}

} // namespace photoion

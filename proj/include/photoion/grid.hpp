#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace photoion {

/// Uniform radial mesh r_i = (i+1)*dr, i = 0..n_points-1 (no r = 0 point).
/// Carries the core radius r_a used as the lower bound of continuum
/// projections and the onset of the absorbing boundary.
struct RadialGrid {
    double dr = 0.01;
    std::size_t n_points = 0;
    double r_core = 5.0;           // r_a
    double absorber_start = 0.9;   // fraction of r_max where -iW ramps on
    double absorber_strength = 0.05; // W0

    RadialGrid() = default;

    RadialGrid(double dr_, std::size_t n, double r_core_ = 5.0,
               double absorber_start_ = 0.9, double w0 = 0.05)
        : dr(dr_), n_points(n), r_core(r_core_), absorber_start(absorber_start_),
          absorber_strength(w0)
    {
        if (dr <= 0.0) throw std::invalid_argument("RadialGrid: dr must be > 0");
        if (n_points == 0) throw std::invalid_argument("RadialGrid: empty grid");
        if (!(r_core > 0.0 && r_core < absorber_start * r_max() &&
              absorber_start * r_max() < r_max()))
            throw std::invalid_argument(
                "RadialGrid: need 0 < r_core < absorber_start*r_max < r_max");
    }

    static RadialGrid from_extent(double dr_, double r_max_, double r_core_ = 5.0,
                                  double absorber_start_ = 0.9, double w0 = 0.05)
    {
        auto n = static_cast<std::size_t>(std::llround(r_max_ / dr_));
        return RadialGrid(dr_, n, r_core_, absorber_start_, w0);
    }

    double r(std::size_t i) const { return (static_cast<double>(i) + 1.0) * dr; }
    double r_max() const { return dr * static_cast<double>(n_points); }
    double absorber_onset() const { return absorber_start * r_max(); }

    std::size_t index_at(double r_) const
    {
        auto i = static_cast<long long>(std::llround(r_ / dr)) - 1;
        if (i < 0) i = 0;
        if (i >= static_cast<long long>(n_points)) i = static_cast<long long>(n_points) - 1;
        return static_cast<std::size_t>(i);
    }

    std::vector<double> radii() const
    {
        std::vector<double> out(n_points);
        for (std::size_t i = 0; i < n_points; ++i) out[i] = r(i);
        return out;
    }

    // Quartic imaginary potential W(r); the propagator applies -i W.
    double absorber(double r_) const
    {
        const double rs = absorber_onset();
        if (r_ <= rs) return 0.0;
        const double x = (r_ - rs) / (r_max() - rs);
        return absorber_strength * x * x * x * x;
    }

    // FNV-1a over the defining parameters; keys caches and checkpoints.
    std::uint64_t hash() const
    {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        auto mixd = [&](double d) {
            std::uint64_t v;
            static_assert(sizeof v == sizeof d);
            __builtin_memcpy(&v, &d, sizeof v);
            mix(v);
        };
        mixd(dr);
        mix(n_points);
        mixd(r_core);
        mixd(absorber_start);
        mixd(absorber_strength);
        return h;
    }
};

} // namespace photoion

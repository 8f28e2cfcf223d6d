#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "photoion/bound.hpp"
#include "photoion/continuum.hpp"
#include "photoion/grid.hpp"
#include "photoion/potential.hpp"

namespace photoion {

/// Reduced radial dipole matrix element d = int u_bra(r) r [Q_1(r)] u_ket(r) dr.
/// `selection_blocked` marks a structured zero from |l_bra - l_ket| != 1,
/// distinguishable from an accidentally vanishing integral.
struct ReducedDipole {
    std::string bra, ket;
    double value = 0.0;
    bool selection_blocked = false;
};

inline double radial_dipole_integral(std::span<const double> u_bra,
                                     std::span<const double> u_ket,
                                     const RadialGrid& grid,
                                     const ModelPotentialParams& params,
                                     bool corrected)
{
    const std::size_t n = std::min(u_bra.size(), u_ket.size());
    double acc = 0.0;
    if (corrected) {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid.r(i);
            acc += u_bra[i] * r * corrected_multipole(params, 1, r) * u_ket[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            acc += u_bra[i] * grid.r(i) * u_ket[i];
    }
    return acc * grid.dr;
}

inline ReducedDipole reduced_dipole(const BoundState& bra, const BoundState& ket,
                                    const RadialGrid& grid,
                                    const ModelPotentialParams& params,
                                    bool corrected = true)
{
    ReducedDipole d;
    d.bra = bra.label();
    d.ket = ket.label();
    if (std::abs(bra.l - ket.l) != 1) {
        d.selection_blocked = true;
        return d;
    }
    d.value = radial_dipole_integral(bra.u, ket.u, grid, params, corrected);
    return d;
}

inline ReducedDipole reduced_dipole(const ContinuumState& bra, const BoundState& ket,
                                    const RadialGrid& grid,
                                    const ModelPotentialParams& params,
                                    bool corrected = true)
{
    ReducedDipole d;
    d.bra = "E" + std::to_string(bra.energy) + "_l" + std::to_string(bra.l);
    d.ket = ket.label();
    if (std::abs(bra.l - ket.l) != 1) {
        d.selection_blocked = true;
        return d;
    }
    d.value = radial_dipole_integral(bra.u, ket.u, grid, params, corrected);
    return d;
}

} // namespace photoion

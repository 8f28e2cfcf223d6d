#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

#include "photoion/grid.hpp"
#include "photoion/potential.hpp"

namespace photoion {

/// Bound orbital. `u` is the reduced radial function u(r) = r R(r), sampled on
/// the grid and normalized to  sum u^2 dr = 1, with the innermost lobe positive.
struct BoundState {
    int n = 0;       // spectroscopic label, node count + l + 1
    int l = 0;
    double energy = 0.0; // a.u., negative
    std::vector<double> u;

    std::string label() const
    {
        static const char* sym = "spdfghikl";
        return std::to_string(n) + (l < 9 ? sym[l] : 'x');
    }
};

inline int count_nodes(const std::vector<double>& u)
{
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double floor = 1e-7 * umax;
    int nodes = 0;
    double prev = 0.0;
    for (double v : u) {
        if (std::abs(v) <= floor) continue;
        if (prev != 0.0 && ((prev > 0.0) != (v > 0.0))) ++nodes;
        prev = v;
    }
    return nodes;
}

/// Lowest n_states eigenpairs of the radial Hamiltonian
///   H0 = -(1/2) d^2/dr^2 + l(l+1)/(2 r^2) + V_l(r)
/// on the three-point grid, via LAPACK's tridiagonal dstevr.
/// Throws if any of the requested states comes out with E >= 0 (box too small).
inline std::vector<BoundState> solve_bound(const ModelPotentialParams& params,
                                           const RadialGrid& grid, int l, int n_states)
{
    if (n_states < 1) throw std::invalid_argument("solve_bound: n_states must be >= 1");
    const auto n = static_cast<lapack_int>(grid.n_points);
    if (n < 3 || n_states > n)
        throw std::invalid_argument("solve_bound: grid too small");

    const double dr = grid.dr;
    const double inv_dr2 = 1.0 / (dr * dr);
    std::vector<double> diag(n), off(n - 1, -0.5 * inv_dr2);
    for (lapack_int i = 0; i < n; ++i) {
        const double r = grid.r(static_cast<std::size_t>(i));
        diag[i] = inv_dr2 + potential(params, l, r)
                + 0.5 * l * (l + 1) / (r * r);
    }

    std::vector<double> w(n), zmat(static_cast<std::size_t>(n) * n_states);
    std::vector<lapack_int> isuppz(2 * std::max(1, n_states));
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(),
        0.0, 0.0, 1, n_states, 0.0, &m, w.data(), zmat.data(), n, isuppz.data());
    if (info != 0)
        throw std::runtime_error("solve_bound: LAPACK dstevr failed, info=" +
                                 std::to_string(info));
    if (m < n_states)
        throw std::runtime_error("solve_bound: eigensolver returned fewer states than requested");

    std::vector<BoundState> out;
    out.reserve(n_states);
    const double inv_sqrt_dr = 1.0 / std::sqrt(dr);
    for (int j = 0; j < n_states; ++j) {
        BoundState s;
        s.l = l;
        s.energy = w[j];
        if (s.energy >= 0.0) {
            const double suggested = 2.0 * grid.r_max();
            throw std::runtime_error(
                "solve_bound: state " + std::to_string(j) + " for l=" + std::to_string(l) +
                " is not bound on this box; increase r_max (try " +
                std::to_string(suggested) + " a.u.)");
        }
        s.u.assign(zmat.begin() + static_cast<std::size_t>(j) * n,
                   zmat.begin() + static_cast<std::size_t>(j + 1) * n);
        // eigenvectors come back with unit l2 norm; convert to unit quadrature norm
        for (double& v : s.u) v *= inv_sqrt_dr;
        // inverse iteration leaves roundoff noise in the deep forbidden
        // region; flush it so the exponential tail ends cleanly
        {
            double umax = 0.0;
            for (double v : s.u) umax = std::max(umax, std::abs(v));
            const double floor = 1e-15 * umax;
            for (double& v : s.u)
                if (std::abs(v) < floor) v = 0.0;
        }
        // fix sign: first significant lobe positive
        double umax = 0.0;
        for (double v : s.u) umax = std::max(umax, std::abs(v));
        for (double v : s.u) {
            if (std::abs(v) > 1e-3 * umax) {
                if (v < 0.0)
                    for (double& x : s.u) x = -x;
                break;
            }
        }
        s.n = count_nodes(s.u) + l + 1;
        out.push_back(std::move(s));
    }
    return out;
}

/// Convenience lookup by spectroscopic principal quantum number.
inline const BoundState& find_state(const std::vector<BoundState>& states, int n)
{
    for (const auto& s : states)
        if (s.n == n) return s;
    throw std::runtime_error("find_state: no state with n=" + std::to_string(n) +
                             " in the solved set");
}

} // namespace photoion

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_coulomb.h>
#include <gsl/gsl_sf_gamma.h>

#include "photoion/constants.hpp"
#include "photoion/grid.hpp"
#include "photoion/potential.hpp"

namespace photoion {

/// Energy-normalized continuum partial wave: <u_k|u_k'> = delta(E_k - E_k'),
/// enforced through the asymptotic amplitude sqrt(2/(pi k)).
/// phase = coulomb_phase + eta is the total scattering phase delta_l(k).
struct ContinuumState {
    double k = 0.0;
    int l = 0;
    double energy = 0.0;        // k^2/2
    double phase = 0.0;         // delta_l(k)
    double coulomb_phase = 0.0; // arg Gamma(1 + l - i/k)
    double eta = 0.0;           // short-range phase eta_l(k)
    std::vector<double> u;
};

/// arg Gamma(1 + l - i/k), the Coulomb phase for unit residual charge.
inline double coulomb_phase_shift(int l, double k)
{
    if (k <= 0.0) throw std::domain_error("coulomb_phase_shift: k must be > 0");
    gsl_sf_result lnr, arg;
    const int st = gsl_sf_lngamma_complex_e(1.0 + l, -1.0 / k, &lnr, &arg);
    if (st != GSL_SUCCESS)
        throw std::runtime_error("coulomb_phase_shift: lngamma failed");
    return arg.val;
}

namespace detail {

struct CoulombFG {
    double F = 0.0, G = 0.0;
};

inline CoulombFG coulomb_fg(int l, double eta_sommerfeld, double rho)
{
    gsl_sf_result F, Fp, G, Gp;
    double expF = 0.0, expG = 0.0;
    const int st = gsl_sf_coulomb_wave_FG_e(eta_sommerfeld, rho, l, 0,
                                            &F, &Fp, &G, &Gp, &expF, &expG);
    if (st != GSL_SUCCESS && st != GSL_ELOSS)
        throw std::runtime_error("coulomb_fg: GSL Coulomb wave evaluation failed at rho=" +
                                 std::to_string(rho));
    return {F.val * std::exp(expF), G.val * std::exp(expG)};
}

// Outward Numerov for u'' = f(r) u, started from the small-r series
//   u = r^{l+1} [1 - z r/(l+1) + ((z^2/(l+1) - E)/(2l+3)) r^2]
// of the -z/r dominated region. Overall scale is arbitrary here; rescaled
// during matching.
inline void numerov_outward(const std::vector<double>& f, double dr, int l, double z,
                            double energy, std::vector<double>& u)
{
    const std::size_t n = f.size();
    u.resize(n);
    const double h2 = dr * dr;
    const double c1 = -z / (l + 1.0);
    const double c2 = (z * z / (l + 1.0) - energy) / (2.0 * l + 3.0);
    auto series = [&](double r) {
        return std::pow(r, l + 1) * (1.0 + c1 * r + c2 * r * r);
    };
    u[0] = series(dr);
    u[1] = series(2.0 * dr);
    double w_prev = (1.0 - h2 / 12.0 * f[0]) * u[0];
    double w_cur = (1.0 - h2 / 12.0 * f[1]) * u[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double w_next = 2.0 * w_cur - w_prev + h2 * f[i] * u[i];
        w_prev = w_cur;
        w_cur = w_next;
        u[i + 1] = w_cur / (1.0 - h2 / 12.0 * f[i + 1]);
        if (std::abs(u[i + 1]) > 1e150) {
            const double s = 1e-150;
            for (std::size_t j = 0; j <= i + 1; ++j) u[j] *= s;
            w_prev *= s;
            w_cur *= s;
        }
    }
}

} // namespace detail

/// Continuum solution by outward Numerov integration in V_l, matched to the
/// regular/irregular Coulomb pair at r_match to extract eta_l(k) and fix the
/// energy normalization. r_match defaults to max(50, 10 r_c) but never past
/// ~3/4 of the box.
inline ContinuumState solve_continuum(const ModelPotentialParams& params,
                                      const RadialGrid& grid, int l, double k,
                                      double r_match = 0.0)
{
    if (k <= 0.0) throw std::domain_error("solve_continuum: k must be > 0");
    ContinuumState st;
    st.k = k;
    st.l = l;
    st.energy = 0.5 * k * k;
    st.coulomb_phase = coulomb_phase_shift(l, k);

    if (r_match <= 0.0) {
        // push the match point outward on large boxes: the polarization tail
        // phase, ~alpha_c/(6 k r^3), is amplified by 1/k at low energies
        r_match = std::max({50.0, 10.0 * params.coeffs(l).r_c,
                            std::min(0.1 * grid.r_max(), 300.0)});
    }
    r_match = std::min(r_match, 0.75 * grid.r_max());
    if (r_match < 10.0 * params.coeffs(l).r_c)
        throw std::runtime_error("solve_continuum: matching radius sits inside the "
                                 "short-range region; enlarge the grid");
    // the short-range terms must be dead at the matching point
    const double v_dev = std::abs(potential(params, l, r_match) + 1.0 / r_match);
    if (v_dev > 1e-4)
        throw std::runtime_error("solve_continuum: potential is not Coulombic at the "
                                 "matching radius (deviation " + std::to_string(v_dev) + ")");

    const std::size_t n = grid.n_points;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.r(i);
        f[i] = 2.0 * (potential(params, l, r) + 0.5 * l * (l + 1) / (r * r) - st.energy);
    }
    detail::numerov_outward(f, grid.dr, l, params.z, st.energy, st.u);

    // two matching points separated by about a quarter wavelength
    const std::size_t i1 = grid.index_at(r_match);
    const std::size_t sep = std::max<std::size_t>(3,
        static_cast<std::size_t>(std::lround(0.5 * pi / k / grid.dr)));
    const std::size_t i2 = std::min(i1 + sep, n - 2);
    const std::size_t i3 = std::min(i2 + sep, n - 1); // consistency check point
    if (i2 <= i1 || i3 <= i2)
        throw std::runtime_error("solve_continuum: grid too short for matching");

    const double eta_s = -1.0 / k; // attractive unit-charge Sommerfeld parameter
    const auto fg1 = detail::coulomb_fg(l, eta_s, k * grid.r(i1));
    const auto fg2 = detail::coulomb_fg(l, eta_s, k * grid.r(i2));
    const double det = fg1.F * fg2.G - fg2.F * fg1.G;
    if (std::abs(det) < 1e-14)
        throw std::runtime_error("solve_continuum: degenerate matching system");
    const double a = (st.u[i1] * fg2.G - st.u[i2] * fg1.G) / det;
    const double b = (st.u[i2] * fg1.F - st.u[i1] * fg2.F) / det;

    const auto fg3 = detail::coulomb_fg(l, eta_s, k * grid.r(i3));
    const double predicted = a * fg3.F + b * fg3.G;
    const double scale_ref = std::hypot(a, b);
    if (std::abs(predicted - st.u[i3]) > 1e-4 * scale_ref)
        throw std::runtime_error("solve_continuum: matching inconsistent at the check "
                                 "point; refine dr or move r_match outward");

    st.eta = std::atan2(b, a);
    st.phase = st.coulomb_phase + st.eta;
    const double norm = std::sqrt(2.0 / (pi * k)) / scale_ref;
    for (double& v : st.u) v *= norm;
    return st;
}

} // namespace photoion

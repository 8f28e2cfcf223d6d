#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "photoion/angular.hpp"
#include "photoion/constants.hpp"
#include "photoion/continuum.hpp"
#include "photoion/wavepacket.hpp"

namespace photoion {

/// Projection coefficients a_l(k) on an energy mesh, including the phase
/// prefactor exp(i(E_k T_obs + delta_l - l pi/2)).
struct PartialWaveAmplitudes {
    std::vector<double> energies; // a.u.
    int l_max = 0;
    double t_obs = 0.0;
    std::vector<std::vector<Complex>> a; // [l][energy index]

    double sigma_l(int l, std::size_t ie) const
    {
        return std::norm(a[static_cast<std::size_t>(l)][ie]);
    }
    double sigma_total(std::size_t ie) const
    {
        double s = 0.0;
        for (int l = 0; l <= l_max; ++l) s += sigma_l(l, ie);
        return s;
    }
};

inline std::vector<double> uniform_energy_mesh(double e_lo_ev = 0.05, double e_hi_ev = 1.5,
                                               std::size_t n = 400)
{
    if (n < 2) throw std::invalid_argument("uniform_energy_mesh: need at least 2 points");
    std::vector<double> e(n);
    const double lo = ev_to_au(e_lo_ev), hi = ev_to_au(e_hi_ev);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return e;
}

/// Project the wavepacket onto energy-normalized continuum waves,
/// integrating from r_core to the absorber onset. The wavepacket must be
/// taken after all pulses are off (pass their switch-off time). When solved
/// bound states are supplied, each channel is first orthogonalized against
/// them: the still-bound population otherwise leaks into the projection
/// through the restricted integration range.
inline PartialWaveAmplitudes project_continuum(const ChannelWavepacket& wp,
                                               const ModelPotentialParams& params,
                                               std::span<const double> energies,
                                               double fields_off_time,
                                               int l_max_project = -1,
                                               std::span<const BoundState> subtract = {})
{
    if (wp.time < fields_off_time - 1e-9)
        throw std::runtime_error("project_continuum: wavepacket taken at t=" +
                                 std::to_string(wp.time) +
                                 " while fields are still on; propagate past " +
                                 std::to_string(fields_off_time));
    PartialWaveAmplitudes out;
    out.energies.assign(energies.begin(), energies.end());
    out.l_max = l_max_project < 0 ? wp.l_max : std::min(l_max_project, wp.l_max);
    out.t_obs = wp.time;
    out.a.assign(static_cast<std::size_t>(out.l_max) + 1,
                 std::vector<Complex>(energies.size(), Complex(0.0, 0.0)));

    const std::size_t i_lo = wp.grid.index_at(wp.grid.r_core);
    const std::size_t i_hi = wp.grid.index_at(wp.grid.absorber_onset());
    std::vector<Complex> b;
    for (int l = 0; l <= out.l_max; ++l) {
        b = wp.channels[static_cast<std::size_t>(l)];
        for (const auto& bs : subtract) {
            if (bs.l != l || bs.u.size() != b.size()) continue;
            Complex ov = 0.0;
            for (std::size_t i = 0; i < b.size(); ++i) ov += bs.u[i] * b[i];
            ov *= wp.grid.dr;
            for (std::size_t i = 0; i < b.size(); ++i) b[i] -= ov * bs.u[i];
        }
        for (std::size_t ie = 0; ie < energies.size(); ++ie) {
            const double ek = energies[ie];
            const double k = std::sqrt(2.0 * ek);
            const auto cs = solve_continuum(params, wp.grid, l, k);
            Complex overlap = 0.0;
            for (std::size_t i = i_lo; i < i_hi; ++i) overlap += b[i] * cs.u[i];
            overlap *= wp.grid.dr;
            const Complex pref =
                std::exp(Complex(0.0, ek * wp.time + cs.phase - 0.5 * l * pi));
            out.a[static_cast<std::size_t>(l)][ie] = pref * overlap;
        }
    }
    return out;
}

/// DCS(theta) = |sum_l a_l Y_l0(theta)|^2 at one mesh energy.
inline std::vector<double> dcs(const PartialWaveAmplitudes& amps, std::size_t ie,
                               std::span<const double> theta)
{
    std::vector<double> out(theta.size());
    for (std::size_t it = 0; it < theta.size(); ++it) {
        Complex f = 0.0;
        for (int l = 0; l <= amps.l_max; ++l)
            f += amps.a[static_cast<std::size_t>(l)][ie] * sph_harmonic_y_l0(l, theta[it]);
        out[it] = std::norm(f);
    }
    return out;
}

/// arg of the coherent partial-wave sum at one energy and angle.
inline double quantum_phase(const PartialWaveAmplitudes& amps, std::size_t ie, double theta)
{
    Complex f = 0.0;
    double weight = 0.0;
    for (int l = 0; l <= amps.l_max; ++l) {
        const Complex al = amps.a[static_cast<std::size_t>(l)][ie];
        weight += std::norm(al);
        f += al * sph_harmonic_y_l0(l, theta);
    }
    if (weight < 1e-300 || std::abs(f) == 0.0)
        throw std::runtime_error("quantum_phase: all partial-wave amplitudes vanish at this "
                                 "energy; the phase is undefined");
    return std::arg(f);
}

namespace detail {

inline void unwrap_inplace(std::vector<double>& phi)
{
    for (std::size_t i = 1; i < phi.size(); ++i) {
        double d = phi[i] - phi[i - 1];
        while (d > pi) { phi[i] -= 2.0 * pi; d = phi[i] - phi[i - 1]; }
        while (d < -pi) { phi[i] += 2.0 * pi; d = phi[i] - phi[i - 1]; }
    }
}

} // namespace detail

/// Phase along the energy mesh at fixed angle, unwrapped.
inline std::vector<double> phase_vs_energy(const PartialWaveAmplitudes& amps, double theta)
{
    std::vector<double> phi(amps.energies.size());
    for (std::size_t ie = 0; ie < amps.energies.size(); ++ie)
        phi[ie] = quantum_phase(amps, ie, theta);
    detail::unwrap_inplace(phi);
    return phi;
}

/// Quantum phase averaged over the ionization probability sigma(E_k).
inline double averaged_phase(const PartialWaveAmplitudes& amps, double theta)
{
    const auto phi = phase_vs_energy(amps, theta);
    double num = 0.0, den = 0.0;
    for (std::size_t ie = 0; ie < amps.energies.size(); ++ie) {
        double w = amps.sigma_total(ie);
        if (ie == 0 || ie + 1 == amps.energies.size()) w *= 0.5; // trapezoid ends
        num += w * phi[ie];
        den += w;
    }
    if (den <= 0.0) throw std::runtime_error("averaged_phase: zero total cross section");
    return num / den;
}

/// Wigner delay tau_W = d phi / d E_k by centered differences on the
/// unwrapped phase. Index ie must have both neighbors on the mesh.
inline double wigner_delay(const PartialWaveAmplitudes& amps, std::size_t ie, double theta)
{
    if (ie == 0 || ie + 1 >= amps.energies.size())
        throw std::invalid_argument("wigner_delay: need an interior mesh point");
    const auto phi = phase_vs_energy(amps, theta);
    const double jump_prev = std::abs(phi[ie] - phi[ie - 1]);
    const double jump_next = std::abs(phi[ie + 1] - phi[ie]);
    if (jump_prev > 0.5 * pi || jump_next > 0.5 * pi)
        throw std::runtime_error("wigner_delay: phase varies too fast between mesh points; "
                                 "refine the energy mesh");
    return (phi[ie + 1] - phi[ie - 1]) / (amps.energies[ie + 1] - amps.energies[ie - 1]);
}

struct PeakInfo {
    double position = 0.0; // a.u.
    double height = 0.0;
    double fwhm = 0.0;     // a.u.; 0 if the half level never crosses
};

/// Parabolic-refined maximum and linear-interpolated FWHM of sigma(E).
inline PeakInfo analyze_peak(std::span<const double> e, std::span<const double> sigma)
{
    if (e.size() != sigma.size() || e.size() < 3)
        throw std::invalid_argument("analyze_peak: need matching arrays of >= 3 points");
    std::size_t im = 0;
    for (std::size_t i = 1; i < sigma.size(); ++i)
        if (sigma[i] > sigma[im]) im = i;
    PeakInfo out;
    out.position = e[im];
    out.height = sigma[im];
    if (im > 0 && im + 1 < sigma.size()) {
        const double y0 = sigma[im - 1], y1 = sigma[im], y2 = sigma[im + 1];
        const double den = y0 - 2.0 * y1 + y2;
        if (std::abs(den) > 1e-300) {
            const double shift = 0.5 * (y0 - y2) / den;
            out.position = e[im] + shift * (e[1] - e[0]);
            out.height = y1 - 0.25 * (y0 - y2) * shift;
        }
    }
    const double half = 0.5 * out.height;
    double left = e.front(), right = e.back();
    for (std::size_t i = im; i-- > 0;) {
        if (sigma[i] <= half) {
            const double f = (half - sigma[i]) / (sigma[i + 1] - sigma[i]);
            left = e[i] + f * (e[i + 1] - e[i]);
            break;
        }
        if (i == 0) return out; // never crossed on the left
    }
    for (std::size_t i = im; i + 1 < sigma.size(); ++i) {
        if (sigma[i + 1] <= half) {
            const double f = (sigma[i] - half) / (sigma[i] - sigma[i + 1]);
            right = e[i] + f * (e[i + 1] - e[i]);
            out.fwhm = right - left;
            return out;
        }
    }
    return out;
}

} // namespace photoion

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "photoion/kernels.hpp"
#include "photoion/pulses.hpp"

namespace photoion {

/// Ground -> f single-photon data: transition frequency and the m = 0
/// z matrix element <f|z|0> (angular factor times reduced radial element).
struct BoundTransition {
    double omega_0f = 0.0;
    double z_me = 0.0;
};

/// One intermediate state n in a two-photon path 0 -> n -> f.
struct DipolePath {
    double omega_0n = 0.0; // E_n - E_0
    double z_n0 = 0.0;     // <n|z|0>
    double z_fn = 0.0;     // <f|z|n>
};

namespace detail {

inline Complex carrier_phase(const LaserPulse& p, int lambda)
{
    return std::exp(Complex(0.0, lambda * (p.omega * p.delta_t + p.phase)));
}

inline EnvelopeParams env_of(const LaserPulse& p) { return EnvelopeParams(p.duration()); }

} // namespace detail

/// First-order amplitude d1(t) for photoexcitation 0 -> f, all pulses and
/// both rotating and counter-rotating terms (lambda = -1, +1) retained.
inline Complex d1_amplitude(std::span<const LaserPulse> pulses,
                            const BoundTransition& f, double t)
{
    Complex sum = 0.0;
    for (const auto& p : pulses) {
        if (p.amplitude == 0.0) continue;
        const double efield = p.amplitude * p.omega;
        const auto env = detail::env_of(p);
        for (int lambda : {-1, 1}) {
            sum += efield * detail::carrier_phase(p, lambda)
                 * f1_kernel(env, f.omega_0f, lambda * p.omega, p.delta_t, t);
        }
    }
    return Complex(0.0, -0.5) * f.z_me * sum;
}

/// Second-order amplitude d2(t) for 0 -> n -> f through the listed
/// intermediates, summed over all ordered pulse pairs (j outer, i inner)
/// and both lambda signs per pulse. Written in terms of the bare kernel
/// G2, so the textbook energy denominator cancels identically and exact
/// intermediate resonance needs no special handling.
inline Complex d2_amplitude(std::span<const LaserPulse> pulses,
                            std::span<const DipolePath> paths,
                            double omega_0f, double t)
{
    Complex total = 0.0;
    for (const auto& pj : pulses) {
        if (pj.amplitude == 0.0) continue;
        for (const auto& pi : pulses) {
            if (pi.amplitude == 0.0) continue;
            const double pref = 0.25 * pj.amplitude * pj.omega * pi.amplitude * pi.omega;
            const auto envj = detail::env_of(pj);
            const auto envi = detail::env_of(pi);
            for (int lj : {-1, 1}) {
                for (int li : {-1, 1}) {
                    const Complex phases =
                        detail::carrier_phase(pj, lj) * detail::carrier_phase(pi, li);
                    for (const auto& n : paths) {
                        const double omega_nf = omega_0f - n.omega_0n;
                        total += pref * phases * n.z_fn * n.z_n0
                               * g2_kernel(envj, envi, omega_nf, n.omega_0n,
                                           lj * pj.omega, li * pi.omega,
                                           pj.delta_t, pi.delta_t, t);
                    }
                }
            }
        }
    }
    return -total;
}

/// Traditional cw two-photon matrix element
///   M = sum_n [ z_fn z_n0 / (omega_n0 - omega_first) ]
/// for a fixed photon ordering (omega_first absorbed first). Throws on a
/// near-singular denominator: the cw form is only valid off intermediate
/// resonance, use the finite-pulse kernels otherwise.
inline Complex two_photon_element_cw(std::span<const DipolePath> paths, double omega_first,
                                     double min_detuning = 1e-6)
{
    Complex sum = 0.0;
    for (const auto& n : paths) {
        const double den = n.omega_0n - omega_first;
        if (std::abs(den) < min_detuning)
            throw std::runtime_error(
                "two_photon_element_cw: intermediate state within " +
                std::to_string(min_detuning) +
                " a.u. of resonance; the cw denominator form is singular here");
        sum += n.z_fn * n.z_n0 / den;
    }
    return sum;
}

} // namespace photoion

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "photoion/constants.hpp"

namespace photoion {

enum class PulseLabel { ir, bl, control };

inline const char* to_string(PulseLabel p)
{
    switch (p) {
        case PulseLabel::ir: return "IR";
        case PulseLabel::bl: return "BL";
        case PulseLabel::control: return "CONTROL";
    }
    return "?";
}

/// Linearly z-polarized laser pulse with a cos^2 envelope,
///   field(t) = amplitude * Omega(t + delta_t) * cos(omega (t + delta_t) + phase),
///   Omega(x) = cos^2(pi x / T_d) on [-T_d/2, T_d/2], exactly zero outside.
///
/// `amplitude` is the coupling amplitude as calibrated in velocity gauge
/// (it multiplies the momentum operator); the corresponding electric-field
/// envelope used by the length-gauge Hamiltonian and the perturbation kernels
/// is omega * amplitude within the slowly-varying-envelope approximation,
/// and vector_potential() is its exact antiderivative so the two gauges
/// describe identical physics.
struct LaserPulse {
    double omega = 0.0;     // carrier angular frequency, a.u.
    double amplitude = 0.0; // peak coupling amplitude, a.u.
    double n_cycles = 1.0;
    double delta_t = 0.0;   // time shift Delta_p
    double phase = 0.0;     // carrier phase phi_p
    PulseLabel label = PulseLabel::ir;
    double duration_override = 0.0; // > 0: shared-duration mode, replaces 2 pi n/omega

    LaserPulse() = default;
    LaserPulse(double omega_, double amplitude_, double n_cycles_, double delta_t_ = 0.0,
               double phase_ = 0.0, PulseLabel label_ = PulseLabel::ir)
        : omega(omega_), amplitude(amplitude_), n_cycles(n_cycles_), delta_t(delta_t_),
          phase(phase_), label(label_)
    {
        if (omega <= 0.0) throw std::invalid_argument("LaserPulse: omega must be > 0");
        if (amplitude < 0.0) throw std::invalid_argument("LaserPulse: amplitude must be >= 0");
        if (n_cycles < 1.0) throw std::invalid_argument("LaserPulse: n_cycles must be >= 1");
    }

    double duration() const
    {
        return duration_override > 0.0 ? duration_override : 2.0 * pi * n_cycles / omega;
    }

    // support of the envelope in t
    double start() const { return -0.5 * duration() - delta_t; }
    double stop() const { return 0.5 * duration() - delta_t; }

    double envelope(double t) const
    {
        const double T = duration();
        const double x = t + delta_t;
        if (std::abs(x) >= 0.5 * T) return 0.0;
        const double c = std::cos(pi * x / T);
        return c * c;
    }

    double field(double t) const
    {
        const double env = envelope(t);
        if (env == 0.0) return 0.0;
        return amplitude * env * std::cos(omega * (t + delta_t) + phase);
    }

    double electric_field(double t) const { return omega * field(t); }

    /// Running integral of the envelope from the left edge; T_d/2 over full support.
    double envelope_integral(double t) const
    {
        const double T = duration();
        const double x = std::clamp(t + delta_t, -0.5 * T, 0.5 * T);
        return 0.5 * x + 0.25 * T + T / (4.0 * pi) * std::sin(2.0 * pi * x / T);
    }

    /// A(t) = -int_{-inf}^{t} E(t') dt', in closed form.
    double vector_potential(double t) const
    {
        const double T = duration();
        const double x = std::clamp(t + delta_t, -0.5 * T, 0.5 * T);
        const double mu = 2.0 * pi / T;
        auto piece = [this, x, T](double nu, double weight) {
            return weight * (std::sin(nu * x + phase) - std::sin(-nu * 0.5 * T + phase)) / nu;
        };
        double integral = piece(omega, 0.5);
        if (omega + mu != 0.0) integral += piece(omega + mu, 0.25);
        if (omega - mu != 0.0) integral += piece(omega - mu, 0.25);
        return -amplitude * omega * integral;
    }
};

/// omega from a solved transition energy plus detuning (both a.u.).
inline double carrier_from_transition(double e_upper, double e_lower, double detuning = 0.0)
{
    const double w = e_upper - e_lower + detuning;
    if (w <= 0.0)
        throw std::invalid_argument("carrier_from_transition: nonpositive carrier frequency");
    return w;
}

} // namespace photoion

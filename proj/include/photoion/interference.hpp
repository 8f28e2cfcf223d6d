#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "photoion/amplitudes.hpp"
#include "photoion/angular.hpp"
#include "photoion/bound.hpp"
#include "photoion/constants.hpp"
#include "photoion/continuum.hpp"
#include "photoion/dipole.hpp"
#include "photoion/kernels.hpp"
#include "photoion/pulses.hpp"

namespace photoion {

/// Complex pathway amplitudes over an angle mesh plus their s/d-wave parts.
/// t_i(theta) = S0 e^{i phi_0} Y00 + S2 e^{i phi_2} Y20, phi_l = delta_l - l pi/2.
struct PathwayAmplitudes {
    Complex s_wave{}, d_wave{};       // S_l including fields, kernels, angular factors
    std::vector<Complex> t;           // over the theta mesh
    double norm() const { return std::sqrt(std::norm(s_wave) + std::norm(d_wave)); }
};

struct InterferenceResult {
    std::vector<double> theta;        // radians
    std::vector<Complex> t1, t2;
    std::vector<double> dcs_t1, dcs_t2, dcs_total, dcs_interf;
    std::vector<double> delta_phi12;  // radians in [0, pi]; NaN where masked
    double nu = 0.0;                  // (d2/d0)_path1 : (d2/d0)_path2
    double delta_e = 0.0;             // intermediate-state energy gap, a.u.
    double e_final = 0.0;             // a.u.
    double detuning1 = 0.0, detuning2 = 0.0; // a.u., as used
};

inline std::vector<double> degree_mesh(double step_deg = 1.0)
{
    std::vector<double> th;
    for (double d = 0.0; d < 360.0 - 1e-9; d += step_deg) th.push_back(deg_to_rad(d));
    return th;
}

/// DCS_interf = t1 t2* + t2 t1* pointwise.
inline std::vector<double> interference_dcs(std::span<const Complex> t1,
                                            std::span<const Complex> t2)
{
    if (t1.size() != t2.size())
        throw std::invalid_argument("interference_dcs: mesh mismatch");
    std::vector<double> out(t1.size());
    for (std::size_t i = 0; i < t1.size(); ++i)
        out[i] = 2.0 * std::real(t1[i] * std::conj(t2[i]));
    return out;
}

/// Delta phi_12 = arccos[ (t1 t2* + t2 t1*) / (2 |t1| |t2|) ], in [0, pi];
/// NaN where either amplitude is below `threshold` relative to its mesh peak.
inline std::vector<double> phase_difference(std::span<const Complex> t1,
                                            std::span<const Complex> t2,
                                            double threshold = 1e-12)
{
    if (t1.size() != t2.size())
        throw std::invalid_argument("phase_difference: mesh mismatch");
    double peak = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i)
        peak = std::max(peak, std::max(std::abs(t1[i]), std::abs(t2[i])));
    std::vector<double> out(t1.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        const double m1 = std::abs(t1[i]), m2 = std::abs(t2[i]);
        if (m1 < threshold * peak || m2 < threshold * peak) {
            out[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double c = std::real(t1[i] * std::conj(t2[i])) / (m1 * m2);
        out[i] = std::acos(std::clamp(c, -1.0, 1.0));
    }
    return out;
}

/// Two-color two-pathway model: ground s state, a set of intermediate p
/// states, pulse pair resonant with the (n1, n2) intermediates. Pathway 1
/// absorbs pulse 1 first (through n1), pathway 2 absorbs pulse 2 first.
/// Kernel durations follow the cw-proxy convention T = 2 pi n_cycles /
/// omega1_resonant, shared by both pulses and held fixed under detuning.
class TwoPathwayModel {
public:
    TwoPathwayModel(const ModelPotentialParams& params, const RadialGrid& grid,
                    const BoundState& ground, std::vector<BoundState> p_states,
                    int n1, int n2, double n_cycles,
                    double amp1 = 0.007, double amp2 = 0.05)
        : params_(params), grid_(grid), ground_(ground), p_states_(std::move(p_states)),
          n_cycles_(n_cycles), amp1_(amp1), amp2_(amp2)
    {
        idx1_ = index_of(n1);
        idx2_ = index_of(n2);
        for (const auto& s : p_states_)
            d_n0_.push_back(radial_dipole_integral(s.u, ground_.u, grid_, params_, true));
    }

    double ground_energy() const { return ground_.energy; }
    double intermediate_energy(int which) const
    {
        return p_states_[which == 1 ? idx1_ : idx2_].energy;
    }
    double bound_bound_dipole(int which) const { return d_n0_[which == 1 ? idx1_ : idx2_]; }
    double resonant_omega1() const { return p_states_[idx1_].energy - ground_.energy; }
    double resonant_omega2() const { return p_states_[idx2_].energy - ground_.energy; }
    double delta_e() const
    {
        return std::abs(p_states_[idx2_].energy - p_states_[idx1_].energy);
    }
    double n_cycles() const { return n_cycles_; }

    struct Evaluation {
        PathwayAmplitudes path1, path2;
        double e_final = 0.0;
        double delta_l0 = 0.0, delta_l2 = 0.0; // continuum phases at E_f
        double nu = 0.0;
        double omega1 = 0.0, omega2 = 0.0;
        double kernel_duration = 0.0;
        std::vector<double> theta;
        std::vector<std::string> warnings;
    };

    /// Pathway amplitudes at the final energy set by the (possibly detuned)
    /// photon pair. Detunings in a.u. A control pulse, when present, only
    /// matters for the higher-level scheme; it is ignored here.
    Evaluation evaluate(double dw1, double dw2, std::span<const double> theta,
                        double phase1 = 0.0, double phase2 = 0.0) const
    {
        Evaluation ev;
        ev.theta.assign(theta.begin(), theta.end());
        ev.omega1 = resonant_omega1() + dw1;
        ev.omega2 = resonant_omega2() + dw2;
        ev.e_final = ground_.energy + ev.omega1 + ev.omega2;
        if (ev.e_final <= 0.0)
            throw std::runtime_error("TwoPathwayModel: final energy below threshold");
        ev.kernel_duration = 2.0 * pi * n_cycles_ / resonant_omega1();

        const double k = std::sqrt(2.0 * ev.e_final);
        const auto c0 = solve_continuum(params_, grid_, 0, k);
        const auto c2 = solve_continuum(params_, grid_, 2, k);
        ev.delta_l0 = c0.phase;
        ev.delta_l2 = c2.phase;

        // bound-continuum reduced elements at E_f
        std::vector<double> dc0(p_states_.size()), dc2(p_states_.size());
        for (std::size_t j = 0; j < p_states_.size(); ++j) {
            dc0[j] = radial_dipole_integral(c0.u, p_states_[j].u, grid_, params_, true);
            dc2[j] = radial_dipole_integral(c2.u, p_states_[j].u, grid_, params_, true);
        }
        const double r1 = dc2[idx1_] / dc0[idx1_];
        const double r2 = dc2[idx2_] / dc0[idx2_];
        ev.nu = r1 / r2;

        const EnvelopeParams env(ev.kernel_duration);
        const double t_off = 0.5 * ev.kernel_duration + 1.0;
        const double ang_in = dipole_angular_z(1, 0);

        auto pathway = [&](double w_in, double w_out, double amp_in, double amp_out,
                           double ph_in, double ph_out) {
            PathwayAmplitudes pa;
            const double pref_field = 0.25 * (amp_in * w_in) * (amp_out * w_out);
            const Complex carrier = std::exp(Complex(0.0, -(ph_in + ph_out)));
            for (std::size_t j = 0; j < p_states_.size(); ++j) {
                const double w0n = p_states_[j].energy - ground_.energy;
                const double wnf = ev.e_final - p_states_[j].energy;
                const Complex g = g2_kernel(env, env, wnf, w0n, -w_out, -w_in, 0.0, 0.0, t_off);
                const Complex base = -pref_field * carrier * ang_in * d_n0_[j] * g;
                pa.s_wave += base * dipole_angular_z(0, 1) * dc0[j];
                pa.d_wave += base * dipole_angular_z(2, 1) * dc2[j];
            }
            const Complex ph0 = std::exp(Complex(0.0, ev.delta_l0));
            const Complex ph2 = std::exp(Complex(0.0, ev.delta_l2 - pi));
            pa.t.resize(theta.size());
            for (std::size_t it = 0; it < theta.size(); ++it)
                pa.t[it] = pa.s_wave * ph0 * sph_harmonic_y_l0(0, theta[it])
                         + pa.d_wave * ph2 * sph_harmonic_y_l0(2, theta[it]);
            return pa;
        };

        ev.path1 = pathway(ev.omega1, ev.omega2, amp1_, amp2_, phase1, phase2);
        ev.path2 = pathway(ev.omega2, ev.omega1, amp2_, amp1_, phase2, phase1);
        if (ev.path1.norm() < 1e-30 && ev.path2.norm() < 1e-30)
            ev.warnings.push_back("both pathways carry near-zero amplitude at this "
                                  "configuration");
        return ev;
    }

    /// One-photon control amplitude at E_f (resonant carrier omega = E_f - E_0),
    /// as a complex curve over theta, for a reference amplitude amp_c.
    std::vector<Complex> control_amplitude(double e_final, std::span<const double> theta,
                                           double amp_c, double n_cycles_ctl,
                                           double phase_c = 0.0) const
    {
        const double w_c = e_final - ground_.energy;
        const double k = std::sqrt(2.0 * e_final);
        const auto c1 = solve_continuum(params_, grid_, 1, k);
        const double d_c = radial_dipole_integral(c1.u, ground_.u, grid_, params_, true);
        const double T = 2.0 * pi * n_cycles_ctl / resonant_omega1();
        const EnvelopeParams env(T);
        const Complex f1 = f1_kernel(env, w_c, -w_c, 0.0, 0.5 * T + 1.0);
        const Complex amp = Complex(0.0, -0.5) * (amp_c * w_c) * dipole_angular_z(1, 0) * d_c
                          * std::exp(Complex(0.0, -phase_c)) * f1
                          * std::exp(Complex(0.0, c1.phase - 0.5 * pi));
        std::vector<Complex> t(theta.size());
        for (std::size_t it = 0; it < theta.size(); ++it)
            t[it] = amp * sph_harmonic_y_l0(1, theta[it]);
        return t;
    }

private:
    std::size_t index_of(int n) const
    {
        for (std::size_t j = 0; j < p_states_.size(); ++j)
            if (p_states_[j].n == n) return j;
        throw std::runtime_error("TwoPathwayModel: intermediate " + std::to_string(n) +
                                 "p not in the solved set");
    }

    ModelPotentialParams params_;
    RadialGrid grid_;
    BoundState ground_;
    std::vector<BoundState> p_states_;
    std::vector<double> d_n0_;
    std::size_t idx1_ = 0, idx2_ = 0;
    double n_cycles_;
    double amp1_, amp2_;
};

inline InterferenceResult make_interference_result(const TwoPathwayModel::Evaluation& ev,
                                                   double dw1, double dw2)
{
    InterferenceResult res;
    res.theta = ev.theta;
    res.t1 = ev.path1.t;
    res.t2 = ev.path2.t;
    res.nu = ev.nu;
    res.e_final = ev.e_final;
    res.detuning1 = dw1;
    res.detuning2 = dw2;
    const std::size_t n = res.theta.size();
    res.dcs_t1.resize(n);
    res.dcs_t2.resize(n);
    res.dcs_total.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.dcs_t1[i] = std::norm(res.t1[i]);
        res.dcs_t2[i] = std::norm(res.t2[i]);
        res.dcs_total[i] = std::norm(res.t1[i] + res.t2[i]);
    }
    res.dcs_interf = interference_dcs(res.t1, res.t2);
    res.delta_phi12 = phase_difference(res.t1, res.t2);
    return res;
}

struct BalanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root of |t1|(dw) - |t2|(dw) by bisection in the detuning of the pulse
/// feeding the stronger bound-bound transition (L2 amplitude norms). Returns
/// the detuning in a.u.; `which` reports the detuned pathway (1 or 2).
inline double balance_detuning(const TwoPathwayModel& model, int& which,
                               double bracket_hi_ev = 0.4, double rel_tol = 1e-3)
{
    which = std::abs(model.bound_bound_dipole(1)) >= std::abs(model.bound_bound_dipole(2))
                ? 1 : 2;
    const std::vector<double> th = {0.0}; // norms are theta-independent
    auto g = [&](double dw_au) {
        const auto ev = which == 1 ? model.evaluate(dw_au, 0.0, th)
                                   : model.evaluate(0.0, dw_au, th);
        return ev.path1.norm() - ev.path2.norm();
    };
    double lo = 0.0, hi = ev_to_au(bracket_hi_ev);
    double g_lo = g(lo), g_hi = g(hi);
    if (g_lo == 0.0) return 0.0;
    if (g_lo * g_hi > 0.0) {
        std::string scan = "balance_detuning: no sign change in [0, " +
                           std::to_string(bracket_hi_ev) + " eV]; scan:";
        for (int i = 0; i <= 8; ++i) {
            const double d = hi * i / 8.0;
            scan += " g(" + std::to_string(au_to_ev(d)) + " eV)=" + std::to_string(g(d));
        }
        throw BalanceError(scan);
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        const auto ev = which == 1 ? model.evaluate(mid, 0.0, th)
                                   : model.evaluate(0.0, mid, th);
        if (std::abs(gm) < rel_tol * ev.path1.norm()) return mid;
        if ((gm > 0.0) == (g_lo > 0.0)) { lo = mid; g_lo = gm; }
        else hi = mid;
    }
    return mid;
}

/// Balanced interference observables for one intermediate pair.
inline InterferenceResult pair_interference(const TwoPathwayModel& model,
                                            std::span<const double> theta,
                                            std::optional<double> forced_dw1 = {},
                                            double dw2 = 0.0)
{
    double dw1 = 0.0;
    if (forced_dw1) {
        dw1 = *forced_dw1;
    } else {
        int which = 0;
        const double dw = balance_detuning(model, which);
        if (which == 1) dw1 = dw;
        else dw2 += dw;
    }
    auto res = make_interference_result(model.evaluate(dw1, dw2, theta), dw1, dw2);
    res.delta_e = model.delta_e();
    return res;
}

// ---------------------------------------------------------------------------
// Control-field scheme: four measurements and the reconstruction identity.
// ---------------------------------------------------------------------------

struct ControlSchemeResult {
    double strength = 0.0;             // |t_contr| / |t1 + t2|
    std::vector<double> theta;
    std::vector<double> dcs_reconstructed; // |t_all|^2 - (|t_ii|^2 + |t_iii|^2 - |t_iv|^2)
    std::vector<double> dcs_direct;        // 2 Re(t1 t2*) of the unblocked config
    std::vector<double> delta_phi12;       // between t1 and t2 in the presence of control
    std::vector<std::string> warnings;
};

struct ControlSchemeConfig {
    double block1_ev = 0.14; // detuning that closes pathway 1
    double block2_ev = 0.13; // detuning that closes pathway 2
    double n_cycles_control = 75.0;
    bool ideal_blocking = false; // reuse identical t1/t2 in all four measurements
};

/// Simulates the four configurations of the reconstruction protocol and
/// combines them. With ideal_blocking the identity
/// reconstruction == 2 Re(t1 t2*) holds exactly; with realistic detuned
/// blocking the residual amplitudes grow with control strength and can flip
/// the sign of the recovered interference.
inline ControlSchemeResult control_scheme(const TwoPathwayModel& model,
                                          std::span<const double> theta,
                                          double balanced_dw1, double strength,
                                          const ControlSchemeConfig& cfg = {})
{
    ControlSchemeResult out;
    out.strength = strength;
    out.theta.assign(theta.begin(), theta.end());

    const auto ev_i = model.evaluate(balanced_dw1, 0.0, theta);
    const auto ev_ii = model.evaluate(balanced_dw1, ev_to_au(cfg.block2_ev), theta);
    const auto ev_iii = model.evaluate(ev_to_au(cfg.block1_ev), 0.0, theta);
    const auto ev_iv = model.evaluate(ev_to_au(cfg.block1_ev), ev_to_au(cfg.block2_ev), theta);

    // control tuned to the unblocked final energy; amplitude scaled to the
    // requested strength relative to |t1 + t2|
    const auto tc_ref = model.control_amplitude(ev_i.e_final, theta, 1e-4,
                                                cfg.n_cycles_control);
    double norm_sum = 0.0, norm_ref = 0.0;
    {
        const Complex s0 = ev_i.path1.s_wave + ev_i.path2.s_wave;
        const Complex s2 = ev_i.path1.d_wave + ev_i.path2.d_wave;
        norm_sum = std::sqrt(std::norm(s0) + std::norm(s2));
        double peak = 0.0;
        for (const auto& v : tc_ref) peak = std::max(peak, std::abs(v));
        // reconstruct the l=1 coefficient norm from the curve peak: |Y10|max = sqrt(3/4pi)
        norm_ref = peak / std::sqrt(3.0 / (4.0 * pi));
    }
    const double scale = norm_ref > 0.0 ? strength * norm_sum / norm_ref : 0.0;
    std::vector<Complex> tc(tc_ref.size());
    for (std::size_t i = 0; i < tc.size(); ++i) tc[i] = scale * tc_ref[i];

    if (strength > 0.0 && ev_i.path1.norm() > 0.0 &&
        strength * norm_sum > 10.0 * ev_i.path1.norm())
        out.warnings.push_back("control amplitude far exceeds the two-photon pathways; "
                               "the perturbative picture degrades");

    const std::size_t n = theta.size();
    out.dcs_reconstructed.resize(n);
    out.dcs_direct.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex t1 = ev_i.path1.t[i], t2 = ev_i.path2.t[i];
        Complex t_all, t_ii, t_iii, t_iv;
        if (cfg.ideal_blocking) {
            t_all = t1 + t2 + tc[i];
            t_ii = t1 + tc[i];
            t_iii = t2 + tc[i];
            t_iv = tc[i];
        } else {
            t_all = t1 + t2 + tc[i];
            t_ii = ev_ii.path1.t[i] + ev_ii.path2.t[i] + tc[i];
            t_iii = ev_iii.path1.t[i] + ev_iii.path2.t[i] + tc[i];
            t_iv = ev_iv.path1.t[i] + ev_iv.path2.t[i] + tc[i];
        }
        out.dcs_reconstructed[i] =
            std::norm(t_all) - (std::norm(t_ii) + std::norm(t_iii) - std::norm(t_iv));
        out.dcs_direct[i] = 2.0 * std::real(t1 * std::conj(t2));
    }
    out.delta_phi12 = phase_difference(ev_i.path1.t, ev_i.path2.t);
    return out;
}

// ---------------------------------------------------------------------------
// Stochastic decoherence of a pathway pair by a randomly scaled control field.
// ---------------------------------------------------------------------------

/// Deterministic uniform [-1, 1] stream: mt19937_64 with a fixed 53-bit
/// mantissa mapping, so one seed gives one bit-exact sequence.
class UniformSymmetric {
public:
    explicit UniformSymmetric(std::uint64_t seed) : gen_(seed) {}
    double next()
    {
        const std::uint64_t x = gen_() >> 11; // 53 random bits
        return 2.0 * (static_cast<double>(x) * 0x1.0p-53) - 1.0;
    }

private:
    std::mt19937_64 gen_;
};

struct StochasticResult {
    std::vector<double> theta;
    std::vector<double> reference;            // single-sample u = +1 interference curve
    std::vector<std::size_t> checkpoints;     // sample counts with stored averages
    std::vector<std::vector<double>> averages; // running average curve per checkpoint
    double mean_u = 0.0;
};

/// Interference between pathway 1 (pathway 2 closed by detuning) and a
/// one-photon control amplitude whose scale is drawn uniformly from
/// [-t1, +t1]. The running averages are an order-preserving reduction over
/// the seeded sample sequence.
inline StochasticResult stochastic_average(const TwoPathwayModel& model,
                                           std::span<const double> theta,
                                           double balanced_dw1, double block2_ev,
                                           std::size_t n_samples, std::uint64_t seed,
                                           std::span<const std::size_t> checkpoints)
{
    if (n_samples < 1)
        throw std::invalid_argument("stochastic_average: n_samples must be >= 1");
    StochasticResult out;
    out.theta.assign(theta.begin(), theta.end());

    const auto ev = model.evaluate(balanced_dw1, ev_to_au(block2_ev), theta);
    const auto tc_unit = model.control_amplitude(ev.e_final, theta, 1e-4, model.n_cycles());
    // scale the control template to |t1| in the L2 sense
    double peak = 0.0;
    for (const auto& v : tc_unit) peak = std::max(peak, std::abs(v));
    const double norm_ref = peak / std::sqrt(3.0 / (4.0 * pi));
    const double scale = norm_ref > 0.0 ? ev.path1.norm() / norm_ref : 0.0;

    const std::size_t n = theta.size();
    out.reference.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.reference[i] = 2.0 * std::real(ev.path1.t[i] * std::conj(scale * tc_unit[i]));

    UniformSymmetric rng(seed);
    double run_sum = 0.0;
    std::size_t next_cp = 0;
    std::vector<std::size_t> cps(checkpoints.begin(), checkpoints.end());
    std::sort(cps.begin(), cps.end());
    for (std::size_t s = 1; s <= n_samples; ++s) {
        run_sum += rng.next();
        while (next_cp < cps.size() && cps[next_cp] == s) {
            const double mean_u = run_sum / static_cast<double>(s);
            std::vector<double> avg(n);
            for (std::size_t i = 0; i < n; ++i) avg[i] = mean_u * out.reference[i];
            out.checkpoints.push_back(s);
            out.averages.push_back(std::move(avg));
            ++next_cp;
        }
    }
    out.mean_u = run_sum / static_cast<double>(n_samples);
    if (out.checkpoints.empty() || out.checkpoints.back() != n_samples) {
        std::vector<double> avg(n);
        for (std::size_t i = 0; i < n; ++i) avg[i] = out.mean_u * out.reference[i];
        out.checkpoints.push_back(n_samples);
        out.averages.push_back(std::move(avg));
    }
    return out;
}

} // namespace photoion

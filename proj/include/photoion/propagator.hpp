#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

#include "photoion/angular.hpp"
#include "photoion/grid.hpp"
#include "photoion/potential.hpp"
#include "photoion/pulses.hpp"
#include "photoion/wavepacket.hpp"

namespace photoion {

struct PropagationOptions {
    double dt = 0.25;
    bool absorber = true;
    bool corrected_dipole = true;     // core-corrected coupling operator r Q1(r)
    double boundary_threshold = 1e-8; // hard error above this at the last point
    int check_interval = 200;         // steps between boundary checks
    // density level treated as numerically zero when sizing the active window
    double window_threshold = 1e-16;
    // called after every `sample_interval` steps (and at the end) if set
    std::function<void(const ChannelWavepacket&)> observer;
    int sample_interval = 40;
};

struct PropagationReport {
    std::vector<std::string> warnings;
    std::size_t steps = 0;
};

namespace detail {

// Cached Crank-Nicolson factorization of (1 + i dt/2 H_l) for one l channel.
// H_l is the field-free radial tridiagonal including the optional -iW absorber.
struct RadialCN {
    std::vector<Complex> mp_diag, mm_diag; // 1 +- (i dt/2) diag
    Complex mp_off{}, mm_off{};
    std::vector<Complex> denom; // Thomas forward denominators for M+
};

inline RadialCN make_radial_cn(const ModelPotentialParams& params, const RadialGrid& grid,
                               int l, double dt, bool absorber)
{
    const std::size_t n = grid.n_points;
    const double inv_dr2 = 1.0 / (grid.dr * grid.dr);
    RadialCN cn;
    cn.mp_diag.resize(n);
    cn.mm_diag.resize(n);
    cn.denom.resize(n);
    const Complex half_idt(0.0, 0.5 * dt);
    const double off = -0.5 * inv_dr2;
    cn.mp_off = half_idt * off;
    cn.mm_off = -half_idt * off;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.r(i);
        Complex h(inv_dr2 + potential(params, l, r) + 0.5 * l * (l + 1) / (r * r), 0.0);
        if (absorber) h -= Complex(0.0, grid.absorber(r));
        cn.mp_diag[i] = 1.0 + half_idt * h;
        cn.mm_diag[i] = 1.0 - half_idt * h;
    }
    cn.denom[0] = 1.0 / cn.mp_diag[0];
    for (std::size_t i = 1; i < n; ++i)
        cn.denom[i] = 1.0 / (cn.mp_diag[i] - cn.mp_off * cn.mp_off * cn.denom[i - 1]);
    return cn;
}

// Crank-Nicolson on the leading `n_act` points (the tail is zero and stays
// zero under the Dirichlet truncation).
inline void radial_cn_step(const RadialCN& cn, std::vector<Complex>& b, std::size_t n_act,
                           std::vector<Complex>& scratch)
{
    const std::size_t n = std::min(n_act, b.size());
    if (n < 3) return;
    scratch.resize(b.size());
    scratch[0] = cn.mm_diag[0] * b[0] + cn.mm_off * b[1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        scratch[i] = cn.mm_off * b[i - 1] + cn.mm_diag[i] * b[i] + cn.mm_off * b[i + 1];
    scratch[n - 1] = cn.mm_off * b[n - 2] + cn.mm_diag[n - 1] * b[n - 1];
    b[0] = scratch[0] * cn.denom[0];
    for (std::size_t i = 1; i < n; ++i)
        b[i] = (scratch[i] - cn.mp_off * b[i - 1]) * cn.denom[i];
    for (std::size_t i = n - 1; i-- > 0;)
        b[i] -= cn.mp_off * cn.denom[i] * b[i + 1];
}

// Eigen-decomposition of the cos(theta) ladder matrix C (size l_max+1),
// C_{l,l+1} = C_{l+1,l} = z_coupling(l).
struct CouplingEigen {
    int nl = 0;
    std::vector<double> lambda;
    std::vector<double> U; // column-major eigenvectors
};

inline CouplingEigen make_coupling_eigen(int l_max)
{
    CouplingEigen ce;
    ce.nl = l_max + 1;
    ce.lambda.assign(ce.nl, 0.0);
    std::vector<double> off(std::max(ce.nl - 1, 1));
    for (int l = 0; l < ce.nl - 1; ++l) off[l] = z_coupling(l);
    ce.U.assign(static_cast<std::size_t>(ce.nl) * ce.nl, 0.0);
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', ce.nl, ce.lambda.data(),
                                          off.data(), ce.U.data(), ce.nl);
    if (info != 0)
        throw std::runtime_error("make_coupling_eigen: dstev failed");
    return ce;
}

// Radial factor of the coupling operator: r Q1(r) when the core-corrected
// dipole is requested, plain r otherwise. Beyond `uniform_from` the factor is
// replaced by r (the correction is < 1e-4 there), which keeps the phase
// recurrence exactly geometric in the far zone.
struct CouplingTables {
    std::vector<double> rho;
    std::size_t uniform_from = 0;
};

inline CouplingTables make_coupling_tables(const ModelPotentialParams& params,
                                           const RadialGrid& grid, bool corrected)
{
    CouplingTables ct;
    ct.rho.resize(grid.n_points);
    const bool have_ac = corrected && params.core_polarizability.count(1) > 0 &&
                         params.core_polarizability.at(1) != 0.0;
    const double r_split = have_ac ? std::min(50.0, grid.r_max()) : 0.0;
    ct.uniform_from = have_ac ? grid.index_at(r_split) : 0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double r = grid.r(i);
        ct.rho[i] = (have_ac && i < ct.uniform_from) ? r * corrected_multipole(params, 1, r)
                                                     : r;
    }
    return ct;
}

// One exp(-i c rho(r) C) sweep, blocked over radii so the 9x9 transforms run
// on contiguous buffers. c = (dt/2) E(t_mid).
inline void coupling_half_step(const CouplingEigen& ce, const CouplingTables& ct,
                               const RadialGrid& grid, double c, std::size_t n_act,
                               std::vector<std::vector<Complex>>& ch,
                               std::vector<Complex>& block_buf)
{
    if (c == 0.0) return;
    const int nl = ce.nl;
    const std::size_t n = std::min(n_act, grid.n_points);
    constexpr std::size_t B = 128;
    block_buf.resize(2 * B * static_cast<std::size_t>(nl) + static_cast<std::size_t>(nl));
    Complex* tmp = block_buf.data();           // [nl][B]
    Complex* mix = tmp + B * nl;                // [nl][B]
    Complex* qstep = mix + B * nl;              // [nl]

    for (int m = 0; m < nl; ++m)
        qstep[m] = std::exp(Complex(0.0, -c * ce.lambda[m] * grid.dr));

    for (std::size_t base = 0; base < n; base += B) {
        const std::size_t bs = std::min(B, n - base);
        // gather and transform to the eigenbasis: tmp = U^T b
        for (int m = 0; m < nl; ++m) {
            const double* col = ce.U.data() + static_cast<std::size_t>(m) * nl;
            Complex* row = tmp + static_cast<std::size_t>(m) * B;
            for (std::size_t j = 0; j < bs; ++j) row[j] = col[0] * ch[0][base + j];
            for (int l = 1; l < nl; ++l) {
                const double w = col[l];
                const Complex* src = ch[static_cast<std::size_t>(l)].data() + base;
                for (std::size_t j = 0; j < bs; ++j) row[j] += w * src[j];
            }
        }
        // apply the eigenphases: pointwise inside the corrected zone, one
        // cexp plus a geometric recurrence per block in the uniform zone
        for (int m = 0; m < nl; ++m) {
            Complex* row = tmp + static_cast<std::size_t>(m) * B;
            if (base >= ct.uniform_from) {
                Complex ph = std::exp(Complex(0.0, -c * ce.lambda[m] * ct.rho[base]));
                for (std::size_t j = 0; j < bs; ++j) {
                    row[j] *= ph;
                    ph *= qstep[m];
                }
            } else {
                for (std::size_t j = 0; j < bs; ++j)
                    row[j] *= std::exp(Complex(0.0, -c * ce.lambda[m] * ct.rho[base + j]));
            }
        }
        // back-transform and scatter: b = U tmp
        for (int l = 0; l < nl; ++l) {
            Complex* row = mix + static_cast<std::size_t>(l) * B;
            for (std::size_t j = 0; j < bs; ++j) row[j] = Complex(0.0, 0.0);
        }
        for (int m = 0; m < nl; ++m) {
            const double* col = ce.U.data() + static_cast<std::size_t>(m) * nl;
            const Complex* row = tmp + static_cast<std::size_t>(m) * B;
            for (int l = 0; l < nl; ++l) {
                const double w = col[l];
                Complex* dst = mix + static_cast<std::size_t>(l) * B;
                for (std::size_t j = 0; j < bs; ++j) dst[j] += w * row[j];
            }
        }
        for (int l = 0; l < nl; ++l) {
            Complex* dst = ch[static_cast<std::size_t>(l)].data() + base;
            const Complex* row = mix + static_cast<std::size_t>(l) * B;
            for (std::size_t j = 0; j < bs; ++j) dst[j] = row[j];
        }
    }
}

} // namespace detail

inline double total_electric_field(std::span<const LaserPulse> pulses, double t)
{
    double e = 0.0;
    for (const auto& p : pulses) e += p.electric_field(t);
    return e;
}

inline double pulses_end(std::span<const LaserPulse> pulses)
{
    double end = 0.0;
    for (const auto& p : pulses) end = std::max(end, p.stop());
    return end;
}

/// Length-gauge split-step propagation to t_end: exact unitary exponential of
/// the E(t) z ladder coupling (half step), Crank-Nicolson for the field-free
/// radial Hamiltonians (full step), coupling again (half step). The coupling
/// uses the same core-corrected dipole operator as the matrix elements, so
/// perturbation theory built on those elements is directly comparable.
/// Norm is conserved to solver precision when the absorber is off.
inline PropagationReport propagate(ChannelWavepacket& wp, const ModelPotentialParams& params,
                                   std::span<const LaserPulse> pulses, double t_end,
                                   const PropagationOptions& opt = {})
{
    PropagationReport rep;
    if (t_end <= wp.time) return rep;
    const double dt = opt.dt;
    if (dt <= 0.0) throw std::invalid_argument("propagate: dt must be > 0");

    for (const auto& p : pulses) {
        const double steps_per_cycle = 2.0 * pi / p.omega / dt;
        if (steps_per_cycle < 40.0)
            rep.warnings.push_back("dt resolves only " + std::to_string(steps_per_cycle) +
                                   " steps per optical cycle of the " +
                                   std::string(to_string(p.label)) +
                                   " pulse (>= 40 recommended)");
    }

    const int nl = wp.l_max + 1;
    const std::size_t n = wp.grid.n_points;
    std::vector<detail::RadialCN> cn;
    cn.reserve(nl);
    for (int l = 0; l < nl; ++l)
        cn.push_back(detail::make_radial_cn(params, wp.grid, l, dt, opt.absorber));
    const auto ce = detail::make_coupling_eigen(wp.l_max);
    const auto ct = detail::make_coupling_tables(params, wp.grid, opt.corrected_dipole);

    // active window: indices past it carry only numerically-zero density and
    // are skipped by the radial and coupling stages
    std::size_t n_act = 16;
    for (int l = 0; l < nl; ++l) {
        const auto& b = wp.channels[static_cast<std::size_t>(l)];
        for (std::size_t i = n; i-- > 0;) {
            if (std::norm(b[i]) > opt.window_threshold * 1e-4) {
                n_act = std::max(n_act, i + 1);
                break;
            }
        }
    }
    n_act = std::min(n, n_act + 256);

    std::vector<Complex> scratch, block_buf;
    const auto n_steps = static_cast<std::size_t>(std::ceil((t_end - wp.time) / dt - 1e-12));
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t_mid = wp.time + 0.5 * dt;
        const double e_mid = total_electric_field(pulses, t_mid);
        const double c = 0.5 * dt * e_mid;
        detail::coupling_half_step(ce, ct, wp.grid, c, n_act, wp.channels, block_buf);
        for (int l = 0; l < nl; ++l)
            detail::radial_cn_step(cn[l], wp.channels[static_cast<std::size_t>(l)], n_act,
                                   scratch);
        detail::coupling_half_step(ce, ct, wp.grid, c, n_act, wp.channels, block_buf);
        wp.time += dt;
        ++rep.steps;

        // grow the window when probability shows up near its edge
        if (n_act < n && s % 4 == 0) {
            const std::size_t probe_lo = n_act > 512 ? n_act - 512 : 0;
            double edge = 0.0;
            for (int l = 0; l < nl; ++l) {
                const auto& b = wp.channels[static_cast<std::size_t>(l)];
                for (std::size_t i = probe_lo; i < n_act; ++i)
                    edge = std::max(edge, std::norm(b[i]));
            }
            if (edge > opt.window_threshold) n_act = std::min(n, n_act + 1024);
        }

        if (opt.check_interval > 0 && s % static_cast<std::size_t>(opt.check_interval) == 0) {
            if (wp.boundary_density() > opt.boundary_threshold)
                throw std::runtime_error(
                    "propagate: density " + std::to_string(wp.boundary_density()) +
                    " reached the grid boundary; increase r_max or strengthen the absorber");
        }
        if (opt.observer && (s % static_cast<std::size_t>(std::max(opt.sample_interval, 1)) == 0))
            opt.observer(wp);
    }
    if (wp.boundary_density() > opt.boundary_threshold)
        throw std::runtime_error("propagate: density reached the grid boundary at the final "
                                 "time; increase r_max");
    if (opt.observer) opt.observer(wp);
    return rep;
}

} // namespace photoion

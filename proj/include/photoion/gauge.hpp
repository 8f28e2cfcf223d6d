#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

#include "photoion/angular.hpp"
#include "photoion/propagator.hpp"
#include "photoion/wavepacket.hpp"

namespace photoion {

enum class Gauge { length, velocity };

namespace detail {

// E(t) z in the channel basis: diagonal in r (radial factor rho, which is
// r or the core-corrected r Q1(r)), ladder in l.
inline void apply_length_coupling(std::span<const double> rho, double efield,
                                  const std::vector<std::vector<Complex>>& in,
                                  std::vector<std::vector<Complex>>& out)
{
    const int nl = static_cast<int>(in.size());
    for (int l = 0; l < nl; ++l) {
        const double c_up = l + 1 < nl ? z_coupling(l) : 0.0;
        const double c_dn = l > 0 ? z_coupling(l - 1) : 0.0;
        auto& o = out[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < rho.size(); ++i) {
            Complex acc = 0.0;
            if (c_dn != 0.0) acc += c_dn * in[static_cast<std::size_t>(l - 1)][i];
            if (c_up != 0.0) acc += c_up * in[static_cast<std::size_t>(l + 1)][i];
            o[i] = efield * rho[i] * acc;
        }
    }
}

// A(t) p_z in the channel basis:
//   (to l+1): -i A c_l     (d/dr - (l+1)/r) u_l
//   (to l-1): -i A c_{l-1} (d/dr + l/r)     u_l
// with the centered antisymmetric derivative, so the discrete operator is
// Hermitian. The spatially uniform A^2/2 term is a global phase and dropped.
inline void apply_velocity_coupling(const RadialGrid& grid, double a_field,
                                    const std::vector<std::vector<Complex>>& in,
                                    std::vector<std::vector<Complex>>& out)
{
    const int nl = static_cast<int>(in.size());
    const std::size_t n = grid.n_points;
    const double inv2dr = 0.5 / grid.dr;
    for (auto& ch : out)
        for (auto& v : ch) v = 0.0;
    auto deriv = [&](const std::vector<Complex>& u, std::size_t i) {
        const Complex up = i + 1 < n ? u[i + 1] : Complex(0.0);
        const Complex um = i > 0 ? u[i - 1] : Complex(0.0);
        return (up - um) * inv2dr;
    };
    for (int l = 0; l < nl; ++l) {
        const auto& u = in[static_cast<std::size_t>(l)];
        const Complex miA(0.0, -a_field);
        if (l + 1 < nl) {
            const double c = z_coupling(l);
            auto& o = out[static_cast<std::size_t>(l + 1)];
            for (std::size_t i = 0; i < n; ++i)
                o[i] += miA * c * (deriv(u, i) - (l + 1.0) / grid.r(i) * u[i]);
        }
        if (l - 1 >= 0) {
            const double c = z_coupling(l - 1);
            auto& o = out[static_cast<std::size_t>(l - 1)];
            for (std::size_t i = 0; i < n; ++i)
                o[i] += miA * c * (deriv(u, i) + static_cast<double>(l) / grid.r(i) * u[i]);
        }
    }
}

inline double dot_real(const std::vector<std::vector<Complex>>& a,
                       const std::vector<std::vector<Complex>>& b)
{
    double acc = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l)
        for (std::size_t i = 0; i < a[l].size(); ++i)
            acc += std::real(std::conj(a[l][i]) * b[l][i]);
    return acc;
}

} // namespace detail

struct LanczosOptions {
    double dt = 0.2;
    int krylov_max = 14;
    bool absorber = false;
    bool corrected_dipole = false; // length gauge only; no velocity-form analogue
};

/// Independent propagator used for cross-checks: Strang splitting with the
/// cached Crank-Nicolson radial step and a short-iterative Lanczos
/// exponential for the laser coupling, available in length or velocity
/// gauge. The coupling operator alone has a modest spectral radius, so the
/// Krylov exponential converges in a few vectors per step.
inline void lanczos_propagate(ChannelWavepacket& wp, const ModelPotentialParams& params,
                              std::span<const LaserPulse> pulses, double t_end, Gauge gauge,
                              const LanczosOptions& opt = {})
{
    using Channels = std::vector<std::vector<Complex>>;
    const int nl = wp.l_max + 1;
    const std::size_t n = wp.grid.n_points;

    const double span = t_end - wp.time;
    if (span <= 0.0) return;
    const auto n_steps = static_cast<std::size_t>(std::ceil(span / opt.dt - 1e-12));
    const double dt = span / static_cast<double>(n_steps);

    std::vector<detail::RadialCN> cn_half;
    cn_half.reserve(nl);
    for (int l = 0; l < nl; ++l)
        cn_half.push_back(detail::make_radial_cn(params, wp.grid, l, 0.5 * dt,
                                                 opt.absorber));

    const auto ct = detail::make_coupling_tables(params, wp.grid,
                                                 gauge == Gauge::length &&
                                                 opt.corrected_dipole);
    auto coupling = [&](double t, const Channels& in, Channels& out) {
        if (gauge == Gauge::length) {
            double e = 0.0;
            for (const auto& p : pulses) e += p.electric_field(t);
            detail::apply_length_coupling(ct.rho, e, in, out);
        } else {
            double a = 0.0;
            for (const auto& p : pulses) a += p.vector_potential(t);
            detail::apply_velocity_coupling(wp.grid, a, in, out);
        }
    };

    const int m_max = opt.krylov_max;
    std::vector<Channels> basis(static_cast<std::size_t>(m_max) + 1,
                                Channels(nl, std::vector<Complex>(n)));
    std::vector<double> alpha(m_max), beta(m_max);
    std::vector<Complex> scratch;

    auto lanczos_exp = [&](double t_mid, double dt) {
        double nrm2 = 0.0;
        for (const auto& ch : wp.channels)
            for (const auto& v : ch) nrm2 += std::norm(v);
        const double nrm = std::sqrt(nrm2);
        if (nrm < 1e-300) return;
        for (int l = 0; l < nl; ++l)
            for (std::size_t i = 0; i < n; ++i)
                basis[0][static_cast<std::size_t>(l)][i] = wp.channels[l][i] / nrm;

        int m = 0;
        bool exhausted = false;
        for (; m < m_max; ++m) {
            auto& v = basis[static_cast<std::size_t>(m)];
            auto& w = basis[static_cast<std::size_t>(m) + 1];
            coupling(t_mid, v, w);
            if (m > 0) {
                const auto& vp = basis[static_cast<std::size_t>(m) - 1];
                for (int l = 0; l < nl; ++l)
                    for (std::size_t i = 0; i < n; ++i)
                        w[static_cast<std::size_t>(l)][i] -=
                            beta[m - 1] * vp[static_cast<std::size_t>(l)][i];
            }
            alpha[m] = detail::dot_real(v, w);
            for (int l = 0; l < nl; ++l)
                for (std::size_t i = 0; i < n; ++i)
                    w[static_cast<std::size_t>(l)][i] -=
                        alpha[m] * v[static_cast<std::size_t>(l)][i];
            double b2 = 0.0;
            for (const auto& ch : w)
                for (const auto& x : ch) b2 += std::norm(x);
            beta[m] = std::sqrt(b2);
            if (beta[m] < 1e-13) { ++m; exhausted = true; break; }
            for (auto& ch : w)
                for (auto& x : ch) x /= beta[m];
        }
        (void)exhausted;

        std::vector<double> d(alpha.begin(), alpha.begin() + m);
        std::vector<double> e(static_cast<std::size_t>(std::max(m - 1, 1)));
        for (int j = 0; j + 1 < m; ++j) e[static_cast<std::size_t>(j)] = beta[j];
        std::vector<double> zmat(static_cast<std::size_t>(m) * m);
        if (LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, d.data(), e.data(), zmat.data(), m) != 0)
            throw std::runtime_error("lanczos_propagate: small eigensolve failed");
        std::vector<Complex> coeff(static_cast<std::size_t>(m), 0.0);
        for (int j = 0; j < m; ++j) {
            const Complex ph = std::exp(Complex(0.0, -d[static_cast<std::size_t>(j)] * dt));
            for (int i = 0; i < m; ++i)
                coeff[static_cast<std::size_t>(i)] +=
                    zmat[static_cast<std::size_t>(j) * m + i] * ph *
                    zmat[static_cast<std::size_t>(j) * m];
        }
        for (int l = 0; l < nl; ++l)
            for (std::size_t i = 0; i < n; ++i) {
                Complex acc = 0.0;
                for (int j = 0; j < m; ++j)
                    acc += coeff[static_cast<std::size_t>(j)] *
                           basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)][i];
                wp.channels[l][i] = nrm * acc;
            }
    };

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t_mid = wp.time + 0.5 * dt;
        for (int l = 0; l < nl; ++l)
            detail::radial_cn_step(cn_half[l], wp.channels[static_cast<std::size_t>(l)], n,
                                   scratch);
        lanczos_exp(t_mid, dt);
        for (int l = 0; l < nl; ++l)
            detail::radial_cn_step(cn_half[l], wp.channels[static_cast<std::size_t>(l)], n,
                                   scratch);
        wp.time += dt;
    }
}

} // namespace photoion

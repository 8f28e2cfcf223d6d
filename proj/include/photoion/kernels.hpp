#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "photoion/constants.hpp"

namespace photoion {

using Complex = std::complex<double>;

/// Envelope parameters of a cos^2 pulse for the time-domain kernels:
/// Omega(x) = cos^2(pi x / T) on [-T/2, T/2].
struct EnvelopeParams {
    double T = 0.0; // full duration
    explicit EnvelopeParams(double T_) : T(T_)
    {
        if (T <= 0.0) throw std::invalid_argument("EnvelopeParams: T must be > 0");
    }
};

namespace detail {

inline double stable_sinc(double x)
{
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// int_{t1}^{t2} e^{i a t} dt, stable near a = 0
inline Complex phase_integral(double a, double t1, double t2)
{
    const double len = t2 - t1;
    const double mid = 0.5 * (t1 + t2);
    return len * std::exp(Complex(0.0, a * mid)) * stable_sinc(0.5 * a * len);
}

} // namespace detail

/// First-order temporal kernel
///   F1(t; omega0, omega, Delta) = int_{-inf}^{t} Omega(t' + Delta) e^{i(omega0+omega)t'} dt'.
/// Closed form from the three-exponential expansion of cos^2; all
/// removable singularities handled by a stable sinc.
inline Complex f1_kernel(const EnvelopeParams& env, double omega0, double omega,
                         double delta, double t)
{
    const double T = env.T;
    const double lo = -0.5 * T - delta;
    const double hi = std::min(t, 0.5 * T - delta);
    if (hi <= lo) return {0.0, 0.0};
    const double wt = omega0 + omega;
    const double mu = 2.0 * pi / T;
    Complex out = 0.5 * detail::phase_integral(wt, lo, hi);
    out += 0.25 * std::exp(Complex(0.0, mu * delta)) * detail::phase_integral(wt + mu, lo, hi);
    out += 0.25 * std::exp(Complex(0.0, -mu * delta)) * detail::phase_integral(wt - mu, lo, hi);
    return out;
}

/// Bare second-order temporal kernel (no resonance prefactor):
///   G2(t) = int_{-inf}^{t} dt' Omega_j(t' + Delta_j) e^{i(omega_nf + omega_j) t'}
///                        F1_{omega_0n}(t', omega_i, Delta_i).
/// This is exactly what multiplies the dipole products in the second-order
/// amplitude; the energy denominator of the textbook form cancels against
/// the kernel prefactor and never appears explicitly.
///
/// Composite Gauss-Legendre with panel density set by the largest phase
/// frequency, then verified against a refined pass (relative 1e-8).
struct KernelQuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::array<double, 10>& gl10_nodes()
{
    static const std::array<double, 10> x = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
        -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
        0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
        0.9739065285171717};
    return x;
}

inline const std::array<double, 10>& gl10_weights()
{
    static const std::array<double, 10> w = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
        0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
        0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
        0.0666713443086881};
    return w;
}

template <typename F>
Complex gl_composite(F&& f, double lo, double hi, std::size_t panels, double& l1)
{
    const auto& xs = gl10_nodes();
    const auto& ws = gl10_weights();
    const double h = (hi - lo) / static_cast<double>(panels);
    Complex acc = 0.0;
    l1 = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lo + h * static_cast<double>(p);
        const double mid = a + 0.5 * h;
        Complex local = 0.0;
        for (int q = 0; q < 10; ++q)
            local += ws[q] * f(mid + 0.5 * h * xs[q]);
        acc += 0.5 * h * local;
        l1 += 0.5 * h * std::abs(local);
    }
    return acc;
}

} // namespace detail

inline Complex g2_kernel(const EnvelopeParams& env_outer, const EnvelopeParams& env_inner,
                         double omega_nf, double omega_0n, double omega_j, double omega_i,
                         double delta_j, double delta_i, double t,
                         double rel_tol = 1e-8)
{
    const double Tj = env_outer.T;
    const double lo = -0.5 * Tj - delta_j;
    const double hi = std::min(t, 0.5 * Tj - delta_j);
    if (hi <= lo) return {0.0, 0.0};

    const double w_outer = omega_nf + omega_j;
    const double w_inner = omega_0n + omega_i;
    const double w_max = std::abs(w_outer) + std::abs(w_inner)
                       + 4.0 * pi / Tj + 4.0 * pi / env_inner.T;

    auto integrand = [&](double tp) -> Complex {
        const double x = tp + delta_j;
        if (std::abs(x) >= 0.5 * Tj) return {0.0, 0.0};
        const double c = std::cos(pi * x / Tj);
        return c * c * std::exp(Complex(0.0, w_outer * tp))
             * f1_kernel(env_inner, omega_0n, omega_i, delta_i, tp);
    };

    // the inner kernel has derivative kinks at its envelope edges; panel
    // boundaries must not straddle them
    std::vector<double> cuts = {lo, hi};
    for (double edge : {-0.5 * env_inner.T - delta_i, 0.5 * env_inner.T - delta_i})
        if (edge > lo + 1e-12 && edge < hi - 1e-12) cuts.push_back(edge);
    std::sort(cuts.begin(), cuts.end());

    Complex coarse = 0.0, fine = 0.0;
    double l1_fine = 0.0;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        const auto panels = static_cast<std::size_t>(
            std::ceil((b - a) * w_max / (2.0 * pi) * 1.5)) + 16;
        double l1c = 0.0, l1f = 0.0;
        coarse += detail::gl_composite(integrand, a, b, panels, l1c);
        fine += detail::gl_composite(integrand, a, b, panels + panels / 2 + 1, l1f);
        l1_fine += l1f;
    }
    // an oscillatory integral can cancel to far below its L1 mass; anything
    // at the summation roundoff floor (~eps * L1) is accepted as converged
    const double floor_abs = 1e-12 * l1_fine + 1e-300;
    if (std::abs(fine - coarse) > std::max(rel_tol * std::abs(fine) * 10.0, floor_abs))
        throw KernelQuadratureError("g2_kernel: quadrature did not converge to tolerance");
    return fine;
}

/// Paper-style second-order kernel with the inner-resonance prefactor:
/// F2 = (omega_0n + omega_i) * G2. For the rotating call (omega_i = -w_i)
/// the prefactor is the physical intermediate detuning, and on two-photon
/// resonance |F2(T/2)| -> (3 T / 8), i.e. (3 pi / 4) times the nascent-delta
/// peak T/(2 pi).
inline Complex f2_kernel(const EnvelopeParams& env_outer, const EnvelopeParams& env_inner,
                         double omega_nf, double omega_0n, double omega_j, double omega_i,
                         double delta_j, double delta_i, double t,
                         double rel_tol = 1e-8)
{
    return (omega_0n + omega_i) * g2_kernel(env_outer, env_inner, omega_nf, omega_0n,
                                            omega_j, omega_i, delta_j, delta_i, t, rel_tol);
}

} // namespace photoion

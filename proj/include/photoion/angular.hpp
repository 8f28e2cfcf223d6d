#pragma once

#include <array>
#include <numbers>
#include <cmath>
#include <stdexcept>

namespace photoion {

namespace detail {

// ln n! for n up to 340; covers j's far beyond anything used here.
inline double ln_factorial(int n)
{
    static const auto table = [] {
        std::array<double, 341> t{};
        t[0] = 0.0;
        for (int i = 1; i < 341; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
        return t;
    }();
    if (n < 0) throw std::domain_error("ln_factorial: negative argument");
    if (n >= static_cast<int>(table.size()))
        throw std::domain_error("ln_factorial: argument too large");
    return table[n];
}

inline int to_two_j(double j, const char* what)
{
    const double two = 2.0 * j;
    const int t = static_cast<int>(std::lround(two));
    if (std::abs(two - t) > 1e-9)
        throw std::domain_error(std::string(what) + ": arguments must be integer or half-integer");
    return t;
}

} // namespace detail

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah sum.
/// Returns exactly 0 when the triangle or m-selection rules fail.
inline double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3)
{
    using detail::ln_factorial;
    using detail::to_two_j;

    const int tj1 = to_two_j(j1, "wigner_3j"), tj2 = to_two_j(j2, "wigner_3j"),
              tj3 = to_two_j(j3, "wigner_3j");
    const int tm1 = to_two_j(m1, "wigner_3j"), tm2 = to_two_j(m2, "wigner_3j"),
              tm3 = to_two_j(m3, "wigner_3j");

    if (tm1 + tm2 + tm3 != 0) return 0.0;
    if (tj1 < 0 || tj2 < 0 || tj3 < 0) return 0.0;
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
    // triangle rule and integer perimeter
    if (tj3 < std::abs(tj1 - tj2) || tj3 > tj1 + tj2) return 0.0;
    if ((tj1 + tj2 + tj3) % 2 != 0) return 0.0;
    // j and m must have consistent parity
    if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0) return 0.0;

    // everything below in integer units (all the combinations are integers)
    const int a1 = (tj1 + tj2 - tj3) / 2;
    const int a2 = (tj1 - tj2 + tj3) / 2;
    const int a3 = (-tj1 + tj2 + tj3) / 2;
    const int perim = (tj1 + tj2 + tj3) / 2;

    const int j1m1 = (tj1 - tm1) / 2, j1p1 = (tj1 + tm1) / 2;
    const int j2m2 = (tj2 - tm2) / 2, j2p2 = (tj2 + tm2) / 2;
    const int j3m3 = (tj3 - tm3) / 2, j3p3 = (tj3 + tm3) / 2;

    const double ln_pref = 0.5 * (ln_factorial(a1) + ln_factorial(a2) + ln_factorial(a3)
                                  - ln_factorial(perim + 1)
                                  + ln_factorial(j1m1) + ln_factorial(j1p1)
                                  + ln_factorial(j2m2) + ln_factorial(j2p2)
                                  + ln_factorial(j3m3) + ln_factorial(j3p3));

    const int k_lo = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
    const int k_hi = std::min({a1, j1m1, j2p2});

    double sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double ln_den = ln_factorial(k) + ln_factorial(a1 - k)
                            + ln_factorial(j1m1 - k) + ln_factorial(j2p2 - k)
                            + ln_factorial((tj3 - tj2 + tm1) / 2 + k)
                            + ln_factorial((tj3 - tj1 - tm2) / 2 + k);
        const double term = std::exp(ln_pref - ln_den);
        sum += (k % 2 == 0) ? term : -term;
    }
    const int phase = (tj1 - tj2 - tm3) / 2;
    return (phase % 2 == 0) ? sum : -sum;
}

/// <l+1,0|cos(theta)|l,0> ladder coefficient for z-polarized coupling.
inline double z_coupling(int l)
{
    if (l < 0) throw std::domain_error("z_coupling: l must be >= 0");
    const double dl = static_cast<double>(l);
    return (dl + 1.0) / std::sqrt((2.0 * dl + 1.0) * (2.0 * dl + 3.0));
}

/// <l_f,0|cos(theta)|l_n,0>; zero unless |l_f - l_n| = 1.
inline double dipole_angular_z(int lf, int ln)
{
    if (lf == ln + 1) return z_coupling(ln);
    if (ln == lf + 1) return z_coupling(lf);
    return 0.0;
}

/// Spherical harmonic Y_l0(theta); real for m = 0.
inline double sph_harmonic_y_l0(int l, double theta)
{
    const double p = std::legendre(static_cast<unsigned>(l), std::cos(theta));
    return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) * p;
}

} // namespace photoion

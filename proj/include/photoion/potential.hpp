#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace photoion {

/// One set of fit coefficients of the angular-dependent model potential.
struct LCoefficients {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double r_c = 1.0; // polarization cut-off radius
};

/// Parameters of the alkali one-electron model potential
///   V_l(r) = -Z_l(r)/r - alpha_c/(2 r^4) [1 - exp(-(r/r_c)^6)]
///   Z_l(r) = 1 + (z-1) e^{-a1 r} - r (a3 + a4 r) e^{-a2 r}
/// plus the empirical core-polarization correction of the multipole
/// operators, Q_L -> Q_L [1 - a_c^(L)/r^{2L+1} (1 - exp(-(r/r_c')^{2L+1}))].
struct ModelPotentialParams {
    std::string element = "H";
    double z = 1.0;          // nuclear charge
    double alpha_c = 0.0;    // static dipole polarizability of the ion core
    double r_c_prime = 1.0;  // multipole correction cut-off
    std::vector<LCoefficients> per_l; // index l; highest entry reused beyond
    std::map<int, double> core_polarizability; // a_c^(L) keyed by L

    const LCoefficients& coeffs(int l) const
    {
        if (per_l.empty())
            throw std::runtime_error("ModelPotentialParams: no coefficient sets loaded");
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(l, 0)),
                                                    per_l.size() - 1);
        return per_l[i];
    }

    static ModelPotentialParams load(const std::string& path);
    static ModelPotentialParams pure_coulomb(double z_ = 1.0)
    {
        ModelPotentialParams p;
        p.element = "coulomb";
        p.z = z_;
        p.alpha_c = 0.0;
        p.r_c_prime = 1.0;
        // a1 large so (z-1)exp(-a1 r) dies immediately for z=1 it is zero anyway
        p.per_l.push_back(LCoefficients{0.0, 1.0, 0.0, 0.0, 1.0});
        if (z_ != 1.0) {
            // keep Z(r) = z at the origin decaying to 1, irrelevant for z=1
            p.per_l[0].a1 = 1.0;
        }
        p.core_polarizability[1] = 0.0;
        return p;
    }

    std::uint64_t hash() const
    {
        std::uint64_t h = 1469598103934665603ull;
        auto mixd = [&h](double d) {
            std::uint64_t v;
            __builtin_memcpy(&v, &d, sizeof v);
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        mixd(z);
        mixd(alpha_c);
        mixd(r_c_prime);
        for (const auto& c : per_l) {
            mixd(c.a1); mixd(c.a2); mixd(c.a3); mixd(c.a4); mixd(c.r_c);
        }
        for (const auto& [L, a] : core_polarizability) {
            mixd(static_cast<double>(L));
            mixd(a);
        }
        return h;
    }
};

/// Effective radial charge Z_l(r). Tends to z at the origin and 1 at infinity.
inline double effective_charge(const ModelPotentialParams& p, int l, double r)
{
    if (r <= 0.0) throw std::domain_error("effective_charge: r must be > 0");
    const auto& c = p.coeffs(l);
    return 1.0 + (p.z - 1.0) * std::exp(-c.a1 * r)
           - r * (c.a3 + c.a4 * r) * std::exp(-c.a2 * r);
}

/// Model potential V_l(r); asymptotically -1/r - alpha_c/(2 r^4).
inline double potential(const ModelPotentialParams& p, int l, double r)
{
    if (r <= 0.0) throw std::domain_error("potential: r must be > 0");
    const auto& c = p.coeffs(l);
    const double x6 = std::pow(r / c.r_c, 6);
    const double cut = x6 > 700.0 ? 1.0 : 1.0 - std::exp(-x6);
    return -effective_charge(p, l, r) / r - p.alpha_c / (2.0 * r * r * r * r) * cut;
}

/// Core-polarization factor multiplying r^L inside radial multipole integrals.
/// Finite at r -> 0 (value 1 - a_c^(L)/r_c'^{2L+1}) and -> 1 at infinity.
inline double corrected_multipole(const ModelPotentialParams& p, int L, double r)
{
    if (r <= 0.0) throw std::domain_error("corrected_multipole: r must be > 0");
    if (L < 1) throw std::domain_error("corrected_multipole: L must be >= 1");
    auto it = p.core_polarizability.find(L);
    if (it == p.core_polarizability.end())
        throw std::runtime_error("corrected_multipole: no a_c^(L) configured for L=" +
                                 std::to_string(L));
    const double ac = it->second;
    if (ac == 0.0) return 1.0;
    const int n = 2 * L + 1;
    const double xn = std::pow(r / p.r_c_prime, n);
    // (1 - e^{-x})/x is evaluated stably for small x via expm1
    const double one_m_exp = xn > 700.0 ? 1.0 : -std::expm1(-xn);
    return 1.0 - ac / std::pow(r, n) * one_m_exp;
}

inline ModelPotentialParams ModelPotentialParams::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open potential parameter file: " + path);
    ModelPotentialParams p;
    p.per_l.clear();
    bool saw_schema = false;
    std::string line;
    std::map<int, LCoefficients> rows;
    while (std::getline(in, line)) {
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "schema") {
            int v = 0;
            ss >> v;
            if (v != 1)
                throw std::runtime_error(path + ": unsupported schema version");
            saw_schema = true;
        } else if (key == "element") {
            ss >> p.element;
        } else if (key == "z") {
            ss >> p.z;
        } else if (key == "alpha_c") {
            ss >> p.alpha_c;
        } else if (key == "r_c_prime") {
            ss >> p.r_c_prime;
        } else if (key == "l_coeffs") {
            int l;
            LCoefficients c;
            if (!(ss >> l >> c.a1 >> c.a2 >> c.a3 >> c.a4 >> c.r_c))
                throw std::runtime_error(path + ": malformed l_coeffs row");
            rows[l] = c;
        } else if (key == "multipole") {
            int L;
            double a;
            if (!(ss >> L >> a))
                throw std::runtime_error(path + ": malformed multipole row");
            p.core_polarizability[L] = a;
        } else {
            throw std::runtime_error(path + ": unknown key '" + key + "'");
        }
    }
    if (!saw_schema) throw std::runtime_error(path + ": missing schema line");
    if (rows.empty()) throw std::runtime_error(path + ": no l_coeffs rows");
    int expect = 0;
    for (const auto& [l, c] : rows) {
        if (l != expect)
            throw std::runtime_error(path + ": l_coeffs rows must cover l = 0.. contiguously");
        p.per_l.push_back(c);
        ++expect;
    }
    if (p.z < 1.0) throw std::runtime_error(path + ": z must be >= 1");
    return p;
}

} // namespace photoion

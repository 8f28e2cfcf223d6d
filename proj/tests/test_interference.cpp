#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "common.hpp"
#include "photoion/interference.hpp"

using namespace photoion;
using Catch::Approx;

namespace {

const TwoPathwayModel& rb_model_75()
{
    static const TwoPathwayModel m(testutil::rb_params(), testutil::structure_grid(),
                                   find_state(testutil::rb_bound(0, 5), 5),
                                   testutil::rb_bound(1, 7), 5, 6, 75.0);
    return m;
}

double balanced_dw1_75()
{
    static const double dw = [] {
        int which = 0;
        return balance_detuning(rb_model_75(), which);
    }();
    return dw;
}

} // namespace

TEST_CASE("interference term identities")
{
    std::vector<Complex> t1 = {{1.0, 0.5}, {0.2, -0.3}, {0.0, 1.0}};
    SECTION("closed slit gives exactly zero")
    {
        std::vector<Complex> t2(3, Complex(0.0, 0.0));
        for (double v : interference_dcs(t1, t2)) REQUIRE(v == 0.0);
    }
    SECTION("constructive limit doubles the single-path DCS")
    {
        const auto d = interference_dcs(t1, t1);
        for (std::size_t i = 0; i < t1.size(); ++i)
            REQUIRE(d[i] == Approx(2.0 * std::norm(t1[i])).epsilon(1e-14));
    }
    SECTION("equals |t1+t2|^2 - |t1|^2 - |t2|^2")
    {
        std::vector<Complex> t2 = {{-0.3, 0.9}, {1.1, 0.0}, {0.4, 0.4}};
        const auto d = interference_dcs(t1, t2);
        for (std::size_t i = 0; i < t1.size(); ++i) {
            const double alt = std::norm(t1[i] + t2[i]) - std::norm(t1[i]) - std::norm(t2[i]);
            REQUIRE(d[i] == Approx(alt).margin(1e-12 * std::abs(alt) + 1e-15));
        }
    }
}

TEST_CASE("phase difference basics")
{
    std::vector<Complex> t1 = {{1.0, 0.5}, {0.2, -0.3}};
    SECTION("positive real multiple gives zero phase difference")
    {
        std::vector<Complex> t2 = {t1[0] * 2.5, t1[1] * 0.3};
        // arccos near its endpoint amplifies roundoff to ~sqrt(eps)
        for (double v : phase_difference(t1, t2)) REQUIRE(v == Approx(0.0).margin(1e-7));
    }
    SECTION("blocked amplitude masks the mesh point")
    {
        std::vector<Complex> t2 = {t1[0], Complex(0.0, 0.0)};
        const auto p = phase_difference(t1, t2);
        REQUIRE_FALSE(std::isnan(p[0]));
        REQUIRE(std::isnan(p[1]));
    }
}

TEST_CASE("Cauchy-Schwarz bound on the interference term", "[props]")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> t1, t2;
    for (int i = 0; i < 200; ++i) {
        t1.emplace_back(u(gen), u(gen));
        t2.emplace_back(u(gen), u(gen));
    }
    const auto d = interference_dcs(t1, t2);
    for (std::size_t i = 0; i < t1.size(); ++i)
        REQUIRE(std::abs(d[i]) <= 2.0 * std::abs(t1[i]) * std::abs(t2[i]) + 1e-14);
}

TEST_CASE("balanced Rb pathway amplitudes", "[slow]")
{
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    // the detuning lands in the 0.05..0.12 eV window for 75 cycles
    REQUIRE(au_to_ev(dw1) > 0.03);
    REQUIRE(au_to_ev(dw1) < 0.15);

    const auto theta = degree_mesh(2.0);
    const auto ev = model.evaluate(dw1, 0.0, theta);
    auto res = make_interference_result(ev, dw1, 0.0);
    // L2-balanced within the bisection tolerance
    REQUIRE(ev.path1.norm() / ev.path2.norm() == Approx(1.0).epsilon(0.01));
    REQUIRE(res.e_final > 0.0);
    REQUIRE(res.nu > 1.0);
    REQUIRE(res.nu < 2.0);

    // pointwise consistency of the stored arrays
    for (std::size_t i = 0; i < theta.size(); ++i) {
        REQUIRE(res.dcs_interf[i] ==
                Approx(res.dcs_total[i] - res.dcs_t1[i] - res.dcs_t2[i]).margin(1e-10));
        REQUIRE(std::abs(res.dcs_interf[i]) <=
                2.0 * std::sqrt(res.dcs_t1[i] * res.dcs_t2[i]) + 1e-12);
    }
}

TEST_CASE("blocking the blue pathway suppresses t2", "[slow]")
{
    // the single-pathway configuration: blue detuned 0.13 eV to close t2,
    // infrared slightly detuned 0.04 eV, long pulses
    const auto& model = rb_model_75();
    const std::vector<double> th = {0.0};
    const auto ev = model.evaluate(ev_to_au(0.04), ev_to_au(0.13), th);
    REQUIRE(ev.path2.norm() / ev.path1.norm() < 0.1);
}

TEST_CASE("zero pump amplitude kills both pathways with a warning")
{
    TwoPathwayModel model(testutil::rb_params(), testutil::structure_grid(),
                          find_state(testutil::rb_bound(0, 5), 5),
                          testutil::rb_bound(1, 7), 5, 6, 35.0,
                          /*amp1=*/0.0, /*amp2=*/0.05);
    const std::vector<double> th = {0.0, 1.0};
    const auto ev = model.evaluate(0.0, 0.0, th);
    REQUIRE(ev.path1.norm() == 0.0);
    REQUIRE(ev.path2.norm() == 0.0);
    REQUIRE_FALSE(ev.warnings.empty());
}

TEST_CASE("symmetric pair balances at zero detuning")
{
    // both pathways through the same intermediate state: identical reduced
    // matrix elements by construction, so no detuning is needed
    TwoPathwayModel model(testutil::rb_params(), testutil::structure_grid(),
                          find_state(testutil::rb_bound(0, 5), 5),
                          testutil::rb_bound(1, 7), 6, 6, 35.0, 0.05, 0.05);
    int which = 0;
    REQUIRE(balance_detuning(model, which) == Approx(0.0).margin(1e-10));
}

TEST_CASE("balance reports a bracketing failure with a scan")
{
    // a pair that is already unbalanced the wrong way around cannot be
    // balanced by detuning pathway 1 upward within a tiny bracket
    const auto& model = rb_model_75();
    REQUIRE_THROWS_AS(
        [&] {
            int which = 0;
            return balance_detuning(model, which, /*bracket_hi_ev=*/1e-4);
        }(),
        BalanceError);
}

TEST_CASE("global phase invariance of the interference observables", "[slow][props]")
{
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    const auto theta = degree_mesh(10.0);
    const auto base = model.evaluate(dw1, 0.0, theta);
    const auto shifted = model.evaluate(dw1, 0.0, theta, /*phase1=*/0.87, /*phase2=*/2.31);
    const auto d0 = interference_dcs(base.path1.t, base.path2.t);
    const auto d1 = interference_dcs(shifted.path1.t, shifted.path2.t);
    const auto p0 = phase_difference(base.path1.t, base.path2.t);
    const auto p1 = phase_difference(shifted.path1.t, shifted.path2.t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        REQUIRE(d1[i] == Approx(d0[i]).margin(1e-12 * std::abs(d0[i]) + 1e-18));
        REQUIRE(p1[i] == Approx(p0[i]).margin(1e-9));
    }
}

TEST_CASE("delta-phi mesh symmetry under theta -> pi - theta", "[slow][props]")
{
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    std::vector<double> theta, mirrored;
    for (int d = 5; d < 90; d += 10) {
        theta.push_back(deg_to_rad(d));
        mirrored.push_back(deg_to_rad(180 - d));
    }
    const auto a = model.evaluate(dw1, 0.0, theta);
    const auto b = model.evaluate(dw1, 0.0, mirrored);
    const auto pa = phase_difference(a.path1.t, a.path2.t);
    const auto pb = phase_difference(b.path1.t, b.path2.t);
    for (std::size_t i = 0; i < theta.size(); ++i)
        REQUIRE(pa[i] == Approx(pb[i]).margin(1e-10));
}

TEST_CASE("symmetry-adapted fit reproduces the 5p/6p phase curve", "[slow][props]")
{
    // fit sum_{n=0..2} a_{2n} cos^{2n}(theta) to delta-phi(theta), residual < 2 deg
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    const auto theta = degree_mesh(5.0);
    const auto ev = model.evaluate(dw1, 0.0, theta);
    const auto phi = phase_difference(ev.path1.t, ev.path2.t);

    // 3x3 normal equations in the basis {1, c^2, c^4}, weighted by the
    // pathway amplitude product (where the phase difference is meaningful)
    std::vector<double> weight(theta.size());
    double wmax = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        weight[i] = std::abs(ev.path1.t[i]) * std::abs(ev.path2.t[i]);
        wmax = std::max(wmax, weight[i]);
    }
    double ata[3][3] = {};
    double atb[3] = {};
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double c2 = std::cos(theta[i]) * std::cos(theta[i]);
        const double base[3] = {1.0, c2, c2 * c2};
        for (int a = 0; a < 3; ++a) {
            atb[a] += weight[i] * base[a] * phi[i];
            for (int b = 0; b < 3; ++b) ata[a][b] += weight[i] * base[a] * base[b];
        }
    }
    // Gaussian elimination
    double m[3][4];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) m[a][b] = ata[a][b];
        m[a][3] = atb[a];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < 3; ++rr)
            if (std::abs(m[rr][col]) > std::abs(m[piv][col])) piv = rr;
        std::swap(m[col], m[piv]);
        for (int rr = 0; rr < 3; ++rr) {
            if (rr == col) continue;
            const double f = m[rr][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[rr][cc] -= f * m[col][cc];
        }
    }
    const double coef[3] = {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double c2 = std::cos(theta[i]) * std::cos(theta[i]);
        const double fit = coef[0] + coef[1] * c2 + coef[2] * c2 * c2;
        num += weight[i] * (fit - phi[i]) * (fit - phi[i]);
        den += weight[i];
        if (weight[i] > 0.1 * wmax)
            REQUIRE(std::abs(fit - phi[i]) < deg_to_rad(5.0));
    }
    REQUIRE(std::sqrt(num / den) < deg_to_rad(2.0)); // weighted fit residual
}

TEST_CASE("control scheme: exact reconstruction and the zero-control limit", "[slow]")
{
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    const auto theta = degree_mesh(15.0);

    ControlSchemeConfig cfg;
    cfg.ideal_blocking = true;
    for (double strength : {0.0, 0.8}) {
        const auto res = control_scheme(model, theta, dw1, strength, cfg);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double scale = std::abs(res.dcs_direct[i]) + 1e-300;
            REQUIRE(std::abs(res.dcs_reconstructed[i] - res.dcs_direct[i]) / scale < 1e-8);
        }
    }
}

TEST_CASE("stochastic averaging: determinism and the analytic mean", "[slow]")
{
    const auto& model = rb_model_75();
    const double dw1 = balanced_dw1_75();
    const auto theta = degree_mesh(30.0);
    const std::vector<std::size_t> cps = {10, 100, 1000};

    const auto a = stochastic_average(model, theta, dw1, 0.13, 1000, 42, cps);
    const auto b = stochastic_average(model, theta, dw1, 0.13, 1000, 42, cps);
    REQUIRE(a.mean_u == b.mean_u); // bit-identical under one seed
    for (std::size_t c = 0; c < a.averages.size(); ++c)
        for (std::size_t i = 0; i < theta.size(); ++i)
            REQUIRE(a.averages[c][i] == b.averages[c][i]);

    // E[u] = 0: the 1000-sample mean is within a few sigma of zero
    REQUIRE(std::abs(a.mean_u) < 5.0 / std::sqrt(3.0 * 1000.0));

    // averaged curves are the running mean times the reference curve
    const auto& avg = a.averages.back();
    for (std::size_t i = 0; i < theta.size(); ++i)
        REQUIRE(avg[i] == Approx(a.mean_u * a.reference[i]).margin(1e-15));

    REQUIRE_THROWS(stochastic_average(model, theta, dw1, 0.13, 0, 1, cps));
}

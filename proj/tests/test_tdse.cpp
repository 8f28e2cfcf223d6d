#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "common.hpp"
#include "photoion/amplitudes.hpp"
#include "photoion/dipole.hpp"
#include "photoion/gauge.hpp"
#include "photoion/propagator.hpp"
#include "photoion/spectra.hpp"

using namespace photoion;
using Catch::Approx;

namespace {

struct SmallRb {
    RadialGrid grid = RadialGrid::from_extent(0.01, 150.0, 10.0, 0.9, 0.05);
    std::vector<BoundState> s_states, p_states;
    SmallRb()
    {
        s_states = solve_bound(testutil::rb_params(), grid, 0, 5);
        p_states = solve_bound(testutil::rb_params(), grid, 1, 6);
    }
    const BoundState& s5() const { return find_state(s_states, 5); }
    const BoundState& p5() const { return find_state(p_states, 5); }
    const BoundState& p6() const { return find_state(p_states, 6); }
};

const SmallRb& small_rb()
{
    static SmallRb m;
    return m;
}

} // namespace

TEST_CASE("field-free propagation keeps the ground state stationary")
{
    const auto& m = small_rb();
    auto wp = initial_wavepacket(m.grid, m.s5(), 2);
    REQUIRE(occupation(wp, m.s5()) == Approx(1.0).margin(1e-8));
    REQUIRE(occupation(wp, m.p5()) == Approx(0.0).margin(1e-12));

    std::vector<LaserPulse> none;
    PropagationOptions opt;
    opt.dt = 0.2;
    propagate(wp, testutil::rb_params(), none, 80.0, opt);
    REQUIRE(occupation(wp, m.s5()) == Approx(1.0).margin(1e-8));
    REQUIRE(wp.norm() == Approx(1.0).margin(1e-9));
}

TEST_CASE("norm conservation without absorber, loss with absorber", "[slow]")
{
    const auto& m = small_rb();
    const double w_ir = m.p5().energy - m.s5().energy;
    std::vector<LaserPulse> pulses = {
        LaserPulse(w_ir, 0.007, 3.0, 0.0, 0.0, PulseLabel::ir)};
    const double t_end = pulses[0].stop() + 20.0;

    auto wp0 = initial_wavepacket(m.grid, m.s5(), 4);
    wp0.time = pulses[0].start();
    PropagationOptions opt;
    opt.dt = 0.2;
    opt.absorber = false;
    auto wp = wp0;
    propagate(wp, testutil::rb_params(), pulses, t_end, opt);
    REQUIRE(wp.norm() == Approx(1.0).margin(1e-6));

    // with the absorber on, nothing should reach the boundary on this box
    opt.absorber = true;
    auto wp2 = wp0;
    propagate(wp2, testutil::rb_params(), pulses, t_end, opt);
    REQUIRE(wp2.norm() <= 1.0 + 1e-8);
}

TEST_CASE("resonant occupation growth tracks first-order theory", "[slow]")
{
    const auto& m = small_rb();
    const double w = m.p6().energy - m.s5().energy;
    std::vector<LaserPulse> pulses = {LaserPulse(w, 0.01, 4.0, 0.0, 0.0, PulseLabel::bl)};

    auto wp = initial_wavepacket(m.grid, m.s5(), 3);
    wp.time = pulses[0].start();
    PropagationOptions opt;
    opt.dt = 0.1;

    std::vector<double> t_samples, occ_samples;
    opt.observer = [&](const ChannelWavepacket& w_) {
        t_samples.push_back(w_.time);
        occ_samples.push_back(occupation(w_, m.p6()));
    };
    opt.sample_interval = 50;
    propagate(wp, testutil::rb_params(), pulses, pulses[0].stop() + 5.0, opt);

    const double d_me = radial_dipole_integral(m.p6().u, m.s5().u, m.grid,
                                               testutil::rb_params(), true);
    BoundTransition f{w, dipole_angular_z(1, 0) * d_me};
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        const double pt = std::norm(d1_amplitude(pulses, f, t_samples[i]));
        if (pt < 1e-6) continue;
        REQUIRE(occ_samples[i] == Approx(pt).epsilon(0.05));
    }
}

TEST_CASE("projection of the unperturbed ground state is empty")
{
    const auto& m = small_rb();
    auto wp = initial_wavepacket(m.grid, m.s5(), 2);
    wp.time = 10.0;
    const auto mesh = uniform_energy_mesh(0.1, 1.0, 12);
    const std::vector<BoundState> subtract = {m.s5()};
    const auto amps = project_continuum(wp, testutil::rb_params(), mesh, 0.0, -1, subtract);
    for (int l = 0; l <= amps.l_max; ++l)
        for (std::size_t ie = 0; ie < mesh.size(); ++ie)
            REQUIRE(std::abs(amps.a[static_cast<std::size_t>(l)][ie]) < 1e-6);
}

TEST_CASE("projection refuses a wavepacket taken under the field")
{
    const auto& m = small_rb();
    auto wp = initial_wavepacket(m.grid, m.s5(), 2);
    wp.time = 5.0;
    const auto mesh = uniform_energy_mesh(0.1, 1.0, 4);
    REQUIRE_THROWS(project_continuum(wp, testutil::rb_params(), mesh, 50.0));
}

TEST_CASE("boundary overflow raises a hard error")
{
    // brutally strong resonant drive on a small box without absorber
    const auto& m = small_rb();
    const double w = m.p5().energy - m.s5().energy;
    std::vector<LaserPulse> pulses = {LaserPulse(w, 1.0, 8.0, 0.0, 0.0, PulseLabel::ir)};
    auto wp = initial_wavepacket(m.grid, m.s5(), 4);
    wp.time = pulses[0].start();
    PropagationOptions opt;
    opt.dt = 0.2;
    opt.absorber = false;
    opt.check_interval = 20;
    REQUIRE_THROWS_WITH(propagate(wp, testutil::rb_params(), pulses, pulses[0].stop(), opt),
                        Catch::Matchers::ContainsSubstring("r_max"));
}

TEST_CASE("step-size heuristic warns when the carrier is under-resolved")
{
    const auto& m = small_rb();
    std::vector<LaserPulse> pulses = {LaserPulse(0.5, 0.0, 2.0)};
    auto wp = initial_wavepacket(m.grid, m.s5(), 1);
    wp.time = pulses[0].start();
    PropagationOptions opt;
    opt.dt = 1.0; // 12.6 steps per cycle
    const auto rep = propagate(wp, testutil::rb_params(), pulses, wp.time + 5.0, opt);
    REQUIRE_FALSE(rep.warnings.empty());
}

TEST_CASE("split-step and Lanczos propagators agree, both gauges", "[slow][props]")
{
    const auto& m = small_rb();
    const double w = m.p5().energy - m.s5().energy;
    std::vector<LaserPulse> pulses = {LaserPulse(w, 0.02, 2.0, 0.0, 0.0, PulseLabel::ir)};
    const double t_end = pulses[0].stop() + 5.0;

    auto wp_split = initial_wavepacket(m.grid, m.s5(), 3);
    wp_split.time = pulses[0].start();
    PropagationOptions opt;
    opt.dt = 0.05;
    opt.absorber = false;
    opt.corrected_dipole = false; // all three propagations share the bare operator
    propagate(wp_split, testutil::rb_params(), pulses, t_end, opt);

    auto wp_len = initial_wavepacket(m.grid, m.s5(), 3);
    wp_len.time = pulses[0].start();
    LanczosOptions lopt;
    lopt.dt = 0.1;
    lanczos_propagate(wp_len, testutil::rb_params(), pulses, t_end, Gauge::length, lopt);

    auto wp_vel = initial_wavepacket(m.grid, m.s5(), 3);
    wp_vel.time = pulses[0].start();
    lanczos_propagate(wp_vel, testutil::rb_params(), pulses, t_end, Gauge::velocity, lopt);

    const double o_split = occupation(wp_split, m.p5());
    const double o_len = occupation(wp_len, m.p5());
    const double o_vel = occupation(wp_vel, m.p5());
    REQUIRE(o_split > 1e-4); // the drive actually moved population
    REQUIRE(o_len == Approx(o_split).epsilon(0.01));
    REQUIRE(o_vel == Approx(o_split).epsilon(0.02)); // gauge consistency
    REQUIRE(occupation(wp_vel, m.s5()) == Approx(occupation(wp_split, m.s5())).epsilon(0.02));
}

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "photoion/amplitudes.hpp"
#include "photoion/config.hpp"
#include "photoion/constants.hpp"
#include "photoion/dipole.hpp"
#include "photoion/interference.hpp"
#include "photoion/output.hpp"
#include "photoion/propagator.hpp"
#include "photoion/spectra.hpp"

namespace photoion {

inline constexpr const char* code_version = "0.1.0";

/// Everything a run needs, resolved from the config once.
struct RunContext {
    ExperimentConfig cfg;
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    int threads = 2;
    bool paper_scale = false;

    ModelPotentialParams params;
    RadialGrid grid;                  // structure grid (bound/continuum/PT)
    std::vector<BoundState> s_states; // ground series
    std::vector<BoundState> p_states; // intermediate series

    Json manifest_extra;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::pair<int, int> parse_pair(const std::string& text)
{
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        throw ConfigError("pair '" + text + "' must look like '5-6'");
    return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
}

} // namespace detail

inline RunContext make_context(const ExperimentConfig& cfg,
                               const std::filesystem::path& out_dir,
                               std::uint64_t seed, int threads, bool paper_scale)
{
    validate_config(cfg);
    RunContext ctx;
    ctx.cfg = cfg;
    ctx.out_dir = out_dir;
    ctx.seed = cfg.has("seed") ? static_cast<std::uint64_t>(cfg.get_int("seed")) : seed;
    ctx.threads = threads;
    ctx.paper_scale = paper_scale;
    std::filesystem::create_directories(out_dir);

    ctx.params = ModelPotentialParams::load(cfg.get_string("atom"));
    const double dr = cfg.get_number("grid.dr", 0.0025);
    const double r_max = cfg.get_number("grid.r_max", 400.0);
    const double r_core = cfg.get_number("grid.r_core", 5.0);
    const double abs_start = cfg.get_number("grid.absorber_start", 0.9);
    const double abs_w0 = cfg.get_number("grid.absorber_w0", 0.05);
    ctx.grid = RadialGrid::from_extent(dr, r_max, r_core, abs_start, abs_w0);

    const int n_s = static_cast<int>(cfg.get_int("bound.n_s", 6));
    const int n_p = static_cast<int>(cfg.get_int("bound.n_p", 8));

    const std::uint64_t cache_key =
        ctx.grid.hash() ^ (ctx.params.hash() * 0x9e3779b97f4a7c15ull);
    const auto cache_path = out_dir / "bound_cache.bin";
    std::vector<BoundState> cached;
    if (cfg.get_bool("cache", true) &&
        read_bound_cache(cache_path, cache_key ^ (static_cast<std::uint64_t>(n_s) << 32 |
                                                  static_cast<std::uint64_t>(n_p)),
                         cached)) {
        for (auto& s : cached)
            (s.l == 0 ? ctx.s_states : ctx.p_states).push_back(std::move(s));
    } else {
        ctx.s_states = solve_bound(ctx.params, ctx.grid, 0, n_s);
        ctx.p_states = solve_bound(ctx.params, ctx.grid, 1, n_p);
        if (cfg.get_bool("cache", true)) {
            std::vector<BoundState> all = ctx.s_states;
            all.insert(all.end(), ctx.p_states.begin(), ctx.p_states.end());
            write_bound_cache(cache_path,
                              cache_key ^ (static_cast<std::uint64_t>(n_s) << 32 |
                                           static_cast<std::uint64_t>(n_p)),
                              all);
        }
    }
    return ctx;
}

namespace detail {

inline const BoundState& ground_state(const RunContext& ctx)
{
    const int n = static_cast<int>(ctx.cfg.get_int("ground.n", 5));
    return find_state(ctx.s_states, n);
}

/// Carrier frequency of a configured pulse: either an explicit frequency or a
/// transition reference plus detuning. 'detuning = auto' is resolved by the
/// caller (balance search); here it reads as zero.
inline double resolve_carrier(const RunContext& ctx, const std::string& section,
                              double* detuning_out = nullptr)
{
    const auto& cfg = ctx.cfg;
    double detuning = 0.0;
    const std::string det_key = section + ".detuning";
    if (cfg.has(det_key) && cfg.get_string(det_key) != "auto")
        detuning = cfg.get_quantity(det_key, "energy");
    if (detuning_out) *detuning_out = detuning;
    if (cfg.has(section + ".frequency"))
        return cfg.get_quantity(section + ".frequency", "energy") + detuning;
    const std::string tr = cfg.get_string(section + ".transition");
    const auto dash = tr.find('-');
    if (dash == std::string::npos)
        throw ConfigError(section + ".transition must look like '5s-5p'");
    auto level = [&](const std::string& label) -> double {
        const int n = std::stoi(label.substr(0, label.size() - 1));
        const char l = label.back();
        if (l == 's') return find_state(ctx.s_states, n).energy;
        if (l == 'p') return find_state(ctx.p_states, n).energy;
        throw ConfigError("unsupported level label '" + label + "'");
    };
    return carrier_from_transition(level(tr.substr(dash + 1)), level(tr.substr(0, dash)),
                                   detuning);
}

inline LaserPulse make_pulse(const RunContext& ctx, const std::string& section,
                             PulseLabel label, double default_amp)
{
    const auto& cfg = ctx.cfg;
    LaserPulse p(resolve_carrier(ctx, section),
                 cfg.get_number(section + ".amplitude", default_amp),
                 cfg.get_number(section + ".cycles", 10.0),
                 cfg.get_quantity(section + ".delta_t", "time", 0.0),
                 cfg.get_quantity(section + ".phase", "angle", 0.0), label);
    return p;
}

inline TwoPathwayModel make_pathway_model(const RunContext& ctx, int n1, int n2)
{
    const auto& cfg = ctx.cfg;
    return TwoPathwayModel(ctx.params, ctx.grid, ground_state(ctx), ctx.p_states, n1, n2,
                           cfg.get_number("pulse.1.cycles", 75.0),
                           cfg.get_number("pulse.1.amplitude", 0.007),
                           cfg.get_number("pulse.2.amplitude", 0.05));
}

/// Balance detuning for pathway 1's pulse if 'auto' is configured, otherwise
/// the configured values.
inline std::pair<double, double> resolve_detunings(const RunContext& ctx,
                                                   const TwoPathwayModel& model,
                                                   Json& derived)
{
    const auto& cfg = ctx.cfg;
    double dw1 = 0.0, dw2 = 0.0;
    const bool auto1 = cfg.get_string("pulse.1.detuning", "auto") == "auto";
    if (cfg.has("pulse.2.detuning") && cfg.get_string("pulse.2.detuning") != "auto")
        dw2 = cfg.get_quantity("pulse.2.detuning", "energy");
    if (auto1) {
        int which = 0;
        const double dw = balance_detuning(model, which);
        if (which == 1) dw1 = dw;
        else dw2 += dw;
        derived["balanced_pathway"] = which;
        derived["balance_detuning_ev"] = au_to_ev(dw);
    } else {
        dw1 = cfg.get_quantity("pulse.1.detuning", "energy");
    }
    derived["detuning1_ev"] = au_to_ev(dw1);
    derived["detuning2_ev"] = au_to_ev(dw2);
    return {dw1, dw2};
}

inline std::vector<double> theta_mesh_from(const ExperimentConfig& cfg)
{
    return degree_mesh(cfg.get_number("mesh.theta_step", 1.0));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Individual run kinds. Each returns the summary that goes into the manifest.
// ---------------------------------------------------------------------------

inline Json run_bound(RunContext& ctx)
{
    CsvWriter csv({"label_n", "l", "energy_au", "energy_ev"});
    Json levels;
    for (const auto* block : {&ctx.s_states, &ctx.p_states})
        for (const auto& s : *block) {
            csv.add_row({static_cast<double>(s.n), static_cast<double>(s.l), s.energy,
                         au_to_ev(s.energy)});
            levels[s.label()] = au_to_ev(s.energy);
        }
    csv.write(ctx.out_dir / "bound_states.csv");

    // ground -> p reduced dipoles, corrected and bare
    const auto& g = detail::ground_state(ctx);
    CsvWriter dip({"n_p", "d_corrected_au", "d_bare_au"});
    for (const auto& p : ctx.p_states) {
        dip.add_row({static_cast<double>(p.n),
                     reduced_dipole(p, g, ctx.grid, ctx.params, true).value,
                     reduced_dipole(p, g, ctx.grid, ctx.params, false).value});
    }
    dip.write(ctx.out_dir / "dipoles.csv");

    Json summary;
    summary["levels_ev"] = levels;
    summary["outputs"] = {"bound_states.csv", "dipoles.csv"};
    return summary;
}

inline Json run_continuum(RunContext& ctx)
{
    const auto& cfg = ctx.cfg;
    const int l = static_cast<int>(cfg.get_int("continuum.l"));
    CsvWriter csv({"energy_ev", "k_au", "eta_rad", "coulomb_phase_rad", "delta_rad"});
    for (const auto& etxt : cfg.get_list("continuum.energies")) {
        const double e = ExperimentConfig::parse_quantity("continuum.energies", etxt,
                                                          "energy");
        const auto cs = solve_continuum(ctx.params, ctx.grid, l, std::sqrt(2.0 * e));
        csv.add_row({au_to_ev(e), cs.k, cs.eta, cs.coulomb_phase, cs.phase});
    }
    csv.write(ctx.out_dir / "continuum.csv");
    Json summary;
    summary["outputs"] = {"continuum.csv"};
    return summary;
}

struct PropagateArtifacts {
    ChannelWavepacket wp;
    PartialWaveAmplitudes amps;
    std::vector<double> t_series;
    std::vector<double> c5p_series, c6p_series, norm_series;
    std::vector<LaserPulse> pulses;
    double fields_off = 0.0;
};

/// TDSE pipeline used by both the CLI 'propagate' run and the acceptance
/// suite. The propagation grid is separate from the structure grid.
inline PropagateArtifacts propagate_pipeline(RunContext& ctx)
{
    const auto& cfg = ctx.cfg;
    const double dr = cfg.get_number("tdse.dr", ctx.paper_scale ? 0.005 : 0.01);
    const double r_max = cfg.get_number("tdse.r_max", ctx.paper_scale ? 10000.0 : 2000.0);
    const auto grid = RadialGrid::from_extent(
        dr, r_max, cfg.get_number("grid.r_core", 5.0),
        cfg.get_number("grid.absorber_start", 0.9), cfg.get_number("grid.absorber_w0", 0.05));

    // bound states on the propagation grid (carrier frequencies must be
    // resonant with this grid's own spectrum)
    RunContext tdse_ctx = ctx;
    tdse_ctx.grid = grid;
    tdse_ctx.cfg.set("cache", "false");
    tdse_ctx.s_states = solve_bound(ctx.params, grid, 0,
                                    static_cast<int>(cfg.get_int("bound.n_s", 6)));
    tdse_ctx.p_states = solve_bound(ctx.params, grid, 1,
                                    static_cast<int>(cfg.get_int("bound.n_p", 8)));

    PropagateArtifacts art;
    art.pulses.push_back(detail::make_pulse(tdse_ctx, "pulse.1", PulseLabel::ir, 0.007));
    art.pulses.push_back(detail::make_pulse(tdse_ctx, "pulse.2", PulseLabel::bl, 0.05));
    if (cfg.get_bool("pulses.shared_duration", false)) {
        const double T = art.pulses[0].duration();
        for (auto& p : art.pulses) p.duration_override = T;
    }

    const auto& g = detail::ground_state(tdse_ctx);
    const auto& p5 = find_state(tdse_ctx.p_states, 5);
    const auto& p6 = find_state(tdse_ctx.p_states, 6);

    const int l_max = static_cast<int>(cfg.get_int("tdse.l_max", 8));
    art.wp = initial_wavepacket(grid, g, l_max);
    double t_start = 0.0;
    for (const auto& p : art.pulses) t_start = std::min(t_start, p.start());
    art.wp.time = t_start;
    art.fields_off = pulses_end(art.pulses);

    PropagationOptions opt;
    opt.dt = cfg.get_number("tdse.dt", 0.25);
    opt.absorber = cfg.get_bool("tdse.absorber", true);
    opt.corrected_dipole = cfg.get_bool("tdse.corrected_dipole", true);
    opt.observer = [&](const ChannelWavepacket& w) {
        art.t_series.push_back(w.time);
        art.c5p_series.push_back(occupation(w, p5));
        art.c6p_series.push_back(occupation(w, p6));
        art.norm_series.push_back(w.norm());
    };
    opt.sample_interval = static_cast<int>(cfg.get_int("tdse.sample_interval", 100));

    // T_obs: first time past switch-off plus one period of the slower carrier
    const double t_obs = art.fields_off +
        cfg.get_number("tdse.t_obs_extra_cycles", 1.0) * 2.0 * pi / art.pulses[0].omega;
    const auto rep = propagate(art.wp, ctx.params, art.pulses, t_obs, opt);
    for (const auto& w : rep.warnings) ctx.warnings.push_back(w);

    const auto mesh = uniform_energy_mesh(
        cfg.get_quantity("mesh.e_min", "energy", ev_to_au(0.05)) * hartree_ev,
        cfg.get_quantity("mesh.e_max", "energy", ev_to_au(1.5)) * hartree_ev,
        static_cast<std::size_t>(cfg.get_int("mesh.n_points", 400)));
    std::vector<BoundState> subtract = tdse_ctx.s_states;
    subtract.insert(subtract.end(), tdse_ctx.p_states.begin(), tdse_ctx.p_states.end());
    art.amps = project_continuum(art.wp, ctx.params, mesh, art.fields_off,
                                 static_cast<int>(cfg.get_int("mesh.l_max_project", 4)),
                                 subtract);
    return art;
}

inline Json run_propagate(RunContext& ctx)
{
    auto art = propagate_pipeline(ctx);

    CsvWriter occ({"t_au", "c_5p", "c_6p", "norm"});
    for (std::size_t i = 0; i < art.t_series.size(); ++i)
        occ.add_row({art.t_series[i], art.c5p_series[i], art.c6p_series[i],
                     art.norm_series[i]});
    occ.write(ctx.out_dir / "occupations.csv");

    std::vector<std::string> cols = {"energy_ev"};
    for (int l = 0; l <= art.amps.l_max; ++l) {
        cols.push_back("sigma_l" + std::to_string(l));
        cols.push_back("phase_l" + std::to_string(l) + "_rad");
    }
    CsvWriter spec(cols);
    for (std::size_t ie = 0; ie < art.amps.energies.size(); ++ie) {
        std::vector<double> row = {au_to_ev(art.amps.energies[ie])};
        for (int l = 0; l <= art.amps.l_max; ++l) {
            const auto a = art.amps.a[static_cast<std::size_t>(l)][ie];
            row.push_back(std::norm(a));
            row.push_back(std::abs(a) > 0.0 ? std::arg(a) : 0.0);
        }
        spec.add_row(row);
    }
    spec.write(ctx.out_dir / "spectrum.csv");

    if (ctx.cfg.get_bool("tdse.checkpoint", false))
        write_checkpoint(ctx.out_dir / "wavepacket.chk", art.wp);

    // sigma_2 peak characterization
    std::vector<double> s2(art.amps.energies.size());
    for (std::size_t ie = 0; ie < s2.size(); ++ie) s2[ie] = art.amps.sigma_l(2, ie);
    const auto pk = analyze_peak(art.amps.energies, s2);

    Json summary;
    summary["final_norm"] = art.wp.norm();
    summary["c_5p_final"] = art.c5p_series.empty() ? 0.0 : art.c5p_series.back();
    summary["c_6p_final"] = art.c6p_series.empty() ? 0.0 : art.c6p_series.back();
    summary["sigma2_peak_ev"] = au_to_ev(pk.position);
    summary["sigma2_fwhm_ev"] = au_to_ev(pk.fwhm);
    summary["t_obs"] = art.amps.t_obs;
    summary["outputs"] = {"occupations.csv", "spectrum.csv"};
    return summary;
}

inline Json run_pt(RunContext& ctx)
{
    const auto& cfg = ctx.cfg;
    std::vector<LaserPulse> pulses = {
        detail::make_pulse(ctx, "pulse.1", PulseLabel::ir, 0.007),
        detail::make_pulse(ctx, "pulse.2", PulseLabel::bl, 0.05)};
    if (cfg.get_bool("pulses.shared_duration", true)) {
        const double T = pulses[0].duration();
        for (auto& p : pulses) p.duration_override = T;
    }

    const auto& g = detail::ground_state(ctx);
    const auto& p5 = find_state(ctx.p_states, 5);
    const auto& p6 = find_state(ctx.p_states, 6);
    const BoundTransition tr5{p5.energy - g.energy,
                              dipole_angular_z(1, 0) *
                                  reduced_dipole(p5, g, ctx.grid, ctx.params, true).value};
    const BoundTransition tr6{p6.energy - g.energy,
                              dipole_angular_z(1, 0) *
                                  reduced_dipole(p6, g, ctx.grid, ctx.params, true).value};

    double t_lo = 0.0, t_hi = 0.0;
    for (const auto& p : pulses) {
        t_lo = std::min(t_lo, p.start());
        t_hi = std::max(t_hi, p.stop());
    }
    const std::size_t n_t = static_cast<std::size_t>(cfg.get_int("pt.n_times", 400));
    CsvWriter occ({"t_au", "c_5p", "c_6p"});
    for (std::size_t i = 0; i <= n_t; ++i) {
        const double t = t_lo + (t_hi + 20.0 - t_lo) * static_cast<double>(i) / n_t;
        occ.add_row({t, std::norm(d1_amplitude(pulses, tr5, t)),
                     std::norm(d1_amplitude(pulses, tr6, t))});
    }
    occ.write(ctx.out_dir / "pt_occupations.csv");

    // pathway amplitude table at the two-photon final energy
    const auto model = detail::make_pathway_model(ctx, 5, 6);
    Json derived;
    const auto [dw1, dw2] = detail::resolve_detunings(ctx, model, derived);
    const std::vector<double> th0 = {0.0};
    const auto ev = model.evaluate(dw1, dw2, th0);
    CsvWriter amp({"e_final_ev", "pathway", "l", "re_s", "im_s", "abs_t", "phase_t_rad"});
    for (int path = 1; path <= 2; ++path) {
        const auto& pa = path == 1 ? ev.path1 : ev.path2;
        const Complex t_total = pa.t[0];
        amp.add_row({au_to_ev(ev.e_final), static_cast<double>(path), 0.0,
                     pa.s_wave.real(), pa.s_wave.imag(), std::abs(t_total),
                     std::arg(t_total)});
        amp.add_row({au_to_ev(ev.e_final), static_cast<double>(path), 2.0,
                     pa.d_wave.real(), pa.d_wave.imag(), std::abs(t_total),
                     std::arg(t_total)});
    }
    amp.write(ctx.out_dir / "pt_amplitudes.csv");

    Json summary;
    summary["derived"] = derived;
    summary["e_final_ev"] = au_to_ev(ev.e_final);
    summary["outputs"] = {"pt_occupations.csv", "pt_amplitudes.csv"};
    return summary;
}

inline void write_interference_csv(const std::filesystem::path& path,
                                   const InterferenceResult& res)
{
    CsvWriter csv({"theta_deg", "dcs_t1", "dcs_t2", "dcs_total", "dcs_interf",
                   "delta_phi12_deg"});
    for (std::size_t i = 0; i < res.theta.size(); ++i)
        csv.add_row({rad_to_deg(res.theta[i]), res.dcs_t1[i], res.dcs_t2[i],
                     res.dcs_total[i], res.dcs_interf[i],
                     std::isnan(res.delta_phi12[i])
                         ? std::numeric_limits<double>::quiet_NaN()
                         : rad_to_deg(res.delta_phi12[i])});
    csv.write(path);
}

inline Json interference_summary(const InterferenceResult& res)
{
    double peak_total = 0.0;
    for (double v : res.dcs_total) peak_total = std::max(peak_total, v);
    double fr_min = 1e300, fr_max = 0.0, phi_min = 1e300, phi_max = -1e300;
    for (std::size_t i = 0; i < res.theta.size(); ++i) {
        const double fr = std::abs(res.dcs_interf[i]) / peak_total;
        fr_min = std::min(fr_min, fr);
        fr_max = std::max(fr_max, fr);
        if (!std::isnan(res.delta_phi12[i])) {
            phi_min = std::min(phi_min, res.delta_phi12[i]);
            phi_max = std::max(phi_max, res.delta_phi12[i]);
        }
    }
    Json j;
    j["nu"] = res.nu;
    j["delta_e_ev"] = au_to_ev(res.delta_e);
    j["e_final_ev"] = au_to_ev(res.e_final);
    j["interf_fraction_min"] = fr_min;
    j["interf_fraction_max"] = fr_max;
    j["delta_phi12_min_deg"] = rad_to_deg(phi_min);
    j["delta_phi12_max_deg"] = rad_to_deg(phi_max);
    j["detuning1_ev"] = au_to_ev(res.detuning1);
    j["detuning2_ev"] = au_to_ev(res.detuning2);
    return j;
}

inline Json run_interference(RunContext& ctx)
{
    const auto model = detail::make_pathway_model(
        ctx, static_cast<int>(ctx.cfg.get_int("pair.n1", 5)),
        static_cast<int>(ctx.cfg.get_int("pair.n2", 6)));
    Json derived;
    const auto [dw1, dw2] = detail::resolve_detunings(ctx, model, derived);
    const auto theta = detail::theta_mesh_from(ctx.cfg);
    auto res = make_interference_result(model.evaluate(dw1, dw2, theta), dw1, dw2);
    res.delta_e = model.delta_e();
    write_interference_csv(ctx.out_dir / "interference.csv", res);

    Json summary = interference_summary(res);
    summary["derived"] = derived;
    summary["outputs"] = {"interference.csv"};
    return summary;
}

inline Json run_pairs(RunContext& ctx)
{
    const auto theta = detail::theta_mesh_from(ctx.cfg);
    CsvWriter table({"n1", "n2", "delta_e_ev", "e_final_ev", "nu", "detuning_ev",
                     "interf_min_frac", "interf_max_frac", "dphi_min_deg", "dphi_max_deg"});
    Json per_pair;
    for (const auto& ptxt : ctx.cfg.get_list("pairs.list")) {
        const auto [n1, n2] = detail::parse_pair(ptxt);
        const auto model = detail::make_pathway_model(ctx, n1, n2);
        const auto res = pair_interference(model, theta);
        write_interference_csv(ctx.out_dir / ("pair_" + std::to_string(n1) + "p" +
                                              std::to_string(n2) + "p.csv"),
                               res);
        auto j = interference_summary(res);
        per_pair[ptxt] = j;
        table.add_row({static_cast<double>(n1), static_cast<double>(n2),
                       j["delta_e_ev"].get<double>(), j["e_final_ev"].get<double>(),
                       j["nu"].get<double>(),
                       au_to_ev(res.detuning1 != 0.0 ? res.detuning1 : res.detuning2),
                       j["interf_fraction_min"].get<double>(),
                       j["interf_fraction_max"].get<double>(),
                       j["delta_phi12_min_deg"].get<double>(),
                       j["delta_phi12_max_deg"].get<double>()});
    }
    table.write(ctx.out_dir / "pairs_summary.csv");
    Json summary;
    summary["pairs"] = per_pair;
    summary["outputs"] = {"pairs_summary.csv"};
    return summary;
}

inline Json run_control(RunContext& ctx)
{
    const auto model = detail::make_pathway_model(
        ctx, static_cast<int>(ctx.cfg.get_int("pair.n1", 5)),
        static_cast<int>(ctx.cfg.get_int("pair.n2", 6)));
    Json derived;
    const auto [dw1, dw2] = detail::resolve_detunings(ctx, model, derived);
    (void)dw2;
    const auto theta = detail::theta_mesh_from(ctx.cfg);

    ControlSchemeConfig cs;
    cs.block1_ev = ctx.cfg.get_number("control.block1_ev", 0.14);
    cs.block2_ev = ctx.cfg.get_number("control.block2_ev", 0.13);
    cs.n_cycles_control = ctx.cfg.get_number("control.cycles", 75.0);
    cs.ideal_blocking = ctx.cfg.get_bool("control.ideal_blocking", false);

    Json per_strength;
    for (const auto& stxt : ctx.cfg.get_list("control.strengths")) {
        const double s = std::stod(stxt);
        const auto res = control_scheme(model, theta, dw1, s, cs);
        CsvWriter csv({"theta_deg", "dcs_reconstructed", "dcs_direct", "delta_phi12_deg"});
        for (std::size_t i = 0; i < theta.size(); ++i)
            csv.add_row({rad_to_deg(theta[i]), res.dcs_reconstructed[i], res.dcs_direct[i],
                         std::isnan(res.delta_phi12[i])
                             ? std::numeric_limits<double>::quiet_NaN()
                             : rad_to_deg(res.delta_phi12[i])});
        csv.write(ctx.out_dir / ("control_" + stxt + ".csv"));
        Json j;
        j["recon_at_0"] = res.dcs_reconstructed[0];
        j["direct_at_0"] = res.dcs_direct[0];
        for (const auto& w : res.warnings) ctx.warnings.push_back(w);
        per_strength[stxt] = j;
    }
    Json summary;
    summary["derived"] = derived;
    summary["strengths"] = per_strength;
    return summary;
}

inline Json run_stochastic(RunContext& ctx)
{
    const auto model = detail::make_pathway_model(
        ctx, static_cast<int>(ctx.cfg.get_int("pair.n1", 5)),
        static_cast<int>(ctx.cfg.get_int("pair.n2", 6)));
    Json derived;
    const auto [dw1, dw2] = detail::resolve_detunings(ctx, model, derived);
    (void)dw2;
    const auto theta = detail::theta_mesh_from(ctx.cfg);

    std::vector<std::size_t> cps;
    for (const auto& c : ctx.cfg.get_list("stochastic.checkpoints"))
        cps.push_back(static_cast<std::size_t>(std::stoull(c)));
    if (cps.empty()) cps = {10, 100, 1000};
    const auto n_samples =
        static_cast<std::size_t>(ctx.cfg.get_int("stochastic.n_samples"));
    const double block2 = ctx.cfg.get_number("stochastic.block2_ev", 0.13);

    const auto res =
        stochastic_average(model, theta, dw1, block2, n_samples, ctx.seed, cps);

    std::vector<std::string> cols = {"theta_deg", "reference"};
    for (std::size_t c : res.checkpoints) cols.push_back("avg_n" + std::to_string(c));
    CsvWriter csv(cols);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        std::vector<double> row = {rad_to_deg(theta[i]), res.reference[i]};
        for (const auto& avg : res.averages) row.push_back(avg[i]);
        csv.add_row(row);
    }
    csv.write(ctx.out_dir / "stochastic.csv");

    Json summary;
    summary["derived"] = derived;
    summary["mean_u"] = res.mean_u;
    summary["seed"] = ctx.seed;
    summary["n_samples"] = n_samples;
    summary["outputs"] = {"stochastic.csv"};
    return summary;
}

// ---------------------------------------------------------------------------
// Entry point: validate, dispatch, write the manifest.
// ---------------------------------------------------------------------------

inline Json run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::uint64_t seed = 1, int threads = 2, bool paper_scale = false)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto ctx = make_context(cfg, out_dir, seed, threads, paper_scale);
    const auto kind = cfg.get_string("run");

    Json summary;
    if (kind == "bound") summary = run_bound(ctx);
    else if (kind == "continuum") summary = run_continuum(ctx);
    else if (kind == "propagate") summary = run_propagate(ctx);
    else if (kind == "pt") summary = run_pt(ctx);
    else if (kind == "interference") summary = run_interference(ctx);
    else if (kind == "pairs") summary = run_pairs(ctx);
    else if (kind == "control") summary = run_control(ctx);
    else if (kind == "stochastic") summary = run_stochastic(ctx);
    else throw ConfigError("unhandled run kind " + kind);

    const auto t1 = std::chrono::steady_clock::now();
    Json manifest;
    manifest["schema"] = 1;
    manifest["code_version"] = code_version;
    manifest["run"] = kind;
    manifest["seed"] = ctx.seed;
    manifest["threads"] = ctx.threads;
    manifest["paper_scale"] = ctx.paper_scale;
    manifest["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0;
    manifest["config_text"] = cfg.serialize();
    manifest["summary"] = summary;
    manifest["warnings"] = ctx.warnings;
    atomic_write(out_dir / "manifest.json", manifest.dump(2) + "\n");
    atomic_write(out_dir / "resolved_config.cfg", cfg.serialize());
    return manifest;
}

/// Independent runs over one swept numeric axis, on a bounded worker pool.
inline Json run_sweep(const ExperimentConfig& base, const std::string& axis,
                      const std::vector<std::string>& values,
                      const std::filesystem::path& out_dir, std::uint64_t seed,
                      int threads, bool paper_scale)
{
    if (values.empty()) throw ConfigError("sweep: empty values list");
    if (!base.has(axis))
        throw ConfigError("sweep: axis '" + axis + "' is not a config key");
    ExperimentConfig::parse_number(axis, base.get_string(axis)); // must be numeric

    std::filesystem::create_directories(out_dir);
    std::vector<Json> manifests(values.size());
    std::vector<std::string> errors(values.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= values.size()) return;
                i = next++;
            }
            try {
                ExperimentConfig cfg = base;
                cfg.set(axis, values[i]);
                manifests[i] = run(cfg, out_dir / (axis + "=" + values[i]), seed, 1,
                                   paper_scale);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("sweep point " + axis + "=" + values[i] +
                                     " failed: " + errors[i]);

    Json combined;
    combined["axis"] = axis;
    CsvWriter csv({"value", "wall_time_s"});
    for (std::size_t i = 0; i < values.size(); ++i) {
        combined["points"][values[i]] = manifests[i]["summary"];
        csv.add_row({std::stod(values[i]), manifests[i]["wall_time_s"].get<double>()});
    }
    csv.write(out_dir / "sweep_summary.csv");
    atomic_write(out_dir / "sweep_manifest.json", combined.dump(2) + "\n");
    return combined;
}

} // namespace photoion

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "photoion/runs.hpp"

using namespace photoion;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "photoion_runs" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string base_config(const std::string& run)
{
    return "run = " + run + "\n" +
           "atom = " + std::string(PHOTOION_DATA_DIR) + "/rb.params\n" +
           "[grid]\ndr = 0.005\nr_max = 400\n";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bound run emits levels and dipoles", "[slow]")
{
    const auto dir = fresh_dir("bound");
    auto cfg = ExperimentConfig::parse(base_config("bound"));
    const auto manifest = run(cfg, dir);
    REQUIRE(fs::exists(dir / "bound_states.csv"));
    REQUIRE(fs::exists(dir / "dipoles.csv"));
    REQUIRE(fs::exists(dir / "manifest.json"));
    const auto& levels = manifest["summary"]["levels_ev"];
    REQUIRE(levels.contains("5s"));
    REQUIRE(levels["5s"].get<double>() == Approx(-4.177).margin(0.02));
    // table contains the 5s row
    REQUIRE(slurp(dir / "bound_states.csv").find("\n5,0,") != std::string::npos);
}

TEST_CASE("manifest round-trip reproduces a run byte-for-byte", "[slow]")
{
    const auto dir1 = fresh_dir("rt1");
    const auto dir2 = fresh_dir("rt2");
    auto cfg = ExperimentConfig::parse(base_config("bound"));
    run(cfg, dir1);

    // re-ingest the manifest's embedded config and rerun
    Json manifest = Json::parse(slurp(dir1 / "manifest.json"));
    auto cfg2 = ExperimentConfig::parse(manifest["config_text"].get<std::string>());
    run(cfg2, dir2);
    REQUIRE(slurp(dir1 / "bound_states.csv") == slurp(dir2 / "bound_states.csv"));
    REQUIRE(slurp(dir1 / "dipoles.csv") == slurp(dir2 / "dipoles.csv"));
}

TEST_CASE("continuum run writes the phase table", "[slow]")
{
    const auto dir = fresh_dir("cont");
    auto text = base_config("continuum") +
                "[continuum]\nl = 0\nenergies = 0.2 eV, 0.4 eV\n";
    const auto manifest = run(ExperimentConfig::parse(text), dir);
    const auto csv = slurp(dir / "continuum.csv");
    REQUIRE(csv.find("energy_ev") == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("interference run with fixed detunings", "[slow]")
{
    const auto dir = fresh_dir("interf");
    auto text = base_config("interference") +
                "[mesh]\ntheta_step = 5\n"
                "[pulse.1]\ncycles = 35\ndetuning = 0.1 eV\n[pulse.2]\ncycles = 35\n";
    const auto manifest = run(ExperimentConfig::parse(text), dir);
    REQUIRE(fs::exists(dir / "interference.csv"));
    const auto& s = manifest["summary"];
    REQUIRE(s["e_final_ev"].get<double>() > 0.0);
    REQUIRE(s["nu"].get<double>() > 0.0);
    // Cauchy-Schwarz bound visible in the emitted numbers
    const auto csv = slurp(dir / "interference.csv");
    REQUIRE(csv.find("delta_phi12_deg") != std::string::npos);
}

TEST_CASE("stochastic run is reproducible for a fixed seed", "[slow]")
{
    const auto dir1 = fresh_dir("sto1");
    const auto dir2 = fresh_dir("sto2");
    auto text = base_config("stochastic") +
                "seed = 1234\n"
                "[mesh]\ntheta_step = 30\n"
                "[pulse.1]\ncycles = 35\ndetuning = 0.1 eV\n[pulse.2]\ncycles = 35\n"
                "[stochastic]\nn_samples = 100\ncheckpoints = 10, 100\n";
    run(ExperimentConfig::parse(text), dir1);
    run(ExperimentConfig::parse(text), dir2);
    REQUIRE(slurp(dir1 / "stochastic.csv") == slurp(dir2 / "stochastic.csv"));
}

TEST_CASE("sweep validation errors")
{
    auto cfg = ExperimentConfig::parse(base_config("bound"));
    REQUIRE_THROWS_AS(run_sweep(cfg, "grid.dr", {}, fresh_dir("sw0"), 1, 1, false),
                      ConfigError);
    REQUIRE_THROWS_AS(
        run_sweep(cfg, "no.such.axis", {"1"}, fresh_dir("sw1"), 1, 1, false), ConfigError);
    REQUIRE_THROWS_AS(run_sweep(cfg, "atom", {"1"}, fresh_dir("sw2"), 1, 1, false),
                      ConfigError);
}

TEST_CASE("sweep over a numeric axis produces per-point outputs", "[slow]")
{
    const auto dir = fresh_dir("sweep");
    auto text = base_config("continuum") +
                "[continuum]\nl = 0\nenergies = 0.4 eV\n";
    auto cfg = ExperimentConfig::parse(text);
    const auto combined = run_sweep(cfg, "continuum.l", {"0", "1"}, dir, 1, 2, false);
    REQUIRE(combined["points"].size() == 2);
    REQUIRE(fs::exists(dir / "continuum.l=0" / "continuum.csv"));
    REQUIRE(fs::exists(dir / "continuum.l=1" / "continuum.csv"));
    REQUIRE(fs::exists(dir / "sweep_summary.csv"));
}

#include <catch2/catch_amalgamated.hpp>

#include "photoion/config.hpp"

using namespace photoion;
using Catch::Approx;

static const char* sample_cfg = R"(
# comment line
run = interference
atom = data/rb.params

[grid]
dr = 0.005 au
r_max = 400

[pulse.1]
transition = 5s-5p
detuning = 0.15 eV
cycles = 35
phase = 90 deg

[pulse.2]
transition = 5s-6p
detuning = auto
)";

TEST_CASE("config parsing, units and lookups")
{
    auto cfg = ExperimentConfig::parse(sample_cfg);
    REQUIRE(cfg.get_string("run") == "interference");
    REQUIRE(cfg.get_number("grid.dr") == Approx(0.005));
    REQUIRE(cfg.get_number("grid.r_max") == Approx(400.0));
    REQUIRE(cfg.get_quantity("pulse.1.detuning", "energy") ==
            Approx(0.15 / hartree_ev));
    REQUIRE(cfg.get_quantity("pulse.1.phase", "angle") == Approx(pi / 2.0));
    REQUIRE(cfg.get_int("pulse.1.cycles") == 35);
    REQUIRE(cfg.get_string("pulse.2.detuning") == "auto");
    REQUIRE(cfg.get_number("missing.key", 7.5) == 7.5);
    REQUIRE_THROWS_AS(cfg.get_string("missing.key"), ConfigError);
    REQUIRE_THROWS_AS(cfg.get_quantity("pulse.1.detuning", "banana"), ConfigError);
}

TEST_CASE("config serialization round-trips")
{
    auto cfg = ExperimentConfig::parse(sample_cfg);
    const auto text = cfg.serialize();
    auto again = ExperimentConfig::parse(text);
    REQUIRE(again.serialize() == text);
    for (const auto& key : cfg.keys())
        REQUIRE(again.get_string(key) == cfg.get_string(key));
}

TEST_CASE("config syntax errors")
{
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[unterminated\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("novalue\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("= orphan\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("x = 1 parsec\n").get_quantity("x", "energy"),
                      ConfigError);
}

TEST_CASE("run-kind validation")
{
    auto cfg = ExperimentConfig::parse("run = nonsense\natom = data/rb.params\n");
    REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);

    auto cfg2 = ExperimentConfig::parse("run = pairs\natom = data/rb.params\n");
    REQUIRE_THROWS_WITH(validate_config(cfg2),
                        Catch::Matchers::ContainsSubstring("pairs.list"));

    // empty pulse set for a propagation is rejected before any computation
    auto cfg3 = ExperimentConfig::parse(
        "run = propagate\natom = data/rb.params\n"
        "[pulse.1]\ncycles = 6\namplitude = 0\n[pulse.2]\ncycles = 6\namplitude = 0\n");
    REQUIRE_THROWS_WITH(validate_config(cfg3),
                        Catch::Matchers::ContainsSubstring("nonzero pulse"));

    auto ok = ExperimentConfig::parse(
        "run = propagate\natom = data/rb.params\n"
        "[pulse.1]\ncycles = 6\n[pulse.2]\ncycles = 6\n");
    REQUIRE_NOTHROW(validate_config(ok));
}

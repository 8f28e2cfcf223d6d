#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "common.hpp"
#include "photoion/output.hpp"

using namespace photoion;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir()
{
    auto dir = fs::temp_directory_path() / "photoion_test_output";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("number formatting is fixed-precision and masks NaN")
{
    REQUIRE(format_number(1.0) == "1");
    REQUIRE(format_number(0.1234567890123456) == "0.123456789012");
    REQUIRE(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
}

TEST_CASE("csv writer emits byte-stable content")
{
    CsvWriter a({"x", "y"});
    a.add_row({1.0, 2.5});
    a.add_row({3.0, std::numeric_limits<double>::quiet_NaN()});
    CsvWriter b({"x", "y"});
    b.add_row({1.0, 2.5});
    b.add_row({3.0, std::numeric_limits<double>::quiet_NaN()});
    REQUIRE(a.str() == b.str());
    REQUIRE(a.str() == "x,y\n1,2.5\n3,\n");
    REQUIRE_THROWS(a.add_row({1.0}));
}

TEST_CASE("atomic write leaves no temp file")
{
    const auto dir = temp_dir();
    const auto p = dir / "atomic.txt";
    atomic_write(p, "hello\n");
    REQUIRE(fs::exists(p));
    REQUIRE_FALSE(fs::exists(p.string() + ".tmp"));
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "hello");
}

TEST_CASE("checkpoint round-trip and grid mismatch detection")
{
    const auto dir = temp_dir();
    auto grid = RadialGrid::from_extent(0.01, 120.0);
    const auto states = solve_bound(testutil::h_params(), grid, 0, 1);
    auto wp = initial_wavepacket(grid, states[0], 2);
    wp.time = 17.25;
    wp.channels[1][42] = Complex(0.125, -0.5);

    const auto p = dir / "wp.chk";
    write_checkpoint(p, wp);
    const auto back = read_checkpoint(p, grid);
    REQUIRE(back.time == wp.time);
    REQUIRE(back.l_max == wp.l_max);
    for (int l = 0; l <= wp.l_max; ++l)
        for (std::size_t i = 0; i < grid.n_points; ++i)
            REQUIRE(back.channels[static_cast<std::size_t>(l)][i] ==
                    wp.channels[static_cast<std::size_t>(l)][i]);

    auto other = RadialGrid::from_extent(0.01, 121.0);
    REQUIRE_THROWS(read_checkpoint(p, other));
}

TEST_CASE("bound cache hit and key mismatch miss")
{
    const auto dir = temp_dir();
    auto grid = RadialGrid::from_extent(0.01, 120.0);
    const auto states = solve_bound(testutil::h_params(), grid, 0, 2);
    const auto p = dir / "cache.bin";
    write_bound_cache(p, 0xabcdef, states);

    std::vector<BoundState> loaded;
    REQUIRE(read_bound_cache(p, 0xabcdef, loaded));
    REQUIRE(loaded.size() == states.size());
    REQUIRE(loaded[0].n == states[0].n);
    REQUIRE(loaded[0].energy == states[0].energy);
    REQUIRE(loaded[1].u == states[1].u);

    REQUIRE_FALSE(read_bound_cache(p, 0x123456, loaded));
    REQUIRE_FALSE(read_bound_cache(dir / "absent.bin", 0xabcdef, loaded));
}

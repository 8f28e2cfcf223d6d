#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoion/wavepacket.hpp"

namespace photoion {

using Json = nlohmann::json;

/// All numeric CSV content is printed with 12 significant digits so reruns of
/// the same configuration are byte-identical.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return ""; // masked values serialize as empty fields
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Write via a temp file and rename, so readers never observe partial output.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(std::move(header)) {}

    void add_row(const std::vector<double>& row)
    {
        if (row.size() != columns_.size())
            throw std::invalid_argument("CsvWriter: row width mismatch");
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ",";
            line += format_number(row[i]);
        }
        rows_.push_back(std::move(line));
    }

    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ",";
            out += columns_[i];
        }
        out += "\n";
        for (const auto& r : rows_) {
            out += r;
            out += "\n";
        }
        return out;
    }

    void write(const std::filesystem::path& path) const { atomic_write(path, str()); }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

// ---------------------------------------------------------------------------
// Wavepacket checkpoints: versioned binary dump for restart.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t checkpoint_magic = 0x50494348'4b303031ull; // "PICHK001"

inline void write_checkpoint(const std::filesystem::path& path, const ChannelWavepacket& wp)
{
    std::string blob;
    auto put = [&blob](const void* p, std::size_t n) {
        blob.append(static_cast<const char*>(p), n);
    };
    const std::uint64_t magic = checkpoint_magic;
    const std::uint64_t grid_hash = wp.grid.hash();
    const std::uint64_t n_points = wp.grid.n_points;
    const std::uint64_t n_channels = wp.channels.size();
    put(&magic, 8);
    put(&grid_hash, 8);
    put(&n_points, 8);
    put(&n_channels, 8);
    put(&wp.time, 8);
    put(&wp.grid.dr, 8);
    for (const auto& ch : wp.channels)
        put(ch.data(), ch.size() * sizeof(Complex));
    atomic_write(path, blob);
}

inline ChannelWavepacket read_checkpoint(const std::filesystem::path& path,
                                         const RadialGrid& grid)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    auto get = [&in, &path](void* p, std::size_t n) {
        if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
            throw std::runtime_error("truncated checkpoint: " + path.string());
    };
    std::uint64_t magic, grid_hash, n_points, n_channels;
    double time, dr;
    get(&magic, 8);
    if (magic != checkpoint_magic)
        throw std::runtime_error("not a checkpoint file (bad magic): " + path.string());
    get(&grid_hash, 8);
    get(&n_points, 8);
    get(&n_channels, 8);
    get(&time, 8);
    get(&dr, 8);
    if (grid_hash != grid.hash())
        throw std::runtime_error("checkpoint grid does not match the configured grid");
    if (n_points != grid.n_points)
        throw std::runtime_error("checkpoint size mismatch");
    ChannelWavepacket wp(grid, static_cast<int>(n_channels) - 1);
    wp.time = time;
    for (auto& ch : wp.channels)
        get(ch.data(), ch.size() * sizeof(Complex));
    return wp;
}

// ---------------------------------------------------------------------------
// Bound-state cache keyed by (grid, potential) hash: skips re-diagonalization
// between CLI runs on the same configuration.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t cache_magic = 0x50494341'43303031ull; // "PICAC001"

inline void write_bound_cache(const std::filesystem::path& path, std::uint64_t key,
                              const std::vector<BoundState>& states)
{
    std::string blob;
    auto put = [&blob](const void* p, std::size_t n) {
        blob.append(static_cast<const char*>(p), n);
    };
    const std::uint64_t magic = cache_magic;
    const std::uint64_t count = states.size();
    put(&magic, 8);
    put(&key, 8);
    put(&count, 8);
    for (const auto& s : states) {
        const std::int64_t n = s.n, l = s.l;
        const std::uint64_t len = s.u.size();
        put(&n, 8);
        put(&l, 8);
        put(&s.energy, 8);
        put(&len, 8);
        put(s.u.data(), s.u.size() * sizeof(double));
    }
    atomic_write(path, blob);
}

inline bool read_bound_cache(const std::filesystem::path& path, std::uint64_t key,
                             std::vector<BoundState>& states)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    auto get = [&in](void* p, std::size_t n) {
        return static_cast<bool>(in.read(static_cast<char*>(p),
                                         static_cast<std::streamsize>(n)));
    };
    std::uint64_t magic = 0, file_key = 0, count = 0;
    if (!get(&magic, 8) || magic != cache_magic) return false;
    if (!get(&file_key, 8) || file_key != key) return false;
    if (!get(&count, 8)) return false;
    std::vector<BoundState> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        BoundState s;
        std::int64_t n = 0, l = 0;
        std::uint64_t len = 0;
        if (!get(&n, 8) || !get(&l, 8) || !get(&s.energy, 8) || !get(&len, 8)) return false;
        s.n = static_cast<int>(n);
        s.l = static_cast<int>(l);
        s.u.resize(len);
        if (!get(s.u.data(), len * sizeof(double))) return false;
        out.push_back(std::move(s));
    }
    states = std::move(out);
    return true;
}

} // namespace photoion

#pragma once

#include "airis/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>

namespace airis::channel {

// 10^(pl0_db/10) * d^(-alpha). Throws DomainError for d <= 0.
double path_gain(double d, double alpha, double pl0_db);

// Rayleigh draw for every link: i.i.d. CN(0, path_gain) entries.
//
// Randomness comes from Philox4x64-10. G, f and h each have their own stream,
// keyed {seed, kStreamTag}, {seed, kStreamTag + 1} and {seed, kStreamTag + 2};
// block i uses counter {i,0,0,0} and every complex entry consumes two 64-bit
// words (Box-Muller). G is drawn row-major. With a fixed seed, h does not
// depend on N and f for N elements is a prefix of f for more elements.
ChannelSet generate(const Scenario& scn, std::uint64_t seed);

inline constexpr std::uint64_t kStreamTag = 0x4149525343483031ULL;  // "AIRSCH01"

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 over the channel-shaping fields of the scenario (N, M, node
// positions, path-loss exponents, pl0_db). Power and noise settings are
// excluded, so a stored draw can be reused across power sweeps.
Digest scenario_digest(const Scenario& scn);

struct FileHeader {
    std::uint32_t n_elements = 0;
    std::uint32_t m_antennas = 0;
    std::uint64_t seed = 0;
    Digest digest{};
};

inline constexpr std::array<char, 8> kMagic{'A', 'I', 'R', 'S', 'C', 'H', '0', '1'};

// Binary little-endian layout:
//   magic "AIRSCH01" | u32 N | u32 M | u64 seed | 32-byte digest |
//   f64 re/im interleaved: G row-major, then f, then h.
void save(const ChannelSet& ch, const Scenario& scn, std::uint64_t seed, const std::filesystem::path& path);

FileHeader read_header(const std::filesystem::path& path);

// Loads and checks the header against `scn` (dimensions, then digest).
ChannelSet load(const std::filesystem::path& path, const Scenario& scn);

}  // namespace airis::channel

#include "subdet/rng.hpp"

#include <cassert>
#include <cmath>

namespace subdet {

namespace {

// Philox-4x32 round constants (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3").
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
}

inline std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                                 std::uint64_t counter) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>(counter >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32),
    };
    std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
    }
    return ctr;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

void RngStream::refill() {
    block_ = philox_block(master_seed_, stream_id_, counter_);
    ++counter_;
    avail_ = 4;
}

std::uint32_t RngStream::next_u32() {
    if (avail_ == 0) {
        refill();
    }
    return block_[4 - avail_--];
}

double RngStream::uniform01() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;  // 53 bits
    return static_cast<double>(bits) * 0x1.0p-53;
}

std::size_t RngStream::index(std::size_t n) {
    assert(n > 0);
    auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return k < n ? k : n - 1;
}

std::complex<double> RngStream::complex_normal() {
    // Box-Muller; u1 shifted into (0, 1] so the log stays finite.
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const double u1 = (static_cast<double>((((hi << 32) | lo) >> 11)) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    // (z0 + i z1)/sqrt(2): unit total variance, split evenly.
    return {radius * std::cos(angle) * M_SQRT1_2, radius * std::sin(angle) * M_SQRT1_2};
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    const std::complex<double> z = complex_normal();
    spare_normal_ = z.imag() * M_SQRT2;
    has_spare_normal_ = true;
    return z.real() * M_SQRT2;
}

std::uint64_t make_stream_id(std::uint64_t purpose, std::uint64_t point, std::uint64_t trial) {
    assert(purpose < (1ull << 8) && point < (1ull << 24) && trial < (1ull << 32));
    return (purpose << 56) | (point << 32) | trial;
}

}  // namespace subdet

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace subdet {

/// Counter-based random stream (Philox-4x32-10).
///
/// Every draw is a pure function of (master_seed, stream_id, counter), so
/// disjoint stream ids can be consumed concurrently and any trial can be
/// replayed in isolation. Distinct (master_seed, stream_id) pairs give
/// statistically independent streams; the same triple always reproduces the
/// same output bit for bit.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint32_t next_u32();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    /// Uniform index on {0, ..., n-1}; n must be positive.
    std::size_t index(std::size_t n);

    /// Standard real normal N(0, 1).
    double normal();

    /// Circularly-symmetric complex normal with unit variance:
    /// real and imaginary parts independent N(0, 1/2).
    std::complex<double> complex_normal();

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

private:
    void refill();

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;  // Philox block counter
    std::array<std::uint32_t, 4> block_{};
    int avail_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

/// Stream-id layout used by the Monte Carlo engine. Each experiment kind gets
/// its own purpose tag so calibration, validation, curve, and sweep batches
/// never share counter ranges.
namespace stream_purpose {
inline constexpr std::uint64_t calibration = 1;
inline constexpr std::uint64_t pd = 2;
inline constexpr std::uint64_t pfa_sweep = 3;
inline constexpr std::uint64_t validation = 4;
}  // namespace stream_purpose

std::uint64_t make_stream_id(std::uint64_t purpose, std::uint64_t point, std::uint64_t trial);

}  // namespace subdet

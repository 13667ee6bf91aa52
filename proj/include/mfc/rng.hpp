#pragma once

#include <array>
#include <cstdint>

namespace mfc {

// Philox 4x32-10 block cipher; one call maps a 128-bit counter and 64-bit key
// to 128 pseudo-random bits, so draws are addressable by index rather than by
// generation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::uint64_t key);

// Inverse of the standard normal CDF (Wichura's PPND16), u in (0,1).
double inverse_normal_cdf(double u);

// Stream labels keep independent uses of one master seed disjoint.
enum class Stream : std::uint32_t {
    initial = 1,
    increments = 2,
    reference_initial = 3,
    reference_increments = 4,
    pilot = 5,
    subsample = 6,
    ball_sampler = 7,
    test = 8,
};

// Addressable uniform draw in the open interval (0,1).
double uniform01(std::uint64_t seed, Stream stream, std::uint64_t unit,
                 std::uint64_t step, std::uint32_t slot);

// Addressable standard normal draw.
double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t unit,
                       std::uint64_t step, std::uint32_t slot);

// Independent 64-bit sub-seed for a salted purpose (replica, experiment row).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mfc

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace arblab {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel Random
// Numbers: As Easy as 1, 2, 3"). Stateless block function: the stream for a
// Monte Carlo path is addressed by (seed, path index), so ensembles produce
// identical draws no matter how paths are scheduled across threads.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    // 10-round block function on a raw counter/key pair.
    static Block block(const Block& counter, const std::array<std::uint32_t, 2>& key) {
        Block ctr = counter;
        std::array<std::uint32_t, 2> k = key;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += 0x9E3779B9u;
                k[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0};
        }
        return ctr;
    }

    // Block `index` of this (seed, stream) substream: counter = (index, stream).
    Block block_at(std::uint64_t index) const {
        const Block ctr = {static_cast<std::uint32_t>(index),
                           static_cast<std::uint32_t>(index >> 32),
                           static_cast<std::uint32_t>(stream_),
                           static_cast<std::uint32_t>(stream_ >> 32)};
        return block(ctr, key_);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
};

// Sequential standard-normal draws from one Philox substream. Each 128-bit
// block yields two uniforms in (0,1), turned into two normals by Box-Muller.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : gen_(seed, stream) {}

    double next() {
        if (!have_spare_) {
            const auto b = gen_.block_at(block_index_++);
            const double u1 = to_unit_open(b[0], b[1]);
            const double u2 = to_unit_open(b[2], b[3]);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double theta = 2.0 * 3.14159265358979323846 * u2;
            spare_ = r * std::sin(theta);
            have_spare_ = true;
            return r * std::cos(theta);
        }
        have_spare_ = false;
        return spare_;
    }

private:
    // 53-bit mantissa uniform in the open interval (0,1); never returns 0,
    // so log(u1) stays finite.
    static double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32 gen_;
    std::uint64_t block_index_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace arblab

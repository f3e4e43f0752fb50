// Copyright 2026 The bellq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BELLQ_RNG_H
#define BELLQ_RNG_H

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bellq {

inline constexpr const char *kRngName = "philox4x32-10";

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by (seed, stream id); draws within a stream are
/// addressed by a 64-bit counter, so results never depend on thread layout.
class Philox {
   public:
    using result_type = uint64_t;

    Philox(uint64_t seed, uint64_t stream) : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {
        counter_[2] = static_cast<uint32_t>(stream);
        counter_[3] = static_cast<uint32_t>(stream >> 32);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

    result_type operator()() {
        if (avail_ < 2) {
            refill();
        }
        uint64_t lo = buffer_[4 - avail_];
        uint64_t hi = buffer_[5 - avail_];
        avail_ -= 2;
        return lo | (hi << 32);
    }

    uint32_t next_u32() {
        if (avail_ == 0) {
            refill();
        }
        return buffer_[4 - avail_--];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1].
    double uniform_open0() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        while (true) {
            uint64_t r = (*this)();
            if (r >= threshold) {
                return r % n;
            }
        }
    }

   private:
    void refill() {
        std::array<uint32_t, 4> ctr = counter_;
        std::array<uint32_t, 2> key = key_;
        for (int round = 0; round < 10; round++) {
            uint64_t p0 = uint64_t{0xD2511F53} * ctr[0];
            uint64_t p1 = uint64_t{0xCD9E8D57} * ctr[2];
            uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9;
            key[1] += 0xBB67AE85;
        }
        buffer_ = ctr;
        avail_ = 4;
        if (++counter_[0] == 0) {
            ++counter_[1];
        }
    }

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 4> counter_{};
    std::array<uint32_t, 4> buffer_{};
    int avail_ = 0;
};

/// 64-bit mix used to derive child seeds from (seed, index).
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// 64 independent Bernoulli(p) bits, using geometric skips for small p.
inline uint64_t bernoulli_word(Philox &rng, double p) {
    if (p <= 0) {
        return 0;
    }
    if (p >= 1) {
        return ~uint64_t{0};
    }
    uint64_t word = 0;
    if (p > 0.1) {
        uint64_t threshold = static_cast<uint64_t>(std::ldexp(p, 32));
        for (int b = 0; b < 64; b++) {
            if (rng.next_u32() < threshold) {
                word |= uint64_t{1} << b;
            }
        }
        return word;
    }
    double log_q = std::log1p(-p);
    int64_t pos = 0;
    while (true) {
        double skip = std::floor(std::log(rng.uniform_open0()) / log_q);
        if (skip >= 64 - pos) {
            break;
        }
        pos += static_cast<int64_t>(skip);
        word |= uint64_t{1} << pos;
        pos++;
        if (pos >= 64) {
            break;
        }
    }
    return word;
}

}  // namespace bellq

#endif

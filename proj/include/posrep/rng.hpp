#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace posrep {

/// Philox4x32-10 counter-based block function.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            if (r) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

/// Independent random stream for one sample, keyed by (seed, sample index,
/// stream id). No state is shared between samples, so any partition of the
/// index range across threads yields identical draws.
class SampleStream {
  public:
    SampleStream(std::uint64_t seed, std::uint64_t sample, std::uint32_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32), 0u, stream} {}

    std::uint64_t next_u64() {
        if (pos_ == 2) {
            block_ = Philox4x32::generate(ctr_, key_);
            ++ctr_[2];
            pos_ = 0;
        }
        std::uint64_t v = (std::uint64_t{block_[2 * pos_]} << 32) | block_[2 * pos_ + 1];
        ++pos_;
        return v;
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal, Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return rad * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter block_{};
    int pos_ = 2;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace posrep

#pragma once

// Philox4x64-10 counter-based generator (Salmon et al., Random123). Output is a
// pure function of (key, counter), so channel draws reproduce bit-exactly on
// any platform with IEEE-754 doubles.

#include <array>
#include <cstdint>

namespace airis {

class Philox4x64 {
public:
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static constexpr int kRounds = 10;

    static constexpr Counter block(Counter ctr, Key key) {
        for (int r = 0; r < kRounds; ++r) {
            if (r > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

private:
    __extension__ using u128 = unsigned __int128;

    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static constexpr void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        const u128 p = static_cast<u128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static constexpr Counter round(const Counter& c, const Key& k) {
        std::uint64_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// Sequential stream over Philox blocks: block i uses counter {i, 0, 0, 0}.
class PhiloxStream {
public:
    explicit PhiloxStream(Philox4x64::Key key) : key_(key) {}

    std::uint64_t next_u64() {
        if (lane_ == 4) {
            buf_ = Philox4x64::block({ctr_++, 0, 0, 0}, key_);
            lane_ = 0;
        }
        return buf_[lane_++];
    }

    // Uniform on (0, 1]: 53 random mantissa bits.
    double next_open01() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

private:
    Philox4x64::Key key_;
    Philox4x64::Counter buf_{};
    std::uint64_t ctr_ = 0;
    int lane_ = 4;
};

}  // namespace airis

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace veritab {

// Deterministic splitmix64 stream. std:: distributions are implementation
// defined, so every draw here is derived arithmetically from the raw 64-bit
// sequence; the same seed yields the same values on any platform.
class RngState {
public:
    explicit RngState(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased-enough integer in [0, n) via 128-bit multiply; n must be > 0.
    int next_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) * static_cast<uint64_t>(n)) >> 64);
    }

    // Child stream keyed by a tag; does not advance this stream.
    RngState fork(std::string_view tag) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        RngState child(state_ ^ h);
        child.next_u64();
        return child;
    }
    RngState fork(uint64_t tag) const {
        RngState child(state_ ^ (tag * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
        child.next_u64();
        return child;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_int(static_cast<int>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

}  // namespace veritab

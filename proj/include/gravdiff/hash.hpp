#pragma once

#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace gravdiff {

/// 64-bit FNV-1a. Used for input fingerprints and output-file hashes in run
/// manifests; not a cryptographic hash.
class Fnv1a {
public:
    Fnv1a& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv1a& update(double v) {
        char buf[sizeof(double)];
        std::memcpy(buf, &v, sizeof(double));
        return update(std::string_view(buf, sizeof(double)));
    }

    Fnv1a& update(std::span<const double> values) {
        for (double v : values) update(v);
        return *this;
    }

    std::uint64_t digest() const { return state_; }

    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t v = state_;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[v & 0xF];
            v >>= 4;
        }
        return out;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hash_values(std::initializer_list<double> values) {
    Fnv1a h;
    for (double v : values) h.update(v);
    return h.hex();
}

} // namespace gravdiff

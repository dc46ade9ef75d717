#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <stdexcept>

namespace rrindex {

using u8 = uint8_t;
using u32 = uint32_t;
using u64 = uint64_t;
using i64 = int64_t;

// splitmix64 finalizer; good avalanche, cheap, stable across platforms
inline u64 mix64(u64 x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// 128-bit structural fingerprint. Equality of fingerprints is treated as
// equality of derived structure; collisions are a modeling assumption.
struct Fp128 {
    u64 hi = 0, lo = 0;
    friend bool operator==(const Fp128& a, const Fp128& b) { return a.hi == b.hi && a.lo == b.lo; }
    friend bool operator!=(const Fp128& a, const Fp128& b) { return !(a == b); }
    friend bool operator<(const Fp128& a, const Fp128& b) {
        return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
    }
};

// Combine up to four 64-bit words into a 128-bit digest. Two independent
// mixing lanes seeded with distinct odd constants; each input word perturbs
// both lanes so single-word changes flip both halves.
inline Fp128 fp_mix(u64 tag, u64 a, u64 b = 0, u64 c = 0) {
    u64 h = 0x243f6a8885a308d3ull ^ mix64(tag);
    u64 l = 0x13198a2e03707344ull + mix64(tag ^ 0xa4093822299f31d0ull);
    h = mix64(h ^ a); l = mix64(l + (a ^ 0x082efa98ec4e6c89ull));
    h = mix64(h ^ b); l = mix64(l + (b ^ 0x452821e638d01377ull));
    h = mix64(h ^ c); l = mix64(l + (c ^ 0xbe5466cf34e90c6cull));
    return Fp128{mix64(h ^ l), mix64(l + (h << 1 | h >> 63))};
}

// Keyed PRF over a fingerprint; drives coin draws so identical structures
// redraw identical coins under one seed.
inline u64 prf64(u64 seed, const Fp128& fp) {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc908ull) ^ mix64(fp.hi) ^ mix64(fp.lo + seed));
}

// Thrown when a construction or update drives the derivation height past the
// probabilistic bound; callers retry with a fresh seed.
struct HeightBoundError : std::runtime_error {
    u32 height;
    u32 threshold;
    HeightBoundError(u32 h, u32 t)
        : std::runtime_error("derivation height " + std::to_string(h) +
                             " exceeds threshold " + std::to_string(t)),
          height(h), threshold(t) {}
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rrindex

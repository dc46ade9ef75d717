#include "rrindex/math.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace rrindex {

namespace {

// Little-endian base-2^32 unsigned integer, just enough for the threshold
// table: multiply by a small word and divide by a small word.
struct BigUint {
    std::vector<u32> limbs;

    explicit BigUint(u64 v) {
        limbs.push_back(static_cast<u32>(v));
        limbs.push_back(static_cast<u32>(v >> 32));
        trim();
    }

    void trim() {
        while (limbs.size() > 1 && limbs.back() == 0) limbs.pop_back();
    }

    void mul_small(u32 f) {
        u64 carry = 0;
        for (auto& limb : limbs) {
            u64 cur = static_cast<u64>(limb) * f + carry;
            limb = static_cast<u32>(cur);
            carry = cur >> 32;
        }
        while (carry) {
            limbs.push_back(static_cast<u32>(carry));
            carry >>= 32;
        }
    }

    // Floor-divide in place, discarding the remainder.
    void div_small(u32 d) {
        u64 rem = 0;
        for (size_t i = limbs.size(); i-- > 0;) {
            u64 cur = (rem << 32) | limbs[i];
            limbs[i] = static_cast<u32>(cur / d);
            rem = cur % d;
        }
        trim();
    }

    u64 to_u64_saturating() const {
        if (limbs.size() > 2) return ~0ull;
        u64 v = limbs[0];
        if (limbs.size() == 2) v |= static_cast<u64>(limbs[1]) << 32;
        return v;
    }
};

} // namespace

u64 mu_floor(u32 k) {
    // floor(8^k / 7^k) equals k nested floor-divisions by 7 of 8^k.
    static std::vector<u64> cache{1};
    if (k < cache.size()) return cache[k];
    for (u32 j = static_cast<u32>(cache.size()); j <= k; ++j) {
        BigUint v(1);
        for (u32 i = 0; i < j; ++i) v.mul_small(8);
        for (u32 i = 0; i < j; ++i) v.div_small(7);
        cache.push_back(v.to_u64_saturating());
    }
    return cache[k];
}

std::pair<u64, u64> mu_exact(u32 h) {
    assert(h >= 1);
    u32 j = (h + 1) / 2 - 1; // ceil(h/2) - 1
    assert(j <= 21);
    u64 num = 1, den = 1;
    for (u32 i = 0; i < j; ++i) { num *= 8; den *= 7; }
    return {num, den};
}

u32 height_threshold(u64 n, u32 w) {
    assert(n >= 1);
    long double log_ratio = std::log(4.0L * static_cast<long double>(n)) /
                            std::log(8.0L / 7.0L);
    long double v = 2.0L * (w + 1) * log_ratio + 2.0L;
    return static_cast<u32>(v);
}

u32 cache_budget(u32 alpha, u32 word_bits) {
    assert(word_bits >= 2);
    long double v = alpha + std::log2(static_cast<long double>(word_bits));
    return static_cast<u32>(std::ceil(v - 1e-12L));
}

} // namespace rrindex

#pragma once

#include <cstdint>
#include <utility>

#include "rrindex/common.hpp"

namespace rrindex {

// Exact integer threshold floor((8/7)^k), saturated to u64 max.
// Comparing val_len > floor((8/7)^k) is equivalent to val_len > (8/7)^k
// for integer val_len, so the merge-eligibility test never drifts at the
// boundary.
u64 mu_floor(u32 k);

// Threshold exponent used by a nonterminal of the given height: the node
// participates in round height+1, whose threshold is (8/7)^(height/2).
inline u32 mu_exponent_for_height(u32 height) { return height / 2; }

// Exact (numerator, denominator) = (8^j, 7^j) for the round-h threshold
// mu(h) with j = ceil(h/2) - 1. Only valid while 8^j fits in u64.
std::pair<u64, u64> mu_exact(u32 h);

// Maximum tolerated derivation height for a text of length n at failure
// exponent w: floor(2(w+1) log_{8/7}(4n) + 2).
u32 height_threshold(u64 n, u32 w);

// Ancestor-cache walk budget ceil(alpha + log2(B)).
u32 cache_budget(u32 alpha, u32 word_bits);

} // namespace rrindex

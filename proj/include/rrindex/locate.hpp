#pragma once

#include <string_view>
#include <vector>

#include "rrindex/index_state.hpp"

namespace rrindex {

struct LocateStats {
    u64 pieces = 0;        // popped pieces across both towers
    u64 splits = 0;        // grid query count
    u64 reported = 0;      // records returned by range reports
    u64 raw_positions = 0; // positions before the defensive dedup
    u32 rounds = 0;        // parse rounds of the pattern
};

// All 1-based starting positions of p in the indexed text, ascending and
// duplicate free. naive_vocc routes occurrence expansion through raw edges
// instead of the anchor caches.
std::vector<u64> locate(const Index& ix, std::string_view p,
                        LocateStats* stats = nullptr, bool naive_vocc = false);

// Candidate anchor splits of p, ascending; empty when p cannot parse against
// the grammar or is shorter than 2 bytes. Exposed for completeness audits.
std::vector<u64> pattern_splits(const Index& ix, std::string_view p);

} // namespace rrindex

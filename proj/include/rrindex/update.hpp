#pragma once

#include <string_view>

#include "rrindex/index_state.hpp"

namespace rrindex {

struct UpdateStats {
    u64 created_records = 0;
    u64 created_levels = 0;
    u64 removed_records = 0;
    u32 rounds = 0;     // derivation height after the edit
    bool rebuilt = false; // height bound hit, index rebuilt from bytes
};

// Splices content in front of position pos (1-based, pos in [1, n+1]).
// Only the seam of the derivation is re-derived; untouched subtrees are
// shared with the previous version.
void insert_text(Index& ix, u64 pos, std::string_view content,
                 UpdateStats* st = nullptr);

// Removes len characters starting at pos (1-based). At least two characters
// must remain.
void delete_text(Index& ix, u64 pos, u64 len, UpdateStats* st = nullptr);

} // namespace rrindex

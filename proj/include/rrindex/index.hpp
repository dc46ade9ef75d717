#pragma once

#include <string>

#include "rrindex/index_state.hpp"

namespace rrindex {

struct BuildOptions {
    u64 seed = 0;
    u32 w = 2;
    u32 budget_alpha = 0;
    u32 kappa = 8;
    u32 max_attempts = 8;
};

// Grammar construction plus grid finalization.
Index build_index(const std::string& text, const BuildOptions& opt = {});

// Full consistency sweep: derivation invariants, grid order and membership,
// coordinate keys, ancestor caches. Throws InvariantError naming the first
// violated invariant. Caches are recomputed in place while checking.
void verify_index(Index& ix);

struct IndexStats {
    u64 n = 0;
    u32 height = 0;
    u64 records = 0;      // explicit rules
    u64 impl_nodes = 0;   // implicit unary levels
    u64 grammar_size = 0; // records + impl_nodes
    u64 edges = 0;
    u64 grid_points = 0;
};

IndexStats index_stats(const Index& ix);

} // namespace rrindex

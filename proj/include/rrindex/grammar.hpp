#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrindex/dag.hpp"
#include "rrindex/index_state.hpp"

namespace rrindex {

// Run-length symbol sequence; adjacent runs always hold distinct symbols.
struct Run {
    NodeRef sym;
    u64 count = 0;
    friend bool operator==(const Run& a, const Run& b) {
        return a.sym == b.sym && a.count == b.count;
    }
};
using RunSeq = std::vector<Run>;

// Appends count copies of sym, merging with the trailing run.
void append_run(RunSeq& seq, NodeRef sym, u64 count);

// Appends a whole sequence, merging at the seam.
void append_seq(RunSeq& seq, const RunSeq& tail);

u64 flat_size(const RunSeq& seq);

// One derivation round over a window. Odd rounds collapse runs, even rounds
// pair a trailing 1-coin with a leading 0-coin across run boundaries.
RunSeq parse_round(Index& ix, u32 h, const RunSeq& in, CreationLog* log = nullptr);

// Same segmentation without creating rules; nullopt when some needed rule
// does not exist in the grammar.
std::optional<RunSeq> parse_round_find(const Index& ix, u32 h, const RunSeq& in);

// Leaf runs for a byte string (find-or-create / find-only).
RunSeq leaf_runs(Index& ix, std::string_view text, CreationLog* log = nullptr);
std::optional<RunSeq> leaf_runs_find(const Index& ix, std::string_view text);

// Full construction into an empty index. Uses ix.seed, ix.w; on a height
// bound failure retries with a reseeded derivation, up to max_attempts in
// total, and records the seed that succeeded. Grid, caches and coordinate
// keys are left to finalize_index.
void build_grammar(Index& ix, const std::string& text, u32 max_attempts = 8);

} // namespace rrindex

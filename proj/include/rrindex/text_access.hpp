#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rrindex/index_state.hpp"

namespace rrindex {

// One run of a virtual string: copies of val(node), reversed when rev.
struct RunSlice {
    NodeRef node;
    u64 copies = 1;
    bool rev = false;
};

// Streaming cursor over a concatenation of expansion runs. Every slice on
// the stack sits at a copy boundary; consuming bytes keeps it that way.
class VWalk {
public:
    explicit VWalk(const Index& ix) : m_ix(&ix) {}

    // Runs are consumed front to back, so push the last run first.
    void push(NodeRef node, u64 copies, bool rev = false);

    bool empty() const { return m_stack.empty(); }
    u64 remaining() const { return m_remaining; }
    const RunSlice& top() const { return m_stack.back(); }
    const Index& index() const { return *m_ix; }

    u8 next_byte();
    void skip(u64 n);

    // top becomes a single copy; the remainder stays below
    void split_top();
    // expands a single-copy top one level; top must not be height 0
    void descend_top();
    // drops k whole copies off the top, k <= top().copies
    void pop_copies(u64 k);

private:
    const Index* m_ix;
    std::vector<RunSlice> m_stack;
    u64 m_remaining = 0;
};

struct CmpResult {
    int order = 0; // sign of (a - b), strings compared lexicographically
    u64 lcp = 0;
};

// Three-way compare of two virtual strings. handle_skip lets equal nodes at
// equal copy boundaries match wholesale instead of byte by byte.
CmpResult compare_walks(VWalk& a, VWalk& b, bool handle_skip = true);

// Walk versus plain bytes; lcp == q.size() means q is a prefix of the walk.
CmpResult compare_walk_bytes(VWalk& a, std::string_view q);

// Whole-text cursor, optionally reversed. Empty index gives an empty walk.
VWalk text_walk(const Index& ix, bool rev = false);

// pos is 1-based; pos + len - 1 must stay within the text.
std::string extract(const Index& ix, u64 pos, u64 len);

// Longest common extension of the suffixes starting at i and j (1-based).
u64 lce(const Index& ix, u64 i, u64 j, bool handle_skip = true);
// Longest common extension, leftward, of the prefixes ending at i and j.
u64 rlce(const Index& ix, u64 i, u64 j, bool handle_skip = true);

// Coordinate strings of a record's split: X reads the left part reversed,
// Y reads the right part. Leaves put their byte on X and nothing on Y.
VWalk x_coord_walk(const Index& ix, u32 rec);
VWalk y_coord_walk(const Index& ix, u32 rec);

// First min(kappa, 8) bytes packed big-endian, zero padded. Key inequality
// decides lexicographic order; equality falls back to a full compare.
u64 packed_prefix(std::string_view s, u32 kappa);
u64 x_prefix_key(const Index& ix, u32 rec);
u64 y_prefix_key(const Index& ix, u32 rec);

// Total orders behind the grid: coordinate string, then record id.
bool x_less(const Index& ix, u32 a, u32 b);
bool y_less(const Index& ix, u32 a, u32 b);

// Computes prefix keys for every record and bulk-builds the grid. The
// grammar must be complete; caches are left alone.
void finalize_index(Index& ix);

// Places one new record's point by binary search over the existing orders.
void grid_insert_record(Index& ix, u32 rec);

} // namespace rrindex

#pragma once

#include <vector>

#include "rrindex/index_state.hpp"

namespace rrindex {

// Creations made on behalf of one edit, consumed by the repair passes.
struct CreationLog {
    std::vector<u32> recs;      // new records
    std::vector<NodeRef> impls; // new implicit levels
};

// Find-only lookups; null NodeRef when the rule does not exist.
NodeRef find_leaf(const Index& ix, u8 byte);
NodeRef find_pair(const Index& ix, NodeRef a, NodeRef b);
NodeRef find_power(const Index& ix, NodeRef x, u64 exp);
NodeRef find_single(const Index& ix, NodeRef x);

// Find-or-create. Creation draws a merge coin, wires child edges, and is
// appended to log when one is given. Grid points are attached separately.
NodeRef make_leaf(Index& ix, u8 byte, CreationLog* log = nullptr);
NodeRef make_pair(Index& ix, NodeRef a, NodeRef b, CreationLog* log = nullptr);
NodeRef make_power(Index& ix, NodeRef x, u64 exp, CreationLog* log = nullptr);
NodeRef make_single(Index& ix, NodeRef x, CreationLog* log = nullptr);

int assign_of(const Index& ix, NodeRef n);

// Re-registers a deserialized record: rule table entry, child edges,
// implicit level count. All record fields must already be populated.
void register_loaded(Index& ix, u32 rec);

// Collection edits. trim_top drops one unreferenced unary level;
// remove_record unlinks a fully unreferenced record, including its grid
// point when attached.
void trim_top(Index& ix, u32 rec);
void remove_record(Index& ix, u32 rec);

// Ancestor walk: nearest base that is either shared, the root, or past the
// crossing budget, plus the offset of rec's base inside it.
void recompute_cache(Index& ix, u32 rec);

// 1-based derivation-tree occurrences of a record's base, ascending.
// The fast route goes through the stored anchors, the naive route walks raw
// edges only.
std::vector<u64> vocc_fast(const Index& ix, u32 rec);
std::vector<u64> vocc_naive(const Index& ix, u32 rec);

// Structural invariant sweep over records, rules, and edges; throws
// InvariantError naming the violated invariant.
void verify_structure(const Index& ix);

} // namespace rrindex

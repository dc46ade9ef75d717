#pragma once

#include <map>
#include <vector>

#include "rrindex/common.hpp"
#include "rrindex/grid.hpp"
#include "rrindex/rule_table.hpp"
#include "rrindex/slab.hpp"

namespace rrindex {

enum class RuleTag : u8 { Leaf = 0, Pair = 1, Power = 2 };

// A node is a record plus how many unary steps it sits above the record's
// base. up == 0 is the base itself; higher levels are the implicit chain.
struct NodeRef {
    static constexpr u32 kNullRec = 0xffffffffu;

    u32 rec = kNullRec;
    u32 up = 0;

    bool null() const { return rec == kNullRec; }
    u64 pack() const { return (static_cast<u64>(rec) << 32) | up; }
    static NodeRef unpack(u64 v) {
        return {static_cast<u32>(v >> 32), static_cast<u32>(v)};
    }
    friend bool operator==(const NodeRef& a, const NodeRef& b) {
        return a.rec == b.rec && a.up == b.up;
    }
    friend bool operator!=(const NodeRef& a, const NodeRef& b) { return !(a == b); }
};

// Child slot codes stored on incoming edges.
enum : u8 { kSlotPairLeft = 0, kSlotPairRight = 1, kSlotPower = 2 };

// Merge coin per level: 0 / 1 are coin values, 2 means the expansion was too
// long for its height and the symbol never merges.
enum : u8 { kAssignFrozen = 2 };

// One maximal unary chain: a base rule plus the stack of unary wrappers
// above it. Every level shares the base's expansion and value length.
struct PathRecord {
    RuleTag tag = RuleTag::Leaf;
    u8 byte = 0;                    // Leaf payload
    NodeRef left, right;            // Pair children; Power child in left
    u64 exp = 0;                    // Power exponent, >= 2
    u64 val_len = 1;
    u32 base_height = 0;
    u32 path_len = 1;               // levels: base plus path_len-1 unary steps
    std::vector<u8> assign;         // one code per level
    std::map<u64, u8> edges;        // (level << 32 | src rec) -> child slot
    u64 total_in = 0;               // incoming multiplicity, all levels
    Fp128 fp;                       // base fingerprint
    u32 cache_anchor = NodeRef::kNullRec; // record whose base covers this one
    u64 cache_shift = 0;            // offset of this base inside the anchor
    u64 x_prefix = 0, y_prefix = 0; // kappa-byte big-endian coordinate keys
    u32 x_handle = GridStore::kNil;
    u32 y_handle = GridStore::kNil;

    int assign_at(u32 level) const {
        u8 c = assign[level];
        return c == kAssignFrozen ? -1 : c;
    }
    NodeRef top(u32 rec_id) const { return {rec_id, path_len - 1}; }
    // highest level some other rule points at, or -1 when unreferenced
    i64 max_edge_level() const {
        return edges.empty() ? -1 : static_cast<i64>(edges.rbegin()->first >> 32);
    }
};

// Structural fingerprints, stable across seeds and rebuilds.
inline Fp128 fp_leaf(u8 c) { return fp_mix(1, c); }
inline Fp128 fp_pair(const Fp128& a, const Fp128& b) {
    Fp128 t = fp_mix(2, a.hi, a.lo, b.hi);
    return fp_mix(2, t.hi, t.lo, b.lo);
}
inline Fp128 fp_single(const Fp128& a) { return fp_mix(3, a.hi, a.lo); }
inline Fp128 fp_power(const Fp128& a, u64 d) { return fp_mix(4, a.hi, a.lo, d); }

struct Index {
    Slab<PathRecord> recs;
    RuleTable rules;
    GridStore grid;
    u64 text_len = 0;
    u64 seed = 0;
    u32 w = 2;           // failure exponent in the height bound
    u32 budget_alpha = 0; // additive term of the ancestor walk budget
    u32 kappa = 8;        // coordinate prefix bytes, <= 8
    u32 start_rec = NodeRef::kNullRec;
    u64 impl_count = 0;   // implicit unary nodes, sum of path_len-1
    u64 edge_count = 0;

    bool empty() const { return start_rec == NodeRef::kNullRec; }
    NodeRef root() const { return recs[start_rec].top(start_rec); }
    u32 tree_height() const {
        const PathRecord& r = recs[start_rec];
        return r.base_height + r.path_len - 1;
    }
    u32 height_of(NodeRef n) const { return recs[n.rec].base_height + n.up; }
    u64 len_of(NodeRef n) const { return recs[n.rec].val_len; }

    Fp128 fp_of(NodeRef n) const {
        Fp128 f = recs[n.rec].fp;
        for (u32 i = 0; i < n.up; ++i) f = fp_single(f);
        return f;
    }

    void clear() {
        recs.clear();
        rules.clear();
        grid.clear();
        text_len = 0;
        start_rec = NodeRef::kNullRec;
        impl_count = 0;
        edge_count = 0;
    }
};

} // namespace rrindex

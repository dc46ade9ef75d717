#include "rrindex/dag.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "rrindex/math.hpp"

namespace rrindex {

namespace {

NodeRef null_ref() { return NodeRef{}; }

u8 draw_assign(const Index& ix, u32 height, u64 val_len, const Fp128& fp) {
    if (val_len > mu_floor(mu_exponent_for_height(height))) return kAssignFrozen;
    return static_cast<u8>(prf64(ix.seed, fp) & 1);
}

u64 edge_key(u32 dst_up, u32 src_rec) {
    return (static_cast<u64>(dst_up) << 32) | src_rec;
}

void add_edge(Index& ix, u32 src_rec, u8 slot, NodeRef dst, u64 mult) {
    auto [it, fresh] = ix.recs[dst.rec].edges.emplace(edge_key(dst.up, src_rec), slot);
    (void)it;
    if (!fresh) throw InvariantError("duplicate inter-path edge");
    ix.recs[dst.rec].total_in += mult;
    ++ix.edge_count;
}

void drop_edge(Index& ix, u32 src_rec, NodeRef dst, u64 mult) {
    PathRecord& r = ix.recs[dst.rec];
    if (r.edges.erase(edge_key(dst.up, src_rec)) != 1)
        throw InvariantError("dropping absent inter-path edge");
    assert(r.total_in >= mult);
    r.total_in -= mult;
    --ix.edge_count;
}

RuleKey key_of(const PathRecord& r) {
    switch (r.tag) {
    case RuleTag::Leaf: return RuleKey{0, r.byte, 0};
    case RuleTag::Pair: return RuleKey{1, r.left.pack(), r.right.pack()};
    case RuleTag::Power: return RuleKey{2, r.left.pack(), r.exp};
    }
    return RuleKey{};
}

} // namespace

NodeRef find_leaf(const Index& ix, u8 byte) {
    u32 rec = ix.rules.find(RuleKey{0, byte, 0});
    return rec == RuleTable::kMissing ? null_ref() : NodeRef{rec, 0};
}

NodeRef find_pair(const Index& ix, NodeRef a, NodeRef b) {
    u32 rec = ix.rules.find(RuleKey{1, a.pack(), b.pack()});
    return rec == RuleTable::kMissing ? null_ref() : NodeRef{rec, 0};
}

NodeRef find_power(const Index& ix, NodeRef x, u64 exp) {
    u32 rec = ix.rules.find(RuleKey{2, x.pack(), exp});
    return rec == RuleTable::kMissing ? null_ref() : NodeRef{rec, 0};
}

NodeRef find_single(const Index& ix, NodeRef x) {
    const PathRecord& r = ix.recs[x.rec];
    if (x.up + 1 < r.path_len) return NodeRef{x.rec, x.up + 1};
    return null_ref();
}

NodeRef make_leaf(Index& ix, u8 byte, CreationLog* log) {
    NodeRef found = find_leaf(ix, byte);
    if (!found.null()) return found;
    PathRecord r;
    r.tag = RuleTag::Leaf;
    r.byte = byte;
    r.val_len = 1;
    r.base_height = 0;
    r.fp = fp_leaf(byte);
    r.assign.push_back(draw_assign(ix, 0, 1, r.fp));
    u32 rec = ix.recs.alloc();
    ix.recs[rec] = std::move(r);
    ix.rules.insert(RuleKey{0, byte, 0}, rec);
    if (log) log->recs.push_back(rec);
    return NodeRef{rec, 0};
}

NodeRef make_pair(Index& ix, NodeRef a, NodeRef b, CreationLog* log) {
    NodeRef found = find_pair(ix, a, b);
    if (!found.null()) return found;
    assert(ix.height_of(a) == ix.height_of(b));
    PathRecord r;
    r.tag = RuleTag::Pair;
    r.left = a;
    r.right = b;
    r.val_len = ix.len_of(a) + ix.len_of(b);
    r.base_height = ix.height_of(a) + 1;
    r.fp = fp_pair(ix.fp_of(a), ix.fp_of(b));
    r.assign.push_back(draw_assign(ix, r.base_height, r.val_len, r.fp));
    u32 rec = ix.recs.alloc();
    ix.recs[rec] = std::move(r);
    ix.rules.insert(RuleKey{1, a.pack(), b.pack()}, rec);
    add_edge(ix, rec, kSlotPairLeft, a, 1);
    add_edge(ix, rec, kSlotPairRight, b, 1);
    if (log) log->recs.push_back(rec);
    return NodeRef{rec, 0};
}

NodeRef make_power(Index& ix, NodeRef x, u64 exp, CreationLog* log) {
    assert(exp >= 2);
    NodeRef found = find_power(ix, x, exp);
    if (!found.null()) return found;
    PathRecord r;
    r.tag = RuleTag::Power;
    r.left = x;
    r.exp = exp;
    r.val_len = ix.len_of(x) * exp;
    r.base_height = ix.height_of(x) + 1;
    r.fp = fp_power(ix.fp_of(x), exp);
    r.assign.push_back(draw_assign(ix, r.base_height, r.val_len, r.fp));
    u32 rec = ix.recs.alloc();
    ix.recs[rec] = std::move(r);
    ix.rules.insert(RuleKey{2, x.pack(), exp}, rec);
    add_edge(ix, rec, kSlotPower, x, exp);
    if (log) log->recs.push_back(rec);
    return NodeRef{rec, 0};
}

NodeRef make_single(Index& ix, NodeRef x, CreationLog* log) {
    PathRecord& r = ix.recs[x.rec];
    if (x.up + 1 < r.path_len) return NodeRef{x.rec, x.up + 1};
    assert(x.up + 1 == r.path_len);
    Fp128 f = fp_single(ix.fp_of(x));
    u8 code = draw_assign(ix, r.base_height + r.path_len, r.val_len, f);
    r.assign.push_back(code);
    ++r.path_len;
    ++ix.impl_count;
    NodeRef top{x.rec, r.path_len - 1};
    if (log) log->impls.push_back(top);
    return top;
}

int assign_of(const Index& ix, NodeRef n) {
    return ix.recs[n.rec].assign_at(n.up);
}

void register_loaded(Index& ix, u32 rec) {
    PathRecord& r = ix.recs[rec];
    ix.rules.insert(key_of(r), rec);
    switch (r.tag) {
    case RuleTag::Leaf:
        break;
    case RuleTag::Pair:
        add_edge(ix, rec, kSlotPairLeft, r.left, 1);
        add_edge(ix, rec, kSlotPairRight, r.right, 1);
        break;
    case RuleTag::Power:
        add_edge(ix, rec, kSlotPower, r.left, r.exp);
        break;
    }
    ix.impl_count += r.path_len - 1;
}

void trim_top(Index& ix, u32 rec) {
    PathRecord& r = ix.recs[rec];
    assert(r.path_len >= 2);
    assert(r.max_edge_level() < static_cast<i64>(r.path_len) - 1);
    r.assign.pop_back();
    --r.path_len;
    --ix.impl_count;
}

void remove_record(Index& ix, u32 rec) {
    PathRecord& r = ix.recs[rec];
    if (!r.edges.empty()) throw InvariantError("removing referenced record");
    ix.rules.erase(key_of(r));
    switch (r.tag) {
    case RuleTag::Leaf:
        break;
    case RuleTag::Pair:
        drop_edge(ix, rec, r.left, 1);
        drop_edge(ix, rec, r.right, 1);
        break;
    case RuleTag::Power:
        drop_edge(ix, rec, r.left, r.exp);
        break;
    }
    if (r.x_handle != GridStore::kNil) ix.grid.erase(r.x_handle, r.y_handle);
    ix.impl_count -= r.path_len - 1;
    ix.recs.free(rec);
}

void recompute_cache(Index& ix, u32 rec) {
    u32 budget = cache_budget(ix.budget_alpha, 64);
    u32 a = rec;
    u64 shift = 0;
    for (u32 crossings = 0; crossings < budget; ++crossings) {
        const PathRecord& ra = ix.recs[a];
        if (ra.total_in != 1) break; // shared, or the root path
        auto [key, slot] = *ra.edges.begin();
        u32 src = static_cast<u32>(key);
        if (slot == kSlotPairRight) shift += ix.len_of(ix.recs[src].left);
        a = src;
    }
    ix.recs[rec].cache_anchor = a;
    ix.recs[rec].cache_shift = shift;
}

namespace {

// shared scaffolding of the two vocc routes: expand every edge of `from`,
// pulling source occurrence lists through `recur`
template <typename F>
void expand_edges(const Index& ix, u32 from, u64 shift, std::vector<u64>& out, F&& recur) {
    const PathRecord& r = ix.recs[from];
    for (const auto& [key, slot] : r.edges) {
        u32 src = static_cast<u32>(key);
        const std::vector<u64>& qs = recur(src);
        switch (slot) {
        case kSlotPairLeft:
            for (u64 q : qs) out.push_back(q + shift);
            break;
        case kSlotPairRight: {
            u64 lab = ix.len_of(ix.recs[src].left);
            for (u64 q : qs) out.push_back(q + lab + shift);
            break;
        }
        default: {
            u64 l = r.val_len;
            u64 d = ix.recs[src].exp;
            for (u64 j = 0; j < d; ++j)
                for (u64 q : qs) out.push_back(q + j * l + shift);
            break;
        }
        }
    }
}

const std::vector<u64>& vocc_naive_rec(const Index& ix, u32 rec,
                                       std::map<u32, std::vector<u64>>& memo) {
    auto it = memo.find(rec);
    if (it != memo.end()) return it->second;
    std::vector<u64> out;
    if (rec == ix.start_rec) out.push_back(1);
    expand_edges(ix, rec, 0, out,
                 [&](u32 src) -> const std::vector<u64>& { return vocc_naive_rec(ix, src, memo); });
    std::sort(out.begin(), out.end());
    return memo.emplace(rec, std::move(out)).first->second;
}

const std::vector<u64>& vocc_fast_rec(const Index& ix, u32 rec,
                                      std::map<u32, std::vector<u64>>& memo) {
    auto it = memo.find(rec);
    if (it != memo.end()) return it->second;
    u32 a = ix.recs[rec].cache_anchor;
    u64 shift = ix.recs[rec].cache_shift;
    std::vector<u64> out;
    if (ix.recs[a].edges.empty()) {
        if (a != ix.start_rec) throw InvariantError("unreferenced non-root record");
        out.push_back(shift + 1);
    } else {
        expand_edges(ix, a, shift, out,
                     [&](u32 src) -> const std::vector<u64>& { return vocc_fast_rec(ix, src, memo); });
    }
    std::sort(out.begin(), out.end());
    return memo.emplace(rec, std::move(out)).first->second;
}

} // namespace

std::vector<u64> vocc_fast(const Index& ix, u32 rec) {
    std::map<u32, std::vector<u64>> memo;
    return vocc_fast_rec(ix, rec, memo);
}

std::vector<u64> vocc_naive(const Index& ix, u32 rec) {
    std::map<u32, std::vector<u64>> memo;
    return vocc_naive_rec(ix, rec, memo);
}

void verify_structure(const Index& ix) {
    u64 impls = 0, edges = 0;
    ix.recs.for_each([&](u32 rec) {
        const PathRecord& r = ix.recs[rec];
        if (r.path_len == 0 || r.assign.size() != r.path_len)
            throw InvariantError("record level bookkeeping");
        impls += r.path_len - 1;
        edges += r.edges.size();
        if (ix.rules.find(key_of(r)) != rec)
            throw InvariantError("rule table does not resolve record");
        Fp128 expect;
        switch (r.tag) {
        case RuleTag::Leaf:
            if (r.val_len != 1 || r.base_height != 0)
                throw InvariantError("leaf shape");
            expect = fp_leaf(r.byte);
            break;
        case RuleTag::Pair:
            if (!ix.recs.live(r.left.rec) || !ix.recs.live(r.right.rec))
                throw InvariantError("pair child dead");
            if (ix.height_of(r.left) != r.base_height - 1 ||
                ix.height_of(r.right) != r.base_height - 1)
                throw InvariantError("pair child heights");
            if (r.val_len != ix.len_of(r.left) + ix.len_of(r.right))
                throw InvariantError("pair length");
            if (r.left == r.right) throw InvariantError("pair of equal nodes");
            expect = fp_pair(ix.fp_of(r.left), ix.fp_of(r.right));
            break;
        case RuleTag::Power:
            if (!ix.recs.live(r.left.rec)) throw InvariantError("power child dead");
            if (r.exp < 2) throw InvariantError("power exponent");
            if (ix.height_of(r.left) != r.base_height - 1)
                throw InvariantError("power child height");
            if (r.val_len != ix.len_of(r.left) * r.exp)
                throw InvariantError("power length");
            expect = fp_power(ix.fp_of(r.left), r.exp);
            break;
        }
        if (expect != r.fp) throw InvariantError("stale fingerprint");
        // merge coins: frozen exactly when the expansion is too long
        for (u32 lv = 0; lv < r.path_len; ++lv) {
            bool frozen = r.assign[lv] == kAssignFrozen;
            bool too_long =
                r.val_len > mu_floor(mu_exponent_for_height(r.base_height + lv));
            if (frozen != too_long) throw InvariantError("coin freezing");
        }
        // incoming edges must match the source rules exactly
        u64 total = 0;
        for (const auto& [key, slot] : r.edges) {
            u32 up = static_cast<u32>(key >> 32);
            u32 src = static_cast<u32>(key);
            if (up >= r.path_len) throw InvariantError("edge above path top");
            if (!ix.recs.live(src)) throw InvariantError("edge from dead record");
            const PathRecord& s = ix.recs[src];
            NodeRef here{rec, up};
            switch (slot) {
            case kSlotPairLeft:
                if (s.tag != RuleTag::Pair || s.left != here)
                    throw InvariantError("left edge mismatch");
                total += 1;
                break;
            case kSlotPairRight:
                if (s.tag != RuleTag::Pair || s.right != here)
                    throw InvariantError("right edge mismatch");
                total += 1;
                break;
            case kSlotPower:
                if (s.tag != RuleTag::Power || s.left != here)
                    throw InvariantError("power edge mismatch");
                total += s.exp;
                break;
            default:
                throw InvariantError("edge slot code");
            }
        }
        if (total != r.total_in) throw InvariantError("incoming multiplicity");
        // reverse direction: children must hold an edge from this record
        auto expect_edge = [&](NodeRef child, u8 slot) {
            const PathRecord& c = ix.recs[child.rec];
            auto it = c.edges.find((static_cast<u64>(child.up) << 32) | rec);
            if (it == c.edges.end() || it->second != slot)
                throw InvariantError("missing reverse edge");
        };
        if (r.tag == RuleTag::Pair) {
            expect_edge(r.left, kSlotPairLeft);
            expect_edge(r.right, kSlotPairRight);
        } else if (r.tag == RuleTag::Power) {
            expect_edge(r.left, kSlotPower);
        }
    });
    if (impls != ix.impl_count) throw InvariantError("implicit node count");
    if (edges != ix.edge_count) throw InvariantError("edge count");
    if (ix.rules.size() != ix.recs.size()) throw InvariantError("rule count");
    if (!ix.empty()) {
        const PathRecord& s = ix.recs[ix.start_rec];
        if (!s.edges.empty()) throw InvariantError("root path has parents");
        if (s.val_len != ix.text_len) throw InvariantError("root length");
        // every other record must be referenced, with its top referenced too
        ix.recs.for_each([&](u32 rec) {
            const PathRecord& r = ix.recs[rec];
            if (rec == ix.start_rec) return;
            if (r.edges.empty()) throw InvariantError("orphan record");
            if (r.max_edge_level() != static_cast<i64>(r.path_len) - 1)
                throw InvariantError("unreferenced path top");
        });
    }
}

} // namespace rrindex

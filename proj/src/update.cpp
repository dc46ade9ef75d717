#include "rrindex/update.hpp"

#include <cassert>
#include <string>
#include <unordered_set>
#include <vector>

#include "rrindex/dag.hpp"
#include "rrindex/grammar.hpp"
#include "rrindex/math.hpp"
#include "rrindex/text_access.hpp"

namespace rrindex {

namespace {

// Whole subtrees of the old derivation flanking the edit, grouped by level.
// Within a level the runs are in text order; on the left flank higher
// levels lie farther left, on the right flank farther right.
struct SideRuns {
    std::vector<RunSeq> at;

    void add(u32 level, NodeRef sym, u64 count) {
        if (at.size() <= level) at.resize(level + 1);
        append_run(at[level], sym, count);
    }
    RunSeq take(u32 level) {
        if (level >= at.size()) return {};
        RunSeq out = std::move(at[level]);
        at[level].clear();
        return out;
    }
    i64 lowest_above(u32 h) const {
        for (u64 j = h + 1; j < at.size(); ++j)
            if (!at[j].empty()) return static_cast<i64>(j);
        return -1;
    }
};

// Subtrees covering T[1..g], collected along the walk to the gap after g.
SideRuns left_flank(const Index& ix, u64 g) {
    SideRuns out;
    if (g == 0) return out;
    NodeRef cur = ix.root();
    u64 p = g; // gap sits after offset p inside cur
    for (;;) {
        assert(p >= 1 && p <= ix.len_of(cur));
        if (p == ix.len_of(cur)) {
            out.add(ix.height_of(cur), cur, 1);
            return out;
        }
        if (cur.up > 0) {
            --cur.up;
            continue;
        }
        const PathRecord& r = ix.recs[cur.rec];
        assert(r.tag != RuleTag::Leaf);
        if (r.tag == RuleTag::Pair) {
            u64 ll = ix.len_of(r.left);
            if (p <= ll) {
                cur = r.left;
            } else {
                out.add(ix.height_of(r.left), r.left, 1);
                cur = r.right;
                p -= ll;
            }
        } else {
            u64 unit = ix.len_of(r.left);
            u64 i = (p + unit - 1) / unit; // copy containing offset p
            if (i > 1) out.add(ix.height_of(r.left), r.left, i - 1);
            p -= (i - 1) * unit;
            cur = r.left;
        }
    }
}

// Subtrees covering T[g+1..n], mirrored walk.
SideRuns right_flank(const Index& ix, u64 g) {
    SideRuns out;
    if (g >= ix.text_len) return out;
    NodeRef cur = ix.root();
    u64 p = g; // chars of cur strictly left of the gap
    for (;;) {
        assert(p < ix.len_of(cur));
        if (p == 0) {
            out.add(ix.height_of(cur), cur, 1);
            return out;
        }
        if (cur.up > 0) {
            --cur.up;
            continue;
        }
        const PathRecord& r = ix.recs[cur.rec];
        assert(r.tag != RuleTag::Leaf);
        if (r.tag == RuleTag::Pair) {
            u64 ll = ix.len_of(r.left);
            if (p >= ll) {
                cur = r.right;
                p -= ll;
            } else {
                out.add(ix.height_of(r.right), r.right, 1);
                cur = r.left;
            }
        } else {
            u64 unit = ix.len_of(r.left);
            u64 i = p / unit;
            u64 rem = p - i * unit;
            if (rem == 0) {
                out.add(ix.height_of(r.left), r.left, r.exp - i);
                return out;
            }
            if (r.exp - i - 1 > 0) out.add(ix.height_of(r.left), r.left, r.exp - i - 1);
            cur = r.left;
            p = rem;
        }
    }
}

NodeRef edge_down_right(const Index& ix, NodeRef n, u32 h) {
    while (ix.height_of(n) > h) {
        if (n.up > 0) {
            --n.up;
            continue;
        }
        const PathRecord& r = ix.recs[n.rec];
        n = r.tag == RuleTag::Pair ? r.right : r.left;
    }
    return n;
}

NodeRef edge_down_left(const Index& ix, NodeRef n, u32 h) {
    while (ix.height_of(n) > h) {
        if (n.up > 0) {
            --n.up;
            continue;
        }
        n = ix.recs[n.rec].left;
    }
    return n;
}

RunSeq children_of(const Index& ix, NodeRef n) {
    RunSeq out;
    if (n.up > 0) {
        append_run(out, NodeRef{n.rec, n.up - 1}, 1);
        return out;
    }
    const PathRecord& r = ix.recs[n.rec];
    assert(r.tag != RuleTag::Leaf);
    if (r.tag == RuleTag::Pair) {
        append_run(out, r.left, 1);
        append_run(out, r.right, 1);
    } else {
        append_run(out, r.left, r.exp);
    }
    return out;
}

// Would round hh join a with the symbol b directly to its right? Merging is
// context free: a trailing 1-coin pairs with a leading 0-coin on even
// rounds, equal unfrozen symbols share a run on odd rounds.
bool would_merge(const Index& ix, u32 hh, NodeRef a, NodeRef b) {
    if (a.null() || b.null()) return false;
    if (hh & 1) return a == b && assign_of(ix, a) != -1;
    return assign_of(ix, a) == 1 && assign_of(ix, b) == 0;
}

// Seam reparse state: the window w holds level-h symbols of the new text
// between the two flanks.
struct Splice {
    Index& ix;
    SideRuns left, right;
    RunSeq w;
    CreationLog log;
    u32 h = 0;
};

NodeRef peek_from_right(const Splice& s) {
    i64 j = s.right.lowest_above(s.h);
    if (j < 0) return {};
    return edge_down_left(s.ix, s.right.at[j].front().sym, s.h);
}

NodeRef peek_from_left(const Splice& s) {
    i64 j = s.left.lowest_above(s.h);
    if (j < 0) return {};
    return edge_down_right(s.ix, s.left.at[j].back().sym, s.h);
}

// While the flank symbol adjacent to the window would merge across the
// seam, pull one copy of it down a level so the window reparses it. Flank
// symbols adjacent to each other never merge: the old derivation would
// already have merged them.
void cascade_left(Splice& s) {
    for (;;) {
        i64 j = s.left.lowest_above(s.h);
        if (j < 0) return;
        RunSeq& d = s.left.at[j];
        NodeRef top = d.back().sym;
        NodeRef y = edge_down_right(s.ix, top, s.h);
        NodeRef nb = s.w.empty() ? peek_from_right(s) : s.w.front().sym;
        if (!would_merge(s.ix, s.h + 1, y, nb)) return;
        if (--d.back().count == 0) d.pop_back();
        RunSeq kids = children_of(s.ix, top);
        if (j - 1 == s.h) {
            append_seq(kids, s.w);
            s.w = std::move(kids);
        } else {
            append_seq(kids, s.left.at[j - 1]);
            s.left.at[j - 1] = std::move(kids);
        }
    }
}

void cascade_right(Splice& s) {
    for (;;) {
        i64 j = s.right.lowest_above(s.h);
        if (j < 0) return;
        RunSeq& d = s.right.at[j];
        NodeRef top = d.front().sym;
        NodeRef y = edge_down_left(s.ix, top, s.h);
        NodeRef nb = s.w.empty() ? peek_from_left(s) : s.w.back().sym;
        if (!would_merge(s.ix, s.h + 1, nb, y)) return;
        if (--d.front().count == 0) d.erase(d.begin());
        RunSeq kids = children_of(s.ix, top);
        if (j - 1 == s.h) {
            append_seq(s.w, kids);
        } else {
            RunSeq merged = std::move(s.right.at[j - 1]);
            append_seq(merged, kids);
            s.right.at[j - 1] = std::move(merged);
        }
    }
}

// Re-derives the seam of T' = T[1..gl] ++ mid ++ T[gr+1..n]. Purely
// additive; the old derivation stays intact until collection.
NodeRef splice_parse(Index& ix, u64 gl, std::string_view mid, u64 gr,
                     u64 new_len, CreationLog& log, u32& rounds) {
    Splice s{ix, left_flank(ix, gl), right_flank(ix, gr), {}, {}, 0};
    s.w = s.left.take(0);
    append_seq(s.w, leaf_runs(ix, mid, &s.log));
    append_seq(s.w, s.right.take(0));
    u32 limit = height_threshold(new_len, ix.w);
    for (;;) {
        cascade_left(s);
        cascade_right(s);
        if (s.left.lowest_above(s.h) < 0 && s.right.lowest_above(s.h) < 0 &&
            s.w.size() == 1 && s.w[0].count == 1)
            break;
        s.w = parse_round(ix, s.h + 1, s.w, &s.log);
        ++s.h;
        if (s.h > limit) {
            log = std::move(s.log);
            throw HeightBoundError(s.h, limit);
        }
        {
            RunSeq pre = s.left.take(s.h);
            append_seq(pre, s.w);
            s.w = std::move(pre);
        }
        append_seq(s.w, s.right.take(s.h));
    }
    log = std::move(s.log);
    // a fresh derivation stops at the first single-symbol level, so unary
    // wraps accumulated above the last merge are not part of the new tree
    NodeRef root{s.w[0].sym.rec, 0};
    assert(ix.len_of(root) == new_len);
    rounds = ix.height_of(root);
    return root;
}

void child_recs(const PathRecord& r, std::vector<u32>& out) {
    switch (r.tag) {
    case RuleTag::Leaf:
        break;
    case RuleTag::Pair:
        out.push_back(r.left.rec);
        out.push_back(r.right.rec);
        break;
    case RuleTag::Power:
        out.push_back(r.left.rec);
        break;
    }
}

struct Collected {
    std::vector<u32> removed;
    std::unordered_set<u32> orphan_side; // survivors that lost an edge
};

// Installs the new root, then releases the parts of the old derivation the
// new one no longer references. Unreferenced unary tops are trimmed down to
// the first referenced level; the new root is never trimmed below its own
// level.
void commit_root(Index& ix, NodeRef root, u64 new_len, Collected& col) {
    u32 old_start = ix.start_rec;
    ix.start_rec = root.rec;
    ix.text_len = new_len;
    std::vector<u32> work{old_start};
    while (!work.empty()) {
        u32 rec = work.back();
        work.pop_back();
        if (!ix.recs.live(rec)) continue;
        PathRecord& r = ix.recs[rec];
        u32 floor_len = rec == ix.start_rec ? root.up + 1 : 1;
        while (r.path_len > floor_len &&
               r.max_edge_level() < static_cast<i64>(r.path_len) - 1)
            trim_top(ix, rec);
        if (rec == ix.start_rec || r.total_in != 0) continue;
        std::vector<u32> kids;
        child_recs(r, kids);
        remove_record(ix, rec);
        col.removed.push_back(rec);
        for (u32 k : kids) {
            col.orphan_side.insert(k);
            work.push_back(k);
        }
    }
    assert(ix.recs[ix.start_rec].path_len == root.up + 1);
}

// New records get grid points and coordinate keys; caches are recomputed
// for every record whose ancestor walk can cross a changed edge.
void repair(Index& ix, const CreationLog& log, const Collected& col) {
    for (u32 rec : log.recs) {
        assert(ix.recs.live(rec));
        grid_insert_record(ix, rec);
    }
    std::unordered_set<u32> dirty;
    std::vector<u32> frontier;
    auto mark = [&](u32 rec) {
        if (ix.recs.live(rec) && dirty.insert(rec).second) frontier.push_back(rec);
    };
    std::vector<u32> kids;
    for (u32 rec : log.recs) {
        mark(rec);
        kids.clear();
        child_recs(ix.recs[rec], kids);
        for (u32 k : kids) mark(k);
    }
    for (u32 rec : col.orphan_side)
        if (ix.recs.live(rec)) mark(rec);
    u32 budget = cache_budget(ix.budget_alpha, 64);
    for (u32 depth = 0; depth < budget && !frontier.empty(); ++depth) {
        std::vector<u32> next;
        for (u32 rec : frontier) {
            kids.clear();
            child_recs(ix.recs[rec], kids);
            for (u32 k : kids)
                if (dirty.insert(k).second) next.push_back(k);
        }
        frontier = std::move(next);
    }
    for (u32 rec : dirty) recompute_cache(ix, rec);
}

// Extract-and-rebuild fallback for a failed seam reparse. Phase 1 never
// touches old nodes, so the old text is still readable.
void rebuild_spliced(Index& ix, u64 gl, std::string_view mid, u64 gr) {
    u64 n = ix.text_len;
    std::string t;
    if (gl > 0) t += extract(ix, 1, gl);
    t += mid;
    if (gr < n) t += extract(ix, gr + 1, n - gr);
    u64 seed = mix64(ix.seed ^ 0x6a09e667f3bcc909ull);
    u32 w = ix.w, alpha = ix.budget_alpha, kappa = ix.kappa;
    ix.clear();
    ix.seed = seed;
    ix.w = w;
    ix.budget_alpha = alpha;
    ix.kappa = kappa;
    build_grammar(ix, t);
    finalize_index(ix);
}

void apply_splice(Index& ix, u64 gl, std::string_view mid, u64 gr,
                  UpdateStats* st) {
    u64 new_len = gl + mid.size() + (ix.text_len - gr);
    CreationLog log;
    NodeRef root;
    u32 rounds = 0;
    try {
        root = splice_parse(ix, gl, mid, gr, new_len, log, rounds);
    } catch (const HeightBoundError&) {
        rebuild_spliced(ix, gl, mid, gr);
        if (st) {
            st->rebuilt = true;
            st->rounds = ix.tree_height();
        }
        return;
    }
    Collected col;
    commit_root(ix, root, new_len, col);
    repair(ix, log, col);
    if (st) {
        st->created_records = log.recs.size();
        st->created_levels = log.impls.size();
        st->removed_records = col.removed.size();
        st->rounds = rounds;
    }
}

} // namespace

void insert_text(Index& ix, u64 pos, std::string_view content, UpdateStats* st) {
    if (ix.empty()) throw DataError("update on an empty index");
    u64 n = ix.text_len;
    if (pos < 1 || pos > n + 1) throw DataError("insert position out of range");
    if (content.empty()) return;
    apply_splice(ix, pos - 1, content, pos - 1, st);
}

void delete_text(Index& ix, u64 pos, u64 len, UpdateStats* st) {
    if (ix.empty()) throw DataError("update on an empty index");
    u64 n = ix.text_len;
    if (pos < 1 || pos > n || len > n - pos + 1)
        throw DataError("delete range out of range");
    if (len == 0) return;
    if (n - len < 2) throw DataError("n must be >= 2");
    apply_splice(ix, pos - 1, {}, pos - 1 + len, st);
}

} // namespace rrindex

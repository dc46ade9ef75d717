#include "rrindex/locate.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "rrindex/dag.hpp"
#include "rrindex/grammar.hpp"
#include "rrindex/text_access.hpp"

namespace rrindex {

namespace {

// The pattern's private parse with boundary pops. Pieces come off the left
// tower bottom-up and the right tower top-down; a run pops whole on run
// rounds, one copy on pair rounds.
struct PopResult {
    std::vector<Run> pieces;
    u32 rounds = 0;
};

std::optional<PopResult> pop_pattern(const Index& ix, std::string_view p) {
    std::optional<RunSeq> leaves = leaf_runs_find(ix, p);
    if (!leaves) return std::nullopt;
    RunSeq s = std::move(*leaves);
    std::vector<Run> left, right;
    u32 h = 0;
    while (!s.empty()) {
        ++h;
        if (h & 1) {
            // a boundary run only differs from the text parse when it can
            // keep growing there, which frozen symbols never do
            if (assign_of(ix, s.front().sym) != -1) {
                left.push_back(s.front());
                s.erase(s.begin());
            }
            if (!s.empty() && assign_of(ix, s.back().sym) != -1) {
                right.push_back(s.back());
                s.pop_back();
            }
        } else {
            // pairs form exactly at (1, 0) coin adjacencies, so only a
            // leading 0 or a trailing 1 can merge out of the pattern
            if (assign_of(ix, s.front().sym) == 0) {
                left.push_back({s.front().sym, 1});
                if (--s.front().count == 0) s.erase(s.begin());
            }
            if (!s.empty() && assign_of(ix, s.back().sym) == 1) {
                right.push_back({s.back().sym, 1});
                if (--s.back().count == 0) s.pop_back();
            }
        }
        if (s.empty()) break;
        std::optional<RunSeq> next = parse_round_find(ix, h, s);
        if (!next) return std::nullopt;
        s = std::move(*next);
    }
    PopResult out;
    out.rounds = h;
    out.pieces = std::move(left);
    out.pieces.insert(out.pieces.end(), right.rbegin(), right.rend());
    return out;
}

// Candidate prefix lengths where an occurrence can cross its anchor: the
// junctions between pieces, plus the first copy boundary when the pattern
// opens with a run (deeper alignments ride the exponent enumeration).
std::vector<u64> split_positions(const Index& ix, const std::vector<Run>& q,
                                 u64 m) {
    std::vector<u64> out;
    u64 acc = 0;
    for (size_t i = 0; i < q.size(); ++i) {
        u64 unit = ix.len_of(q[i].sym);
        if (i == 0 && q[i].count >= 2 && unit <= m - 1) out.push_back(unit);
        acc += q[i].count * unit;
        if (acc >= 1 && acc <= m - 1) out.push_back(acc);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// -1: coordinate sorts before q; 0: q is a prefix of it; 1: it sorts after.
int classify(const Index& ix, u32 rec, std::string_view q, bool x_side) {
    u32 trunc = static_cast<u32>(std::min({q.size(), size_t{ix.kappa}, size_t{8}}));
    if (trunc > 0) {
        u32 drop = 8 * (8 - trunc);
        u64 qk = packed_prefix(q, 8) >> drop;
        u64 rk = (x_side ? ix.recs[rec].x_prefix : ix.recs[rec].y_prefix) >> drop;
        if (qk != rk) return rk < qk ? -1 : 1;
    }
    VWalk w = x_side ? x_coord_walk(ix, rec) : y_coord_walk(ix, rec);
    CmpResult c = compare_walk_bytes(w, q);
    if (c.lcp == q.size()) return 0;
    return c.order;
}

// First rank in the chosen order whose classification reaches bound.
size_t lower_rank(const Index& ix, std::string_view q, bool x_side, int bound) {
    size_t lo = 0, hi = ix.grid.size();
    while (lo < hi) {
        size_t mid = lo + (hi - lo) / 2;
        u32 rec = x_side ? ix.grid.rec_at_x(mid) : ix.grid.rec_at_y(mid);
        if (classify(ix, rec, q, x_side) < bound) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

} // namespace

std::vector<u64> pattern_splits(const Index& ix, std::string_view p) {
    if (ix.empty() || p.size() < 2) return {};
    std::optional<PopResult> popped = pop_pattern(ix, p);
    if (!popped) return {};
    return split_positions(ix, popped->pieces, p.size());
}

std::vector<u64> locate(const Index& ix, std::string_view p, LocateStats* stats,
                        bool naive_vocc) {
    std::vector<u64> out;
    if (ix.empty() || p.empty() || p.size() > ix.text_len) return out;
    auto vocc = [&](u32 rec) {
        return naive_vocc ? rrindex::vocc_naive(ix, rec) : vocc_fast(ix, rec);
    };

    if (p.size() == 1) {
        NodeRef leaf = find_leaf(ix, static_cast<u8>(p[0]));
        if (leaf.null()) return out;
        out = vocc(leaf.rec);
        if (stats) stats->raw_positions = out.size();
        return out;
    }

    std::optional<PopResult> popped = pop_pattern(ix, p);
    if (!popped) return out;
    const u64 m = p.size();
    if (stats) {
        stats->pieces = popped->pieces.size();
        stats->rounds = popped->rounds;
    }

    // one whole symbol: every occurrence is an occurrence of that node
    if (popped->pieces.size() == 1 && popped->pieces[0].count == 1) {
        out = vocc(popped->pieces[0].sym.rec);
        if (stats) stats->raw_positions = out.size();
        return out;
    }

    std::string prev(p.rbegin(), p.rend());
    std::vector<u64> splits = split_positions(ix, popped->pieces, m);
    if (stats) stats->splits = splits.size();
    for (u64 l : splits) {
        std::string_view qx(prev.data() + (m - l), l); // reversed P[1..l]
        std::string_view qy(p.data() + l, m - l);      // P[l+1..m]
        size_t xa = lower_rank(ix, qx, true, 0);
        size_t xb = lower_rank(ix, qx, true, 1);
        if (xa >= xb) continue;
        size_t ya = lower_rank(ix, qy, false, 0);
        size_t yb = lower_rank(ix, qy, false, 1);
        if (ya >= yb) continue;
        std::vector<u32> hits;
        ix.grid.report(xa, xb - 1, ya, yb - 1, hits);
        if (stats) stats->reported += hits.size();
        for (u32 rc : hits) {
            const PathRecord& r = ix.recs[rc];
            if (r.tag == RuleTag::Leaf) continue;
            std::vector<u64> occ = vocc(rc);
            if (r.tag == RuleTag::Pair) {
                u64 b = ix.len_of(r.left);
                for (u64 w : occ) out.push_back(w + b - l);
            } else {
                u64 unit = ix.len_of(r.left);
                u64 jmax = (r.val_len - (m - l)) / unit;
                for (u64 j = 1; j <= jmax; ++j)
                    for (u64 w : occ) out.push_back(w + j * unit - l);
            }
        }
    }
    if (stats) stats->raw_positions = out.size();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace rrindex

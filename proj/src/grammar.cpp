#include "rrindex/grammar.hpp"

#include <cassert>

#include "rrindex/math.hpp"

namespace rrindex {

void append_run(RunSeq& seq, NodeRef sym, u64 count) {
    if (count == 0) return;
    if (!seq.empty() && seq.back().sym == sym) {
        seq.back().count += count;
        return;
    }
    seq.push_back(Run{sym, count});
}

void append_seq(RunSeq& seq, const RunSeq& tail) {
    for (const Run& r : tail) append_run(seq, r.sym, r.count);
}

u64 flat_size(const RunSeq& seq) {
    u64 n = 0;
    for (const Run& r : seq) n += r.count;
    return n;
}

namespace {

// rule factories for the two parse modes
struct CreateOps {
    Index& ix;
    CreationLog* log;
    NodeRef leaf(u8 b) { return make_leaf(ix, b, log); }
    NodeRef pair(NodeRef a, NodeRef b) { return make_pair(ix, a, b, log); }
    NodeRef power(NodeRef x, u64 d) { return make_power(ix, x, d, log); }
    NodeRef single(NodeRef x) { return make_single(ix, x, log); }
    int coin(NodeRef x) const { return assign_of(ix, x); }
};

struct FindOps {
    const Index& ix;
    NodeRef leaf(u8 b) const { return find_leaf(ix, b); }
    NodeRef pair(NodeRef a, NodeRef b) const { return find_pair(ix, a, b); }
    NodeRef power(NodeRef x, u64 d) const { return find_power(ix, x, d); }
    NodeRef single(NodeRef x) const { return find_single(ix, x); }
    int coin(NodeRef x) const { return assign_of(ix, x); }
};

// returns false when a find-mode lookup missed
template <typename Ops>
bool parse_round_impl(Ops&& ops, u32 h, const RunSeq& in, RunSeq& out) {
    out.clear();
    auto emit = [&](NodeRef sym, u64 count) {
        if (sym.null()) return false;
        append_run(out, sym, count);
        return true;
    };
    if (h % 2 == 1) {
        for (const Run& r : in) {
            if (ops.coin(r.sym) != -1) {
                NodeRef s = r.count >= 2 ? ops.power(r.sym, r.count) : ops.single(r.sym);
                if (!emit(s, 1)) return false;
            } else {
                if (!emit(ops.single(r.sym), r.count)) return false;
            }
        }
        return true;
    }
    // even round: only the last copy of a run can open a pair, and only the
    // first copy of the next run can close one
    u64 borrowed = 0; // leading copies of in[i] consumed by a pair
    for (size_t i = 0; i < in.size(); ++i) {
        NodeRef x = in[i].sym;
        u64 c = in[i].count - borrowed;
        borrowed = 0;
        if (c == 0) continue;
        if (c > 1 && !emit(ops.single(x), c - 1)) return false;
        if (ops.coin(x) == 1 && i + 1 < in.size() && ops.coin(in[i + 1].sym) == 0) {
            if (!emit(ops.pair(x, in[i + 1].sym), 1)) return false;
            borrowed = 1;
        } else {
            if (!emit(ops.single(x), 1)) return false;
        }
    }
    return true;
}

template <typename Ops>
bool leaf_runs_impl(Ops&& ops, std::string_view text, RunSeq& out) {
    out.clear();
    size_t i = 0;
    while (i < text.size()) {
        size_t j = i;
        while (j < text.size() && text[j] == text[i]) ++j;
        NodeRef leaf = ops.leaf(static_cast<u8>(text[i]));
        if (leaf.null()) return false;
        append_run(out, leaf, j - i);
        i = j;
    }
    return true;
}

} // namespace

RunSeq parse_round(Index& ix, u32 h, const RunSeq& in, CreationLog* log) {
    RunSeq out;
    parse_round_impl(CreateOps{ix, log}, h, in, out);
    return out;
}

std::optional<RunSeq> parse_round_find(const Index& ix, u32 h, const RunSeq& in) {
    RunSeq out;
    if (!parse_round_impl(FindOps{ix}, h, in, out)) return std::nullopt;
    return out;
}

RunSeq leaf_runs(Index& ix, std::string_view text, CreationLog* log) {
    RunSeq out;
    leaf_runs_impl(CreateOps{ix, log}, text, out);
    return out;
}

std::optional<RunSeq> leaf_runs_find(const Index& ix, std::string_view text) {
    RunSeq out;
    if (!leaf_runs_impl(FindOps{ix}, text, out)) return std::nullopt;
    return out;
}

void build_grammar(Index& ix, const std::string& text, u32 max_attempts) {
    if (text.size() < 2) throw DataError("n must be >= 2");
    assert(max_attempts >= 1);
    u64 base = ix.seed;
    for (u32 attempt = 0;; ++attempt) {
        ix.clear();
        ix.seed = attempt == 0 ? base : mix64(base ^ (0x9e3779b97f4a7c15ull * attempt));
        try {
            ix.text_len = text.size();
            u32 limit = height_threshold(text.size(), ix.w);
            RunSeq cur = leaf_runs(ix, text);
            u32 h = 0;
            while (!(cur.size() == 1 && cur[0].count == 1)) {
                ++h;
                if (h > limit) throw HeightBoundError(h, limit);
                cur = parse_round(ix, h, cur);
            }
            NodeRef root = cur[0].sym;
            assert(root.up == ix.recs[root.rec].path_len - 1);
            ix.start_rec = root.rec;
            ix.recs.for_each([&](u32 rec) { recompute_cache(ix, rec); });
            return;
        } catch (const HeightBoundError&) {
            if (attempt + 1 >= max_attempts) throw;
        }
    }
}

} // namespace rrindex

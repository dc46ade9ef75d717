#include "rrindex/oracle.hpp"

#include <cassert>

#include "rrindex/math.hpp"

namespace rrindex::oracle {

std::vector<u64> naive_occ(const std::string& text, const std::string& pat) {
    std::vector<u64> scan;
    if (!pat.empty() && pat.size() <= text.size()) {
        for (size_t i = 0; i + pat.size() <= text.size(); ++i) {
            bool hit = true;
            for (size_t j = 0; j < pat.size(); ++j)
                if (text[i + j] != pat[j]) { hit = false; break; }
            if (hit) scan.push_back(i + 1);
        }
    }
    std::vector<u64> find;
    if (!pat.empty()) {
        for (size_t at = text.find(pat); at != std::string::npos;
             at = text.find(pat, at + 1))
            find.push_back(at + 1);
    }
    if (scan != find) throw InvariantError("oracle: occurrence scans disagree");
    return scan;
}

namespace {

// suffix automaton, only used to count distinct substrings per length
struct Sam {
    struct State {
        u32 len = 0;
        i64 link = -1;
        std::map<u8, u32> next;
    };
    std::vector<State> st;
    u32 last = 0;

    explicit Sam(const std::string& s) {
        st.reserve(2 * s.size() + 2);
        st.emplace_back();
        for (char c : s) extend(static_cast<u8>(c));
    }

    void extend(u8 c) {
        u32 cur = static_cast<u32>(st.size());
        st.emplace_back();
        st[cur].len = st[last].len + 1;
        i64 p = last;
        while (p != -1 && !st[p].next.count(c)) {
            st[p].next[c] = cur;
            p = st[p].link;
        }
        if (p == -1) {
            st[cur].link = 0;
        } else {
            u32 q = st[p].next[c];
            if (st[q].len == st[p].len + 1) {
                st[cur].link = q;
            } else {
                u32 clone = static_cast<u32>(st.size());
                st.push_back(st[q]);
                st[clone].len = st[p].len + 1;
                while (p != -1 && st[p].next[c] == q) {
                    st[p].next[c] = clone;
                    p = st[p].link;
                }
                st[q].link = clone;
                st[cur].link = clone;
            }
        }
        last = cur;
    }
};

} // namespace

double naive_delta(const std::string& text) {
    if (text.empty()) return 0.0;
    Sam sam(text);
    // state v covers one distinct substring per length in (len(link), len(v)]
    std::vector<i64> diff(text.size() + 2, 0);
    for (size_t v = 1; v < sam.st.size(); ++v) {
        u32 lo = sam.st[sam.st[v].link].len + 1;
        u32 hi = sam.st[v].len;
        ++diff[lo];
        --diff[hi + 1];
    }
    double best = 0.0;
    i64 cur = 0;
    for (size_t k = 1; k <= text.size(); ++k) {
        cur += diff[k];
        best = std::max(best, static_cast<double>(cur) / static_cast<double>(k));
    }
    return best;
}

SimGrammar sim_build(const std::string& text, u64 seed, u32 w) {
    assert(text.size() >= 2);
    SimGrammar g;
    std::map<std::tuple<u8, u64, u64>, u32> dedup;

    auto make = [&](u8 tag, u64 a, u64 b, u32 height) -> u32 {
        auto key = std::make_tuple(tag, a, b);
        auto it = dedup.find(key);
        if (it != dedup.end()) return it->second;
        SimGrammar::Rule r;
        r.tag = tag;
        r.height = height;
        switch (tag) {
        case 0:
            r.byte = static_cast<u8>(a);
            r.val_len = 1;
            r.fp = fp_leaf(r.byte);
            break;
        case 1:
            r.a = static_cast<u32>(a);
            r.b = static_cast<u32>(b);
            r.val_len = g.rules[r.a].val_len + g.rules[r.b].val_len;
            r.fp = fp_pair(g.rules[r.a].fp, g.rules[r.b].fp);
            break;
        case 2:
            r.a = static_cast<u32>(a);
            r.exp = b;
            r.val_len = g.rules[r.a].val_len * b;
            r.fp = fp_power(g.rules[r.a].fp, b);
            break;
        default:
            r.a = static_cast<u32>(a);
            r.val_len = g.rules[r.a].val_len;
            r.fp = fp_single(g.rules[r.a].fp);
            break;
        }
        if (r.val_len > mu_floor(mu_exponent_for_height(height)))
            r.assign = -1;
        else
            r.assign = static_cast<int>(prf64(seed, r.fp) & 1);
        u32 id = static_cast<u32>(g.rules.size());
        g.rules.push_back(r);
        dedup.emplace(key, id);
        return id;
    };

    std::vector<u32> cur;
    cur.reserve(text.size());
    for (char c : text) cur.push_back(make(0, static_cast<u8>(c), 0, 0));
    g.rounds.push_back(cur);

    u32 limit = height_threshold(text.size(), w);
    u32 h = 0;
    while (cur.size() > 1) {
        ++h;
        if (h > limit) throw HeightBoundError(h, limit);
        std::vector<u32> out;
        size_t s = 0;
        while (s < cur.size()) {
            u32 x = cur[s];
            if (h % 2 == 0 && g.rules[x].assign == 1 && s + 1 < cur.size() &&
                g.rules[cur[s + 1]].assign == 0) {
                out.push_back(make(1, x, cur[s + 1], h));
                s += 2;
            } else if (h % 2 == 1 && g.rules[x].assign != -1) {
                size_t l = 1;
                while (s + l < cur.size() && cur[s + l] == x) ++l;
                out.push_back(l >= 2 ? make(2, x, l, h) : make(3, x, 0, h));
                s += l;
            } else {
                out.push_back(make(3, x, 0, h));
                s += 1;
            }
        }
        cur = std::move(out);
        g.rounds.push_back(cur);
    }
    g.start = cur[0];
    return g;
}

void expand_into(const Index& ix, NodeRef n, std::string& out) {
    const PathRecord& r = ix.recs[n.rec];
    switch (r.tag) {
    case RuleTag::Leaf:
        out.push_back(static_cast<char>(r.byte));
        break;
    case RuleTag::Pair:
        expand_into(ix, r.left, out);
        expand_into(ix, r.right, out);
        break;
    case RuleTag::Power: {
        size_t mark = out.size();
        expand_into(ix, r.left, out);
        size_t l = out.size() - mark;
        for (u64 j = 1; j < r.exp; ++j) out.append(out, mark, l);
        break;
    }
    }
}

std::string expand(const Index& ix, NodeRef n) {
    std::string out;
    out.reserve(ix.len_of(n));
    expand_into(ix, n, out);
    return out;
}

std::map<u64, std::vector<u64>> all_vocc(const Index& ix) {
    std::map<u64, std::vector<u64>> out;
    std::vector<std::pair<NodeRef, u64>> stack{{ix.root(), 1}};
    while (!stack.empty()) {
        auto [n, pos] = stack.back();
        stack.pop_back();
        out[n.pack()].push_back(pos);
        if (n.up > 0) {
            stack.push_back({{n.rec, n.up - 1}, pos});
            continue;
        }
        const PathRecord& r = ix.recs[n.rec];
        switch (r.tag) {
        case RuleTag::Leaf:
            break;
        case RuleTag::Pair:
            stack.push_back({r.left, pos});
            stack.push_back({r.right, pos + ix.len_of(r.left)});
            break;
        case RuleTag::Power: {
            u64 l = ix.len_of(r.left);
            for (u64 j = 0; j < r.exp; ++j) stack.push_back({r.left, pos + j * l});
            break;
        }
        }
    }
    for (auto& [k, v] : out) std::sort(v.begin(), v.end());
    return out;
}

std::string splice_insert(const std::string& t, u64 pos1, const std::string& p) {
    assert(pos1 >= 1 && pos1 <= t.size() + 1);
    std::string out = t;
    out.insert(pos1 - 1, p);
    return out;
}

std::string splice_delete(const std::string& t, u64 pos1, u64 len) {
    assert(pos1 >= 1 && pos1 + len - 1 <= t.size());
    std::string out = t;
    out.erase(pos1 - 1, len);
    return out;
}

} // namespace rrindex::oracle

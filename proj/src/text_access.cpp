#include "rrindex/text_access.hpp"

#include <algorithm>
#include <cassert>

namespace rrindex {

void VWalk::push(NodeRef node, u64 copies, bool rev) {
    if (copies == 0) return;
    m_stack.push_back({node, copies, rev});
    m_remaining += copies * m_ix->len_of(node);
}

void VWalk::split_top() {
    RunSlice& t = m_stack.back();
    if (t.copies == 1) return;
    t.copies -= 1;
    m_stack.push_back({t.node, 1, t.rev});
}

void VWalk::descend_top() {
    RunSlice t = m_stack.back();
    assert(t.copies == 1);
    m_stack.pop_back();
    if (t.node.up > 0) {
        m_stack.push_back({{t.node.rec, t.node.up - 1}, 1, t.rev});
        return;
    }
    const PathRecord& r = (*m_ix).recs[t.node.rec];
    switch (r.tag) {
        case RuleTag::Pair:
            if (t.rev) {
                m_stack.push_back({r.left, 1, true});
                m_stack.push_back({r.right, 1, true});
            } else {
                m_stack.push_back({r.right, 1, false});
                m_stack.push_back({r.left, 1, false});
            }
            break;
        case RuleTag::Power:
            m_stack.push_back({r.left, r.exp, t.rev});
            break;
        case RuleTag::Leaf:
            assert(false && "descend on a height-0 node");
            break;
    }
}

void VWalk::pop_copies(u64 k) {
    RunSlice& t = m_stack.back();
    assert(k <= t.copies);
    m_remaining -= k * m_ix->len_of(t.node);
    if (k == t.copies) {
        m_stack.pop_back();
    } else {
        t.copies -= k;
    }
}

u8 VWalk::next_byte() {
    assert(!m_stack.empty());
    for (;;) {
        RunSlice& t = m_stack.back();
        const PathRecord& r = (*m_ix).recs[t.node.rec];
        if (t.node.up == 0 && r.tag == RuleTag::Leaf) {
            u8 c = r.byte;
            pop_copies(1);
            return c;
        }
        split_top();
        descend_top();
    }
}

void VWalk::skip(u64 n) {
    assert(n <= m_remaining);
    while (n > 0) {
        RunSlice& t = m_stack.back();
        u64 unit = m_ix->len_of(t.node);
        u64 whole = t.copies * unit;
        if (n >= whole) {
            n -= whole;
            pop_copies(t.copies);
            continue;
        }
        u64 k = n / unit;
        if (k > 0) {
            pop_copies(k);
            n -= k * unit;
            if (n == 0) break;
        }
        split_top();
        descend_top();
    }
}

CmpResult compare_walks(VWalk& a, VWalk& b, bool handle_skip) {
    const Index& ix = a.index();
    u64 lcp = 0;
    for (;;) {
        if (a.empty() || b.empty()) {
            int ord = (a.empty() ? 0 : 1) - (b.empty() ? 0 : 1);
            return {ord, lcp};
        }
        const RunSlice& ta = a.top();
        const RunSlice& tb = b.top();
        if (handle_skip && ta.node == tb.node && ta.rev == tb.rev) {
            u64 k = std::min(ta.copies, tb.copies);
            lcp += k * ix.len_of(ta.node);
            a.pop_copies(k);
            b.pop_copies(k);
            continue;
        }
        u32 ha = ix.height_of(ta.node);
        u32 hb = ix.height_of(tb.node);
        if (ha == 0 && hb == 0) {
            u8 ca = ix.recs[ta.node.rec].byte;
            u8 cb = ix.recs[tb.node.rec].byte;
            if (ca != cb) return {ca < cb ? -1 : 1, lcp};
            u64 k = std::min(ta.copies, tb.copies);
            lcp += k;
            a.pop_copies(k);
            b.pop_copies(k);
            continue;
        }
        if (ha >= hb) {
            a.split_top();
            a.descend_top();
        } else {
            b.split_top();
            b.descend_top();
        }
    }
}

CmpResult compare_walk_bytes(VWalk& a, std::string_view q) {
    u64 lcp = 0;
    size_t i = 0;
    while (i < q.size() && !a.empty()) {
        u8 c = a.next_byte();
        u8 d = static_cast<u8>(q[i]);
        if (c != d) return {c < d ? -1 : 1, lcp};
        ++lcp;
        ++i;
    }
    if (i < q.size()) return {-1, lcp};
    if (!a.empty()) return {1, lcp};
    return {0, lcp};
}

VWalk text_walk(const Index& ix, bool rev) {
    VWalk w(ix);
    if (!ix.empty()) w.push(ix.root(), 1, rev);
    return w;
}

std::string extract(const Index& ix, u64 pos, u64 len) {
    if (len == 0) return {};
    if (pos < 1 || pos > ix.text_len || len > ix.text_len - pos + 1)
        throw DataError("extract range out of bounds");
    VWalk w = text_walk(ix);
    w.skip(pos - 1);
    std::string out;
    out.reserve(len);
    for (u64 k = 0; k < len; ++k) out.push_back(static_cast<char>(w.next_byte()));
    return out;
}

u64 lce(const Index& ix, u64 i, u64 j, bool handle_skip) {
    if (i < 1 || j < 1 || i > ix.text_len || j > ix.text_len)
        throw DataError("lce position out of bounds");
    VWalk a = text_walk(ix);
    VWalk b = text_walk(ix);
    a.skip(i - 1);
    b.skip(j - 1);
    return compare_walks(a, b, handle_skip).lcp;
}

u64 rlce(const Index& ix, u64 i, u64 j, bool handle_skip) {
    if (i < 1 || j < 1 || i > ix.text_len || j > ix.text_len)
        throw DataError("rlce position out of bounds");
    VWalk a = text_walk(ix, true);
    VWalk b = text_walk(ix, true);
    a.skip(ix.text_len - i);
    b.skip(ix.text_len - j);
    return compare_walks(a, b, handle_skip).lcp;
}

VWalk x_coord_walk(const Index& ix, u32 rec) {
    VWalk w(ix);
    const PathRecord& r = ix.recs[rec];
    switch (r.tag) {
        case RuleTag::Leaf: w.push({rec, 0}, 1, true); break;
        case RuleTag::Pair: w.push(r.left, 1, true); break;
        case RuleTag::Power: w.push(r.left, 1, true); break;
    }
    return w;
}

VWalk y_coord_walk(const Index& ix, u32 rec) {
    VWalk w(ix);
    const PathRecord& r = ix.recs[rec];
    switch (r.tag) {
        case RuleTag::Leaf: break;
        case RuleTag::Pair: w.push(r.right, 1, false); break;
        case RuleTag::Power: w.push(r.left, r.exp - 1, false); break;
    }
    return w;
}

u64 packed_prefix(std::string_view s, u32 kappa) {
    u64 key = 0;
    u32 take = std::min<u32>(kappa, 8);
    for (u32 i = 0; i < 8; ++i) {
        u8 c = (i < take && i < s.size()) ? static_cast<u8>(s[i]) : 0;
        key = (key << 8) | c;
    }
    return key;
}

static u64 walk_prefix_key(VWalk&& w, u32 kappa) {
    u64 key = 0;
    u32 take = std::min<u32>(kappa, 8);
    for (u32 i = 0; i < 8; ++i) {
        u8 c = (i < take && !w.empty()) ? w.next_byte() : 0;
        key = (key << 8) | c;
    }
    return key;
}

u64 x_prefix_key(const Index& ix, u32 rec) {
    return walk_prefix_key(x_coord_walk(ix, rec), ix.kappa);
}

u64 y_prefix_key(const Index& ix, u32 rec) {
    return walk_prefix_key(y_coord_walk(ix, rec), ix.kappa);
}

bool x_less(const Index& ix, u32 a, u32 b) {
    if (a == b) return false;
    const PathRecord& ra = ix.recs[a];
    const PathRecord& rb = ix.recs[b];
    if (ra.x_prefix != rb.x_prefix) return ra.x_prefix < rb.x_prefix;
    VWalk wa = x_coord_walk(ix, a);
    VWalk wb = x_coord_walk(ix, b);
    int ord = compare_walks(wa, wb).order;
    if (ord != 0) return ord < 0;
    return a < b;
}

bool y_less(const Index& ix, u32 a, u32 b) {
    if (a == b) return false;
    const PathRecord& ra = ix.recs[a];
    const PathRecord& rb = ix.recs[b];
    if (ra.y_prefix != rb.y_prefix) return ra.y_prefix < rb.y_prefix;
    VWalk wa = y_coord_walk(ix, a);
    VWalk wb = y_coord_walk(ix, b);
    int ord = compare_walks(wa, wb).order;
    if (ord != 0) return ord < 0;
    return a < b;
}

void finalize_index(Index& ix) {
    std::vector<u32> order;
    order.reserve(ix.recs.size());
    ix.recs.for_each([&](u32 id) {
        ix.recs[id].x_prefix = x_prefix_key(ix, id);
        ix.recs[id].y_prefix = y_prefix_key(ix, id);
        order.push_back(id);
    });
    std::sort(order.begin(), order.end(),
              [&](u32 a, u32 b) { return x_less(ix, a, b); });
    for (u32 id : order) ix.recs[id].x_handle = ix.grid.append_x(id);
    std::vector<u32> yorder = order;
    std::sort(yorder.begin(), yorder.end(),
              [&](u32 a, u32 b) { return y_less(ix, a, b); });
    for (u32 id : yorder) ix.recs[id].y_handle = ix.grid.append_y(id);
    std::vector<GridStore::Point> pts;
    pts.reserve(order.size());
    for (u32 id : order)
        pts.push_back({id, ix.recs[id].x_handle, ix.recs[id].y_handle});
    ix.grid.bulk_build(pts);
}

// Position search assumes both list orders are consistent with
// x_less / y_less over the live set.
void grid_insert_record(Index& ix, u32 rec) {
    PathRecord& r = ix.recs[rec];
    r.x_prefix = x_prefix_key(ix, rec);
    r.y_prefix = y_prefix_key(ix, rec);
    size_t n = ix.grid.size();
    size_t lo = 0, hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (x_less(ix, ix.grid.rec_at_x(mid), rec)) lo = mid + 1; else hi = mid;
    }
    u32 x_after = lo == 0 ? GridStore::kNil : ix.grid.x_handle_at(lo - 1);
    lo = 0; hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (y_less(ix, ix.grid.rec_at_y(mid), rec)) lo = mid + 1; else hi = mid;
    }
    u32 y_after = lo == 0 ? GridStore::kNil : ix.grid.y_handle_at(lo - 1);
    GridStore::Handles h = ix.grid.insert(rec, x_after, y_after);
    r.x_handle = h.x;
    r.y_handle = h.y;
}

} // namespace rrindex

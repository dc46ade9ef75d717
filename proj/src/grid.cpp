#include "rrindex/grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace rrindex {

namespace {

// Weight balance alpha = 7/10; rebuild an insertion path deeper than
// log_{10/7}(n) at the shallowest unbalanced ancestor.
bool unbalanced(size_t child, size_t node) { return 10 * child > 7 * node; }

u32 depth_limit(size_t n) {
    return static_cast<u32>(std::log(static_cast<double>(n)) / std::log(10.0 / 7.0)) + 1;
}

} // namespace

u32 GridStore::aux_new(const Point& pt) {
    u32 n = m_aux.alloc();
    m_aux[n] = ANode{kNil, kNil, pt.rec, pt.yh};
    return n;
}

u32 GridStore::aux_insert(u32 t, u32 node, size_t yr) {
    if (t == kNil) return node;
    if (yr < yrank(m_aux[t].yh)) {
        u32 c = aux_insert(m_aux[t].left, node, yr);
        m_aux[t].left = c;
        if (prio(m_aux[c].rec) > prio(m_aux[t].rec)) { // rotate right
            m_aux[t].left = m_aux[c].right;
            m_aux[c].right = t;
            t = c;
        }
    } else {
        u32 c = aux_insert(m_aux[t].right, node, yr);
        m_aux[t].right = c;
        if (prio(m_aux[c].rec) > prio(m_aux[t].rec)) { // rotate left
            m_aux[t].right = m_aux[c].left;
            m_aux[c].left = t;
            t = c;
        }
    }
    return t;
}

u32 GridStore::aux_merge(u32 a, u32 b) {
    if (a == kNil) return b;
    if (b == kNil) return a;
    if (prio(m_aux[a].rec) > prio(m_aux[b].rec)) {
        u32 c = aux_merge(m_aux[a].right, b);
        m_aux[a].right = c;
        return a;
    }
    u32 c = aux_merge(a, m_aux[b].left);
    m_aux[b].left = c;
    return b;
}

u32 GridStore::aux_erase(u32 t, size_t yr) {
    assert(t != kNil);
    size_t r = yrank(m_aux[t].yh);
    if (yr < r) {
        u32 c = aux_erase(m_aux[t].left, yr);
        m_aux[t].left = c;
    } else if (yr > r) {
        u32 c = aux_erase(m_aux[t].right, yr);
        m_aux[t].right = c;
    } else {
        u32 m = aux_merge(m_aux[t].left, m_aux[t].right);
        m_aux.free(t);
        return m;
    }
    return t;
}

void GridStore::aux_report(u32 t, size_t y_lo, size_t y_hi, std::vector<u32>& out) const {
    if (t == kNil) return;
    size_t r = yrank(m_aux[t].yh);
    if (r > y_lo) aux_report(m_aux[t].left, y_lo, y_hi, out);
    if (y_lo <= r && r <= y_hi) out.push_back(m_aux[t].rec);
    if (r < y_hi) aux_report(m_aux[t].right, y_lo, y_hi, out);
}

void GridStore::free_aux_subtree(u32 t) {
    if (t == kNil) return;
    std::vector<u32> stack{t};
    while (!stack.empty()) {
        u32 h = stack.back();
        stack.pop_back();
        if (m_aux[h].left != kNil) stack.push_back(m_aux[h].left);
        if (m_aux[h].right != kNil) stack.push_back(m_aux[h].right);
        m_aux.free(h);
    }
}

GridStore::Handles GridStore::insert(u32 rec, u32 x_after, u32 y_after) {
    u32 xh = m_x.insert_after(x_after, rec);
    u32 yh = m_y.insert_after(y_after, rec);
    tree_insert(m_x.rank(xh), Point{rec, xh, yh});
    if (size() > m_max_size) m_max_size = size();
    return {xh, yh};
}

void GridStore::tree_insert(size_t pos, const Point& pt) {
    u32 leaf = m_tree.alloc();
    m_tree[leaf] = TNode{};
    m_tree[leaf].pt = pt;
    m_tree[leaf].aux = aux_new(pt);
    if (m_root == kNil) {
        assert(pos == 0);
        m_root = leaf;
        return;
    }
    std::vector<u32> path;
    u32 cur = m_root;
    size_t q = pos;
    while (true) {
        path.push_back(cur);
        size_t ls = tsize(m_tree[cur].left);
        if (q <= ls) {
            if (m_tree[cur].left == kNil) {
                assert(q == 0);
                m_tree[cur].left = leaf;
                break;
            }
            cur = m_tree[cur].left;
        } else {
            q -= ls + 1;
            if (m_tree[cur].right == kNil) {
                assert(q == 0);
                m_tree[cur].right = leaf;
                break;
            }
            cur = m_tree[cur].right;
        }
    }
    size_t yr = yrank(pt.yh);
    for (u32 h : path) {
        ++m_tree[h].size;
        u32 nr = aux_insert(m_tree[h].aux, aux_new(pt), yr);
        m_tree[h].aux = nr;
    }
    if (path.size() + 1 > depth_limit(size())) {
        // scapegoat: shallowest unbalanced ancestor, scanning up from the leaf
        u32 goat = kNil, goat_parent = kNil;
        u32 child = leaf;
        for (size_t i = path.size(); i-- > 0;) {
            if (unbalanced(tsize(child), tsize(path[i]))) {
                goat = path[i];
                goat_parent = i > 0 ? path[i - 1] : kNil;
            }
            child = path[i];
        }
        if (goat == kNil) { goat = m_root; goat_parent = kNil; }
        std::vector<Point> pts;
        collect_points(goat, pts);
        free_subtree(goat);
        u32 rebuilt = build_from(pts);
        if (goat_parent == kNil) m_root = rebuilt;
        else if (m_tree[goat_parent].left == goat) m_tree[goat_parent].left = rebuilt;
        else m_tree[goat_parent].right = rebuilt;
    }
}

void GridStore::erase(u32 xh, u32 yh) {
    tree_erase(m_x.rank(xh), xh, yh);
    m_x.erase(xh);
    m_y.erase(yh);
    if (10 * size() < 7 * m_max_size) {
        std::vector<Point> pts;
        collect_points(m_root, pts);
        free_subtree(m_root);
        m_root = build_from(pts);
        m_max_size = size();
    }
}

void GridStore::tree_erase(size_t pos, u32 xh, u32 yh) {
    std::vector<u32> path;
    u32 cur = m_root;
    size_t q = pos;
    while (true) {
        path.push_back(cur);
        size_t ls = tsize(m_tree[cur].left);
        if (q < ls) cur = m_tree[cur].left;
        else if (q == ls) break;
        else { q -= ls + 1; cur = m_tree[cur].right; }
    }
    u32 v = path.back();
    assert(m_tree[v].pt.xh == xh && m_tree[v].pt.yh == yh);
    (void)xh; (void)yh;
    size_t vyr = yrank(m_tree[v].pt.yh);
    for (u32 h : path) {
        u32 nr = aux_erase(m_tree[h].aux, vyr);
        m_tree[h].aux = nr;
        --m_tree[h].size;
    }
    u32 removed, replacement;
    if (m_tree[v].left != kNil && m_tree[v].right != kNil) {
        // swap in the successor, splice it out below
        std::vector<u32> ext{m_tree[v].right};
        while (m_tree[ext.back()].left != kNil) ext.push_back(m_tree[ext.back()].left);
        u32 s = ext.back();
        size_t syr = yrank(m_tree[s].pt.yh);
        for (u32 h : ext) {
            u32 nr = aux_erase(m_tree[h].aux, syr);
            m_tree[h].aux = nr;
            --m_tree[h].size;
        }
        // s.pt stays inside every subtree from the root down to v, so the
        // auxes above keep it; only its structural slot moves
        m_tree[v].pt = m_tree[s].pt;
        removed = s;
        replacement = m_tree[s].right;
        u32 sp = ext.size() >= 2 ? ext[ext.size() - 2] : v;
        if (m_tree[sp].left == s) m_tree[sp].left = replacement;
        else m_tree[sp].right = replacement;
    } else {
        removed = v;
        replacement = m_tree[v].left != kNil ? m_tree[v].left : m_tree[v].right;
        u32 vp = path.size() >= 2 ? path[path.size() - 2] : kNil;
        if (vp == kNil) m_root = replacement;
        else if (m_tree[vp].left == v) m_tree[vp].left = replacement;
        else m_tree[vp].right = replacement;
    }
    free_aux_subtree(m_tree[removed].aux);
    m_tree.free(removed);
}

void GridStore::collect_points(u32 t, std::vector<Point>& out) const {
    if (t == kNil) return;
    std::vector<std::pair<u32, bool>> stack{{t, false}};
    while (!stack.empty()) {
        auto [h, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            out.push_back(m_tree[h].pt);
            continue;
        }
        if (m_tree[h].right != kNil) stack.push_back({m_tree[h].right, false});
        stack.push_back({h, true});
        if (m_tree[h].left != kNil) stack.push_back({m_tree[h].left, false});
    }
}

void GridStore::free_subtree(u32 t) {
    if (t == kNil) return;
    std::vector<u32> stack{t};
    while (!stack.empty()) {
        u32 h = stack.back();
        stack.pop_back();
        if (m_tree[h].left != kNil) stack.push_back(m_tree[h].left);
        if (m_tree[h].right != kNil) stack.push_back(m_tree[h].right);
        free_aux_subtree(m_tree[h].aux);
        m_tree.free(h);
    }
}

u32 GridStore::build_from(const std::vector<Point>& xs) {
    if (xs.empty()) return kNil;
    std::vector<std::pair<size_t, u32>> by_rank(xs.size());
    for (u32 i = 0; i < xs.size(); ++i) by_rank[i] = {yrank(xs[i].yh), i};
    std::sort(by_rank.begin(), by_rank.end());
    std::vector<u32> ys(xs.size());
    for (u32 i = 0; i < xs.size(); ++i) ys[i] = by_rank[i].second;
    return build_rec(xs, 0, static_cast<u32>(xs.size()), ys);
}

u32 GridStore::build_rec(const std::vector<Point>& xs, u32 lo, u32 hi,
                         const std::vector<u32>& ys) {
    if (lo == hi) return kNil;
    u32 mid = lo + (hi - lo) / 2;
    u32 t = m_tree.alloc();
    m_tree[t] = TNode{};
    m_tree[t].pt = xs[mid];
    m_tree[t].size = hi - lo;
    u32 a = cartesian(xs, ys);
    m_tree[t].aux = a;
    std::vector<u32> yl, yr;
    yl.reserve(mid - lo);
    yr.reserve(hi - mid - 1);
    for (u32 i : ys) {
        if (i < mid) yl.push_back(i);
        else if (i > mid) yr.push_back(i);
    }
    u32 l = build_rec(xs, lo, mid, yl);
    m_tree[t].left = l;
    u32 r = build_rec(xs, mid + 1, hi, yr);
    m_tree[t].right = r;
    return t;
}

u32 GridStore::cartesian(const std::vector<Point>& xs, const std::vector<u32>& ys) {
    // ys is the in-order sequence; priorities form the max-heap via the
    // right-spine stack construction
    std::vector<u32> spine;
    for (u32 i : ys) {
        u32 n = aux_new(xs[i]);
        u32 last = kNil;
        while (!spine.empty() && prio(m_aux[spine.back()].rec) < prio(m_aux[n].rec)) {
            last = spine.back();
            spine.pop_back();
        }
        m_aux[n].left = last;
        if (!spine.empty()) m_aux[spine.back()].right = n;
        spine.push_back(n);
    }
    return spine.empty() ? kNil : spine.front();
}

void GridStore::bulk_build(const std::vector<Point>& x_order) {
    assert(m_root == kNil);
    assert(m_x.size() == x_order.size() && m_y.size() == x_order.size());
    m_root = build_from(x_order);
    m_max_size = x_order.size();
}

void GridStore::report(size_t x_lo, size_t x_hi, size_t y_lo, size_t y_hi,
                       std::vector<u32>& out) const {
    if (m_root == kNil || x_lo > x_hi || y_lo > y_hi) return;
    if (x_lo >= size()) return;
    x_hi = std::min(x_hi, size() - 1);
    report_node(m_root, 0, x_lo, x_hi, y_lo, y_hi, out);
}

void GridStore::report_node(u32 t, size_t offset, size_t x_lo, size_t x_hi,
                            size_t y_lo, size_t y_hi, std::vector<u32>& out) const {
    if (t == kNil) return;
    size_t lo = offset, hi = offset + m_tree[t].size - 1;
    if (x_hi < lo || x_lo > hi) return;
    if (x_lo <= lo && hi <= x_hi) {
        aux_report(m_tree[t].aux, y_lo, y_hi, out);
        return;
    }
    size_t pos = offset + tsize(m_tree[t].left);
    if (x_lo <= pos && pos <= x_hi) {
        size_t yr = yrank(m_tree[t].pt.yh);
        if (y_lo <= yr && yr <= y_hi) out.push_back(m_tree[t].pt.rec);
    }
    report_node(m_tree[t].left, offset, x_lo, x_hi, y_lo, y_hi, out);
    report_node(m_tree[t].right, pos + 1, x_lo, x_hi, y_lo, y_hi, out);
}

void GridStore::clear() {
    m_x.clear();
    m_y.clear();
    m_tree.clear();
    m_aux.clear();
    m_root = kNil;
    m_max_size = 0;
}

void GridStore::validate_node(u32 t, std::vector<Point>& out) const {
    if (t == kNil) return;
    if (m_tree[t].size != tsize(m_tree[t].left) + tsize(m_tree[t].right) + 1)
        throw InvariantError("grid: bad subtree size");
    std::vector<Point> sub;
    validate_node(m_tree[t].left, sub);
    sub.push_back(m_tree[t].pt);
    validate_node(m_tree[t].right, sub);
    // aux in-order must equal the subtree's points sorted by y rank
    std::vector<Point> by_y = sub;
    std::sort(by_y.begin(), by_y.end(),
              [&](const Point& a, const Point& b) { return yrank(a.yh) < yrank(b.yh); });
    std::vector<std::pair<u32, u64>> aux_seq; // (rec, parent prio) in order
    std::vector<u32> stack;
    u32 cur = m_tree[t].aux;
    size_t idx = 0;
    while (cur != kNil || !stack.empty()) {
        while (cur != kNil) { stack.push_back(cur); cur = m_aux[cur].left; }
        cur = stack.back();
        stack.pop_back();
        if (idx >= by_y.size() || m_aux[cur].rec != by_y[idx].rec ||
            m_aux[cur].yh != by_y[idx].yh)
            throw InvariantError("grid: aux order mismatch");
        for (u32 c : {m_aux[cur].left, m_aux[cur].right})
            if (c != kNil && prio(m_aux[c].rec) > prio(m_aux[cur].rec))
                throw InvariantError("grid: aux heap violation");
        ++idx;
        cur = m_aux[cur].right;
    }
    if (idx != by_y.size()) throw InvariantError("grid: aux size mismatch");
    out.insert(out.end(), sub.begin(), sub.end());
}

void GridStore::validate() const {
    if (m_x.size() != m_y.size() || m_x.size() != size())
        throw InvariantError("grid: list/tree size mismatch");
    std::vector<Point> in_order;
    validate_node(m_root, in_order);
    u32 xh = m_x.first();
    for (const Point& p : in_order) {
        if (xh == kNil || p.xh != xh || m_x.value(xh) != p.rec)
            throw InvariantError("grid: x order mismatch");
        if (!m_y.contains(p.yh) || m_y.value(p.yh) != p.rec)
            throw InvariantError("grid: y handle mismatch");
        xh = m_x.next(xh);
    }
    if (xh != kNil) throw InvariantError("grid: x list longer than tree");
}

} // namespace rrindex

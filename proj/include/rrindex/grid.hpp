#pragma once

#include <vector>

#include "rrindex/common.hpp"
#include "rrindex/indexed_list.hpp"
#include "rrindex/slab.hpp"

namespace rrindex {

// Dynamic two-dimensional range reporting over one point per record.
//
// The X and Y orders live in indexed lists (stable handles, rank queries).
// A weight-balanced tree mirrors the X order; every tree node carries a
// treap of its subtree's points keyed by current Y rank. Relative Y order
// of live points never changes, so rank-based treap comparisons stay valid
// while absolute ranks drift.
class GridStore {
public:
    static constexpr u32 kNil = IndexedList::kNil;

    struct Handles { u32 x = kNil, y = kNil; };
    struct Point { u32 rec = 0; u32 xh = kNil, yh = kNil; };

    size_t size() const { return m_root == kNil ? 0 : m_tree[m_root].size; }

    // Incremental maintenance. insert() places the point directly after the
    // given list handles (kNil = front); erase() takes the point's handles.
    Handles insert(u32 rec, u32 x_after, u32 y_after);
    void erase(u32 xh, u32 yh);

    // Initial construction: append points in X order and in Y order, then
    // build the tree over everything appended so far.
    u32 append_x(u32 rec) { return m_x.insert_after(m_x.last(), rec); }
    u32 append_y(u32 rec) { return m_y.insert_after(m_y.last(), rec); }
    void bulk_build(const std::vector<Point>& x_order);

    size_t x_rank(u32 xh) const { return m_x.rank(xh); }
    size_t y_rank(u32 yh) const { return m_y.rank(yh); }
    u32 x_handle_at(size_t r) const { return m_x.at(r); }
    u32 y_handle_at(size_t r) const { return m_y.at(r); }
    u32 rec_at_x(size_t r) const { return static_cast<u32>(m_x.value(m_x.at(r))); }
    u32 rec_at_y(size_t r) const { return static_cast<u32>(m_y.value(m_y.at(r))); }

    // Appends every record with x rank in [x_lo, x_hi] and y rank in
    // [y_lo, y_hi] (0-based, inclusive) to out, unordered.
    void report(size_t x_lo, size_t x_hi, size_t y_lo, size_t y_hi,
                std::vector<u32>& out) const;

    void clear();

    // Checks every structural invariant; quadratic-ish, test use only.
    void validate() const;

private:
    struct TNode {
        u32 left = kNil, right = kNil;
        u32 size = 1;
        u32 aux = kNil; // treap over subtree points, own point included
        Point pt;
    };
    struct ANode {
        u32 left = kNil, right = kNil;
        u32 rec = 0;
        u32 yh = kNil;
    };

    static u64 prio(u32 rec) { return mix64(0x7f4a7c15e3779b97ull + rec); }
    size_t yrank(u32 yh) const { return m_y.rank(yh); }
    static size_t tsize(const Slab<TNode>& t, u32 h) { return h == kNil ? 0 : t[h].size; }
    size_t tsize(u32 h) const { return tsize(m_tree, h); }

    u32 aux_new(const Point& pt);
    u32 aux_insert(u32 t, u32 node, size_t yr);
    u32 aux_erase(u32 t, size_t yr);
    u32 aux_merge(u32 a, u32 b);
    void aux_report(u32 t, size_t y_lo, size_t y_hi, std::vector<u32>& out) const;
    void free_aux_subtree(u32 t);

    void tree_insert(size_t pos, const Point& pt);
    void tree_erase(size_t pos, u32 xh, u32 yh);
    void collect_points(u32 t, std::vector<Point>& out) const;
    void free_subtree(u32 t);
    u32 build_from(const std::vector<Point>& xs);
    u32 build_rec(const std::vector<Point>& xs, u32 lo, u32 hi,
                  const std::vector<u32>& ys);
    u32 cartesian(const std::vector<Point>& xs, const std::vector<u32>& ys);
    void report_node(u32 t, size_t offset, size_t x_lo, size_t x_hi,
                     size_t y_lo, size_t y_hi, std::vector<u32>& out) const;
    void validate_node(u32 t, std::vector<Point>& out) const;

    IndexedList m_x, m_y;
    Slab<TNode> m_tree;
    Slab<ANode> m_aux;
    u32 m_root = kNil;
    size_t m_max_size = 0; // high-water mark since last full rebuild
};

} // namespace rrindex

#pragma once

#include <cassert>

#include "rrindex/common.hpp"
#include "rrindex/slab.hpp"

namespace rrindex {

// Ordered list with stable handles, O(log n) rank(handle) and access(rank).
// Treap keyed by list position; priorities are a hash of the slot id, so the
// tree shape is a function of (id set, order) alone. That makes shapes
// reproducible across a save/load cycle that reinserts in list order.
//
// Each handle carries a u64 payload chosen by the caller.
class IndexedList {
    struct Node {
        u32 left = kNil, right = kNil, parent = kNil;
        u32 size = 1;
        u64 value = 0;
    };

public:
    static constexpr u32 kNil = 0xffffffffu;

    size_t size() const { return m_root == kNil ? 0 : m_nodes[m_root].size; }
    bool contains(u32 h) const { return m_nodes.live(h); }
    u64 value(u32 h) const { return m_nodes[h].value; }
    void set_value(u32 h, u64 v) { m_nodes[h].value = v; }

    // Insert a new element after `pos` (kNil = insert at front). Returns handle.
    u32 insert_after(u32 pos, u64 value) {
        u32 h = m_nodes.alloc();
        m_nodes[h] = Node{};
        m_nodes[h].value = value;
        if (m_root == kNil) {
            assert(pos == kNil);
            m_root = h;
            return h;
        }
        if (pos == kNil) {
            u32 f = first();
            attach_left(f, h);
        } else if (m_nodes[pos].right == kNil) {
            attach_right(pos, h);
        } else {
            u32 s = subtree_min(m_nodes[pos].right);
            attach_left(s, h);
        }
        bubble_up(h);
        return h;
    }

    void erase(u32 h) {
        // rotate h down to a leaf, then unlink
        while (m_nodes[h].left != kNil || m_nodes[h].right != kNil) {
            u32 l = m_nodes[h].left, r = m_nodes[h].right;
            if (r == kNil || (l != kNil && prio(l) > prio(r)))
                rotate_right(h);
            else
                rotate_left(h);
        }
        u32 p = m_nodes[h].parent;
        if (p == kNil) {
            m_root = kNil;
        } else {
            if (m_nodes[p].left == h) m_nodes[p].left = kNil; else m_nodes[p].right = kNil;
            for (u32 a = p; a != kNil; a = m_nodes[a].parent) --m_nodes[a].size;
        }
        m_nodes.free(h);
    }

    // 0-based position of handle h.
    size_t rank(u32 h) const {
        size_t r = m_nodes[h].left == kNil ? 0 : m_nodes[m_nodes[h].left].size;
        u32 cur = h;
        for (u32 p = m_nodes[cur].parent; p != kNil; cur = p, p = m_nodes[p].parent)
            if (m_nodes[p].right == cur)
                r += 1 + (m_nodes[p].left == kNil ? 0 : m_nodes[m_nodes[p].left].size);
        return r;
    }

    // Handle at 0-based position r.
    u32 at(size_t r) const {
        assert(r < size());
        u32 cur = m_root;
        while (true) {
            size_t ls = m_nodes[cur].left == kNil ? 0 : m_nodes[m_nodes[cur].left].size;
            if (r < ls) { cur = m_nodes[cur].left; }
            else if (r == ls) { return cur; }
            else { r -= ls + 1; cur = m_nodes[cur].right; }
        }
    }

    u32 first() const { return m_root == kNil ? kNil : subtree_min(m_root); }
    u32 last() const { return m_root == kNil ? kNil : subtree_max(m_root); }

    u32 next(u32 h) const {
        if (m_nodes[h].right != kNil) return subtree_min(m_nodes[h].right);
        u32 cur = h, p = m_nodes[h].parent;
        while (p != kNil && m_nodes[p].right == cur) { cur = p; p = m_nodes[p].parent; }
        return p;
    }
    u32 prev(u32 h) const {
        if (m_nodes[h].left != kNil) return subtree_max(m_nodes[h].left);
        u32 cur = h, p = m_nodes[h].parent;
        while (p != kNil && m_nodes[p].left == cur) { cur = p; p = m_nodes[p].parent; }
        return p;
    }

    void clear() { m_nodes.clear(); m_root = kNil; }

private:
    static u64 prio_of(u32 id) { return mix64(0x9d2c5680cafebabeull + id); }
    u64 prio(u32 h) const { return prio_of(h); }

    u32 subtree_min(u32 h) const { while (m_nodes[h].left != kNil) h = m_nodes[h].left; return h; }
    u32 subtree_max(u32 h) const { while (m_nodes[h].right != kNil) h = m_nodes[h].right; return h; }

    void attach_left(u32 parent, u32 h) {
        assert(m_nodes[parent].left == kNil);
        m_nodes[parent].left = h;
        m_nodes[h].parent = parent;
        for (u32 a = parent; a != kNil; a = m_nodes[a].parent) ++m_nodes[a].size;
    }
    void attach_right(u32 parent, u32 h) {
        assert(m_nodes[parent].right == kNil);
        m_nodes[parent].right = h;
        m_nodes[h].parent = parent;
        for (u32 a = parent; a != kNil; a = m_nodes[a].parent) ++m_nodes[a].size;
    }

    void refresh_size(u32 h) {
        u32 s = 1;
        if (m_nodes[h].left != kNil) s += m_nodes[m_nodes[h].left].size;
        if (m_nodes[h].right != kNil) s += m_nodes[m_nodes[h].right].size;
        m_nodes[h].size = s;
    }

    void replace_child(u32 parent, u32 oldc, u32 newc) {
        if (parent == kNil) { m_root = newc; }
        else if (m_nodes[parent].left == oldc) m_nodes[parent].left = newc;
        else m_nodes[parent].right = newc;
        if (newc != kNil) m_nodes[newc].parent = parent;
    }

    // rotate left child of h up
    void rotate_right(u32 h) {
        u32 l = m_nodes[h].left, p = m_nodes[h].parent;
        m_nodes[h].left = m_nodes[l].right;
        if (m_nodes[l].right != kNil) m_nodes[m_nodes[l].right].parent = h;
        m_nodes[l].right = h;
        m_nodes[h].parent = l;
        replace_child(p, h, l);
        refresh_size(h);
        refresh_size(l);
    }
    void rotate_left(u32 h) {
        u32 r = m_nodes[h].right, p = m_nodes[h].parent;
        m_nodes[h].right = m_nodes[r].left;
        if (m_nodes[r].left != kNil) m_nodes[m_nodes[r].left].parent = h;
        m_nodes[r].left = h;
        m_nodes[h].parent = r;
        replace_child(p, h, r);
        refresh_size(h);
        refresh_size(r);
    }

    void bubble_up(u32 h) {
        while (true) {
            u32 p = m_nodes[h].parent;
            if (p == kNil || prio(p) >= prio(h)) break;
            if (m_nodes[p].left == h) rotate_right(p); else rotate_left(p);
        }
    }

    Slab<Node> m_nodes;
    u32 m_root = kNil;
};

} // namespace rrindex

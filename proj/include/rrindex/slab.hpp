#pragma once

#include <cassert>
#include <vector>

#include "rrindex/common.hpp"

namespace rrindex {

// Slab allocator with stable u32 handles and a free list. In debug builds a
// generation counter per slot catches use-after-free through stale handles.
template <typename T>
class Slab {
public:
    u32 alloc() {
        u32 id;
        if (!m_free.empty()) {
            id = m_free.back();
            m_free.pop_back();
            m_live[id] = true;
        } else {
            id = static_cast<u32>(m_items.size());
            m_items.emplace_back();
            m_live.push_back(true);
#ifndef NDEBUG
            m_gen.push_back(0);
#endif
        }
        ++m_count;
        return id;
    }

    void free(u32 id) {
        assert(m_live[id]);
        m_items[id] = T{};
        m_live[id] = false;
        m_free.push_back(id);
#ifndef NDEBUG
        ++m_gen[id];
#endif
        --m_count;
    }

    T& operator[](u32 id) {
        assert(id < m_items.size() && m_live[id]);
        return m_items[id];
    }
    const T& operator[](u32 id) const {
        assert(id < m_items.size() && m_live[id]);
        return m_items[id];
    }

    bool live(u32 id) const { return id < m_live.size() && m_live[id]; }
    size_t size() const { return m_count; }          // live items
    size_t capacity() const { return m_items.size(); } // highest id + 1

#ifndef NDEBUG
    u32 generation(u32 id) const { return id < m_gen.size() ? m_gen[id] : 0; }
#endif

    // Iterate live ids in ascending order.
    template <typename F>
    void for_each(F&& f) const {
        for (u32 id = 0; id < m_items.size(); ++id)
            if (m_live[id]) f(id);
    }

    void clear() {
        m_items.clear();
        m_live.clear();
        m_free.clear();
#ifndef NDEBUG
        m_gen.clear();
#endif
        m_count = 0;
    }

    // Re-create a slot at a specific id (loading a serialized state). Ids must
    // be claimed in ascending order interleaved with skip() for holes.
    u32 claim_next() {
        u32 id = static_cast<u32>(m_items.size());
        m_items.emplace_back();
        m_live.push_back(true);
#ifndef NDEBUG
        m_gen.push_back(0);
#endif
        ++m_count;
        return id;
    }
    void skip_next() {
        u32 id = static_cast<u32>(m_items.size());
        m_items.emplace_back();
        m_live.push_back(false);
#ifndef NDEBUG
        m_gen.push_back(0);
#endif
        m_free.push_back(id);
    }

private:
    std::vector<T> m_items;
    std::vector<bool> m_live;
    std::vector<u32> m_free;
#ifndef NDEBUG
    std::vector<u32> m_gen;
#endif
    size_t m_count = 0;
};

} // namespace rrindex

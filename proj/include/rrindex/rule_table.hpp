#pragma once

#include <unordered_map>

#include "rrindex/common.hpp"

namespace rrindex {

// Right-hand-side key for rule deduplication. Chains of unary rules are
// resolved structurally and never enter the table.
//   tag 0: leaf byte, a = byte
//   tag 1: pair, a = packed left, b = packed right
//   tag 2: power, a = packed child, b = exponent
struct RuleKey {
    u8 tag = 0;
    u64 a = 0;
    u64 b = 0;
    friend bool operator==(const RuleKey& x, const RuleKey& y) {
        return x.tag == y.tag && x.a == y.a && x.b == y.b;
    }
};

struct RuleKeyHash {
    size_t operator()(const RuleKey& k) const {
        return static_cast<size_t>(mix64(mix64(k.a ^ (u64(k.tag) << 56)) + mix64(k.b)));
    }
};

// RHS -> record id of the base that owns the rule.
class RuleTable {
public:
    static constexpr u32 kMissing = 0xffffffffu;

    u32 find(const RuleKey& k) const {
        auto it = m_map.find(k);
        return it == m_map.end() ? kMissing : it->second;
    }

    void insert(const RuleKey& k, u32 rec) {
        auto [it, fresh] = m_map.emplace(k, rec);
        (void)it;
        if (!fresh) throw InvariantError("duplicate rule key");
    }

    void erase(const RuleKey& k) {
        if (m_map.erase(k) != 1) throw InvariantError("erasing absent rule key");
    }

    size_t size() const { return m_map.size(); }
    void clear() { m_map.clear(); }

private:
    std::unordered_map<RuleKey, u32, RuleKeyHash> m_map;
};

} // namespace rrindex

#pragma once

#include <map>
#include <string>
#include <vector>

#include "rrindex/index_state.hpp"

namespace rrindex::oracle {

// 1-based pattern occurrences by two independent scans; throws on a mismatch
// between the scans.
std::vector<u64> naive_occ(const std::string& text, const std::string& pat);

// Substring complexity max_k(distinct k-substrings / k).
double naive_delta(const std::string& text);

// Independent replay of the randomized derivation, kept deliberately dumb:
// flat symbol vectors per round, explicit per-symbol state, no sharing with
// the index implementation.
struct SimGrammar {
    struct Rule {
        u8 tag = 0;          // 0 leaf, 1 pair, 2 power, 3 unary
        u8 byte = 0;
        u32 a = 0, b = 0;    // child sim ids
        u64 exp = 0;
        u64 val_len = 0;
        u32 height = 0;
        int assign = 0;      // 0, 1, or -1
        Fp128 fp;
    };
    std::vector<Rule> rules;              // sim id -> rule
    std::vector<std::vector<u32>> rounds; // S^0 .. S^H
    u32 start = 0;
    u32 height() const { return static_cast<u32>(rounds.size()) - 1; }
};

// Throws HeightBoundError exactly when the real builder would.
SimGrammar sim_build(const std::string& text, u64 seed, u32 w);

// Expansion by direct recursion over records; a second route, independent
// of the walker machinery.
void expand_into(const Index& ix, NodeRef n, std::string& out);
std::string expand(const Index& ix, NodeRef n);

// 1-based derivation-tree occurrence lists for every node, by one full
// virtual tree walk. Cost scales with expanded tree size; small inputs only.
std::map<u64, std::vector<u64>> all_vocc(const Index& ix);

// Update references.
std::string splice_insert(const std::string& t, u64 pos1, const std::string& p);
std::string splice_delete(const std::string& t, u64 pos1, u64 len);

} // namespace rrindex::oracle

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>

#include "rrindex/grammar.hpp"
#include "rrindex/locate.hpp"
#include "rrindex/math.hpp"
#include "rrindex/oracle.hpp"
#include "rrindex/text_access.hpp"

using namespace rrindex;

namespace {

std::string random_text(std::mt19937_64& rng, size_t n, u32 sigma) {
    std::string t(n, '\0');
    for (auto& c : t)
        c = static_cast<char>(sigma <= 26 ? 'a' + rng() % sigma : rng() % sigma);
    return t;
}

Index built(const std::string& t) {
    Index ix;
    build_grammar(ix, t);
    finalize_index(ix);
    return ix;
}

void check_pattern(const Index& ix, const std::string& t, const std::string& p) {
    std::vector<u64> want = oracle::naive_occ(t, p);
    LocateStats st;
    std::vector<u64> got = locate(ix, p, &st);
    CHECK(got == want);
    // every grid match is a distinct occurrence
    CHECK(st.raw_positions == want.size());
    if (p.size() >= 2) {
        u64 envelope = 4 * height_threshold(p.size(), ix.w);
        CHECK(st.pieces <= envelope);
    }
    std::vector<u64> got2 = locate(ix, p, nullptr, true);
    CHECK(got2 == want);
}

} // namespace

TEST_CASE("fixed text occurrences") {
    std::string t = "abaaacbaaa";
    Index ix = built(t);
    CHECK(locate(ix, "aa") == std::vector<u64>{3, 4, 8, 9});
    CHECK(locate(ix, "baaa") == std::vector<u64>{2, 7});
    CHECK(locate(ix, "c") == std::vector<u64>{6});
    CHECK(locate(ix, "a") == std::vector<u64>{1, 3, 4, 5, 8, 9, 10});
    CHECK(locate(ix, "b") == std::vector<u64>{2, 7});
    CHECK(locate(ix, "abaaacbaaa") == std::vector<u64>{1});
    CHECK(locate(ix, "aaac") == std::vector<u64>{3});
    CHECK(locate(ix, "cb") == std::vector<u64>{6});
    CHECK(locate(ix, "ca").empty());
    CHECK(locate(ix, "x").empty());
    CHECK(locate(ix, "ab") == std::vector<u64>{1});
    CHECK(locate(ix, "aab").empty());
    CHECK(locate(ix, "abaaacbaaaa").empty());
    CHECK(locate(ix, "").empty());
}

TEST_CASE("power heavy texts") {
    for (const char* s : {"aaaaaaaaaaaaaaaa", "abababababababab", "aabaabaabaabaab",
                          "abcabcabcabcabcabc", "aaaabaaaabaaaab"}) {
        std::string t(s);
        Index ix = built(t);
        for (size_t l = 1; l <= t.size(); ++l)
            for (size_t pos = 0; pos + l <= t.size(); pos += 1)
                check_pattern(ix, t, t.substr(pos, l));
    }
}

TEST_CASE("random texts against the scanning oracle") {
    std::mt19937_64 rng(0x10ca7eull);
    for (int rep = 0; rep < 45; ++rep) {
        u32 sigma = rep % 3 == 0 ? 2 : (rep % 3 == 1 ? 4 : 26);
        size_t n = 2 + rng() % 400;
        std::string t = random_text(rng, n, sigma);
        if (rep % 4 == 0) t += t;
        if (rep % 7 == 0) t += std::string(1 + rng() % 60, 'a' + rng() % 2);
        Index ix = built(t);
        for (int q = 0; q < 25; ++q) {
            size_t len = 1 + rng() % std::min<size_t>(t.size(), 40);
            size_t pos = rng() % (t.size() - len + 1);
            std::string p = t.substr(pos, len);
            switch (q % 4) {
                case 0: break; // true substring
                case 1: p[rng() % p.size()] = static_cast<char>('a' + rng() % 4); break;
                case 2: p = random_text(rng, 1 + rng() % 8, sigma); break;
                case 3: p += p; break; // doubled, often absent
            }
            check_pattern(ix, t, p);
        }
    }
}

TEST_CASE("all substrings of small texts are found exactly") {
    std::mt19937_64 rng(88);
    for (int rep = 0; rep < 8; ++rep) {
        std::string t = random_text(rng, 12 + rng() % 30, 2 + rng() % 2);
        Index ix = built(t);
        for (size_t l = 1; l <= t.size(); ++l)
            for (size_t pos = 0; pos + l <= t.size(); ++pos)
                check_pattern(ix, t, t.substr(pos, l));
    }
}

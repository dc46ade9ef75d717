#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>

#include "rrindex/dag.hpp"
#include "rrindex/grammar.hpp"
#include "rrindex/text_access.hpp"

using namespace rrindex;

namespace {

std::string random_text(std::mt19937_64& rng, size_t n, u32 sigma) {
    std::string t(n, '\0');
    for (auto& c : t)
        c = static_cast<char>(sigma <= 26 ? 'a' + rng() % sigma : rng() % sigma);
    return t;
}

// expansion by plain recursion, independent of the walker
void expand_node(const Index& ix, NodeRef n, bool rev, std::string& out) {
    const PathRecord& r = ix.recs[n.rec];
    if (n.up > 0) {
        expand_node(ix, {n.rec, n.up - 1}, rev, out);
        return;
    }
    switch (r.tag) {
        case RuleTag::Leaf:
            out.push_back(static_cast<char>(r.byte));
            break;
        case RuleTag::Pair:
            if (rev) {
                expand_node(ix, r.right, true, out);
                expand_node(ix, r.left, true, out);
            } else {
                expand_node(ix, r.left, false, out);
                expand_node(ix, r.right, false, out);
            }
            break;
        case RuleTag::Power:
            for (u64 i = 0; i < r.exp; ++i) expand_node(ix, r.left, rev, out);
            break;
    }
}

std::string coord_string(const Index& ix, u32 rec, bool x_side) {
    const PathRecord& r = ix.recs[rec];
    std::string s;
    if (x_side) {
        if (r.tag == RuleTag::Leaf) s.push_back(static_cast<char>(r.byte));
        else expand_node(ix, r.left, true, s);
    } else {
        if (r.tag == RuleTag::Pair) expand_node(ix, r.right, false, s);
        else if (r.tag == RuleTag::Power)
            for (u64 i = 0; i + 1 < r.exp; ++i) expand_node(ix, r.left, false, s);
    }
    return s;
}

u64 naive_lce(const std::string& t, u64 i, u64 j) {
    u64 k = 0;
    while (i - 1 + k < t.size() && j - 1 + k < t.size() && t[i - 1 + k] == t[j - 1 + k]) ++k;
    return k;
}

u64 naive_rlce(const std::string& t, u64 i, u64 j) {
    u64 k = 0;
    while (k < i && k < j && t[i - 1 - k] == t[j - 1 - k]) ++k;
    return k;
}

} // namespace

TEST_CASE("extract and walks on a fixed text") {
    Index ix;
    build_grammar(ix, "abaaacbaaa");
    CHECK(extract(ix, 1, 10) == "abaaacbaaa");
    CHECK(extract(ix, 4, 3) == "aac");
    CHECK(extract(ix, 10, 1) == "a");
    CHECK(extract(ix, 1, 0).empty());
    CHECK_THROWS_AS(extract(ix, 0, 1), DataError);
    CHECK_THROWS_AS(extract(ix, 10, 2), DataError);
    CHECK(lce(ix, 3, 8) == 3);
    CHECK(lce(ix, 1, 1) == 10);
    CHECK(rlce(ix, 5, 10) == 4);
    CHECK(rlce(ix, 10, 10) == 10);

    VWalk w = text_walk(ix, true);
    std::string r;
    while (!w.empty()) r.push_back(static_cast<char>(w.next_byte()));
    CHECK(r == "aaabcaaaba");
}

TEST_CASE("extract, lce and rlce agree with naive scans") {
    std::mt19937_64 rng(0xace0fba5eull);
    for (int rep = 0; rep < 60; ++rep) {
        u32 sigma = rep % 3 == 0 ? 2 : (rep % 3 == 1 ? 4 : 26);
        size_t n = 2 + rng() % 500;
        std::string t = random_text(rng, n, sigma);
        if (rep % 5 == 0) t += t; // repetitive halves
        Index ix;
        build_grammar(ix, t);
        u64 len = t.size();
        for (int q = 0; q < 40; ++q) {
            u64 i = 1 + rng() % len;
            u64 j = 1 + rng() % len;
            u64 l = 1 + rng() % (len - i + 1);
            CHECK(extract(ix, i, l) == t.substr(i - 1, l));
            CHECK(lce(ix, i, j) == naive_lce(t, i, j));
            CHECK(lce(ix, i, j, false) == naive_lce(t, i, j));
            CHECK(rlce(ix, i, j) == naive_rlce(t, i, j));
            CHECK(rlce(ix, i, j, false) == naive_rlce(t, i, j));
        }
    }
}

TEST_CASE("walk compare matches string compare on suffix pairs") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 30; ++rep) {
        u32 sigma = rep % 2 ? 2 : 4;
        std::string t = random_text(rng, 3 + rng() % 300, sigma);
        Index ix;
        build_grammar(ix, t);
        u64 len = t.size();
        for (int q = 0; q < 30; ++q) {
            u64 i = 1 + rng() % len;
            u64 j = 1 + rng() % len;
            std::string si = t.substr(i - 1), sj = t.substr(j - 1);
            VWalk a = text_walk(ix), b = text_walk(ix);
            a.skip(i - 1);
            b.skip(j - 1);
            CmpResult c = compare_walks(a, b);
            int want = si == sj ? 0 : (si < sj ? -1 : 1);
            CHECK(c.order == want);
            u64 m = std::min(si.size(), sj.size());
            u64 wl = 0;
            while (wl < m && si[wl] == sj[wl]) ++wl;
            CHECK(c.lcp == wl);
            VWalk g = text_walk(ix);
            g.skip(i - 1);
            CmpResult cb = compare_walk_bytes(g, sj);
            CHECK(cb.order == want);
            CHECK(cb.lcp == wl);
        }
    }
}

TEST_CASE("packed prefix keys decide order soundly") {
    std::mt19937_64 rng(31337);
    for (int rep = 0; rep < 4000; ++rep) {
        size_t la = rng() % 12, lb = rng() % 12;
        std::string a(la, '\0'), b(lb, '\0');
        for (auto& c : a) c = static_cast<char>(rng() % 3); // embedded zeros likely
        for (auto& c : b) c = static_cast<char>(rng() % 3);
        u64 ka = packed_prefix(a, 8), kb = packed_prefix(b, 8);
        if (ka != kb) {
            CHECK((ka < kb) == (a < b));
        }
    }
}

TEST_CASE("coordinate orders and grid contents after finalize") {
    std::mt19937_64 rng(4242);
    for (int rep = 0; rep < 25; ++rep) {
        u32 sigma = rep % 3 == 0 ? 2 : (rep % 3 == 1 ? 3 : 26);
        std::string t = random_text(rng, 2 + rng() % 220, sigma);
        Index ix;
        build_grammar(ix, t);
        finalize_index(ix);

        std::vector<u32> ids;
        ix.recs.for_each([&](u32 id) { ids.push_back(id); });
        REQUIRE(ix.grid.size() == ids.size());

        // stored keys match the materialized strings
        for (u32 id : ids) {
            CHECK(ix.recs[id].x_prefix == packed_prefix(coord_string(ix, id, true), ix.kappa));
            CHECK(ix.recs[id].y_prefix == packed_prefix(coord_string(ix, id, false), ix.kappa));
        }

        auto ref_less = [&](bool x_side) {
            return [&ix, x_side](u32 a, u32 b) {
                std::string sa = coord_string(ix, a, x_side);
                std::string sb = coord_string(ix, b, x_side);
                if (sa != sb) return sa < sb;
                return a < b;
            };
        };
        std::vector<u32> xs = ids, ys = ids;
        std::sort(xs.begin(), xs.end(), ref_less(true));
        std::sort(ys.begin(), ys.end(), ref_less(false));
        for (size_t r = 0; r < xs.size(); ++r) {
            CHECK(ix.grid.rec_at_x(r) == xs[r]);
            CHECK(ix.grid.rec_at_y(r) == ys[r]);
        }

        // random rectangles against brute force over the reference orders
        for (int q = 0; q < 20; ++q) {
            size_t n = ids.size();
            size_t x1 = rng() % n, x2 = rng() % n;
            size_t y1 = rng() % n, y2 = rng() % n;
            if (x1 > x2) std::swap(x1, x2);
            if (y1 > y2) std::swap(y1, y2);
            std::vector<u32> got;
            ix.grid.report(x1, x2, y1, y2, got);
            std::vector<u32> want;
            for (size_t xr = x1; xr <= x2; ++xr) {
                u32 id = xs[xr];
                size_t yr = std::find(ys.begin(), ys.end(), id) - ys.begin();
                if (yr >= y1 && yr <= y2) want.push_back(id);
            }
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            CHECK(got == want);
        }
    }
}

TEST_CASE("incremental grid insertion matches bulk build") {
    std::mt19937_64 rng(905);
    for (int rep = 0; rep < 12; ++rep) {
        std::string t = random_text(rng, 2 + rng() % 160, rep % 2 ? 2 : 26);
        Index bulk;
        build_grammar(bulk, t);
        finalize_index(bulk);

        Index inc;
        build_grammar(inc, t, 8);
        // same seed chain gives the same grammar
        REQUIRE(inc.seed == bulk.seed);
        std::vector<u32> ids;
        inc.recs.for_each([&](u32 id) { ids.push_back(id); });
        std::shuffle(ids.begin(), ids.end(), rng);
        for (u32 id : ids) grid_insert_record(inc, id);
        inc.grid.validate();

        REQUIRE(inc.grid.size() == bulk.grid.size());
        for (size_t r = 0; r < ids.size(); ++r) {
            CHECK(inc.grid.rec_at_x(r) == bulk.grid.rec_at_x(r));
            CHECK(inc.grid.rec_at_y(r) == bulk.grid.rec_at_y(r));
        }
    }
}

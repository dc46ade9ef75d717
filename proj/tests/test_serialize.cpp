#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rrindex/index.hpp"
#include "rrindex/locate.hpp"
#include "rrindex/oracle.hpp"
#include "rrindex/serialize.hpp"
#include "rrindex/text_access.hpp"
#include "rrindex/update.hpp"

using namespace rrindex;

namespace {

std::string random_text(std::mt19937_64& rng, size_t n, u32 sigma) {
    std::string t(n, '\0');
    for (auto& c : t)
        c = static_cast<char>(sigma <= 26 ? 'a' + rng() % sigma : rng() % sigma);
    return t;
}

// Loaded copy must answer every query the original answers.
void check_same_answers(const Index& a, const Index& b, const std::string& t,
                        std::mt19937_64& rng) {
    REQUIRE(a.text_len == b.text_len);
    CHECK(a.tree_height() == b.tree_height());
    CHECK(extract(b, 1, b.text_len) == t);
    for (int q = 0; q < 12; ++q) {
        u64 pos = 1 + rng() % t.size();
        u64 len = 1 + rng() % std::min<u64>(t.size() - pos + 1, 6);
        std::string p = t.substr(pos - 1, len);
        if (q % 3 == 0) p.push_back('z' + 1); // likely absent
        CHECK(locate(a, p) == locate(b, p));
        u64 i = 1 + rng() % t.size(), j = 1 + rng() % t.size();
        CHECK(lce(a, i, j) == lce(b, i, j));
        CHECK(rlce(a, i, j) == rlce(b, i, j));
    }
}

} // namespace

TEST_CASE("an image reloads into an equivalent index and resaves byte for byte") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 8; ++it) {
        u32 sigma = it % 2 ? 26 : 2;
        std::string t = random_text(rng, 64 + rng() % 800, sigma);
        Index ix = build_index(t, {.seed = static_cast<u64>(it)});
        std::string img = save_index_bytes(ix);
        Index back = load_index_bytes(img);
        CHECK(save_index_bytes(back) == img);
        verify_index(back);
        CHECK(back.seed == ix.seed);
        CHECK(back.w == ix.w);
        CHECK(back.kappa == ix.kappa);
        IndexStats sa = index_stats(ix), sb = index_stats(back);
        CHECK(sa.records == sb.records);
        CHECK(sa.impl_nodes == sb.impl_nodes);
        CHECK(sa.edges == sb.edges);
        check_same_answers(ix, back, t, rng);
    }
}

TEST_CASE("a loaded index keeps working under edits") {
    std::mt19937_64 rng(42);
    std::string t = random_text(rng, 400, 4);
    Index ix = build_index(t, {.seed = 9});
    for (int op = 0; op < 10; ++op) {
        u64 pos = 1 + rng() % (t.size() + 1);
        std::string p = random_text(rng, 1 + rng() % 4, 4);
        t = oracle::splice_insert(t, pos, p);
        insert_text(ix, pos, p);
    }
    Index back = load_index_bytes(save_index_bytes(ix));
    verify_index(back);
    check_same_answers(ix, back, t, rng);

    // keep editing the reloaded copy; it only differs in free slot order
    for (int op = 0; op < 20; ++op) {
        if (rng() % 2 && t.size() > 40) {
            u64 pos = 1 + rng() % t.size();
            u64 len = 1 + rng() % std::min<u64>(t.size() - pos + 1, 5);
            t = oracle::splice_delete(t, pos, len);
            delete_text(back, pos, len);
        } else {
            u64 pos = 1 + rng() % (t.size() + 1);
            std::string p = random_text(rng, 1 + rng() % 4, 4);
            t = oracle::splice_insert(t, pos, p);
            insert_text(back, pos, p);
        }
        CHECK(extract(back, 1, back.text_len) == t);
    }
    verify_index(back);
    std::string p = t.substr(t.size() / 2, 3);
    CHECK(locate(back, p) == oracle::naive_occ(t, p));

    // an image of the edited copy round-trips too
    std::string img = save_index_bytes(back);
    CHECK(save_index_bytes(load_index_bytes(img)) == img);
}

TEST_CASE("damaged images are rejected") {
    std::mt19937_64 rng(43);
    std::string t = random_text(rng, 200, 3);
    Index ix = build_index(t, {});
    std::string img = save_index_bytes(ix);

    SUBCASE("wrong magic or version") {
        std::string bad = img;
        bad[0] ^= 1;
        CHECK_THROWS_AS(load_index_bytes(bad), DataError);
        bad = img;
        bad[4] ^= 0xff;
        CHECK_THROWS_AS(load_index_bytes(bad), DataError);
    }
    SUBCASE("every truncation fails") {
        for (size_t cut : {size_t{0}, size_t{3}, size_t{17}, img.size() / 3,
                           img.size() / 2, img.size() - 9, img.size() - 1})
            CHECK_THROWS_AS(load_index_bytes(img.substr(0, cut)), DataError);
    }
    SUBCASE("trailing bytes fail") {
        CHECK_THROWS_AS(load_index_bytes(img + '\0'), DataError);
    }
    SUBCASE("any flipped byte fails") {
        size_t step = 1 + img.size() / 97;
        for (size_t i = 0; i < img.size(); i += step) {
            std::string bad = img;
            bad[i] ^= 0x40;
            CHECK_THROWS_AS(load_index_bytes(bad), DataError);
        }
    }
    SUBCASE("an empty index has no image") {
        Index empty;
        CHECK_THROWS_AS(save_index_bytes(empty), DataError);
    }
}

TEST_CASE("file save and load round trip") {
    std::mt19937_64 rng(44);
    std::string t = random_text(rng, 300, 26);
    Index ix = build_index(t, {.seed = 5});
    std::string path = "serialize_roundtrip.idx";
    save_index(ix, path);
    Index back = load_index(path);
    CHECK(save_index_bytes(back) == save_index_bytes(ix));
    check_same_answers(ix, back, t, rng);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_index("no_such_file.idx"), DataError);
}

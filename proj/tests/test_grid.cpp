#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rrindex/grid.hpp"

using namespace rrindex;

namespace {

struct ModelPoint {
    u32 rec;
    u32 xh, yh;
};

// reference: points kept in explicit X and Y order vectors
struct Model {
    std::vector<u32> x_order; // rec ids
    std::vector<u32> y_order;

    std::vector<u32> report(size_t x_lo, size_t x_hi, size_t y_lo, size_t y_hi) const {
        std::vector<u32> out;
        for (size_t i = x_lo; i <= x_hi && i < x_order.size(); ++i) {
            u32 rec = x_order[i];
            size_t yr = std::find(y_order.begin(), y_order.end(), rec) - y_order.begin();
            if (y_lo <= yr && yr <= y_hi) out.push_back(rec);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

} // namespace

TEST_CASE("grid reports a small fixed configuration") {
    GridStore g;
    // X order: 10 20 30; Y order: 30 10 20
    std::vector<GridStore::Point> pts(3);
    pts[0].rec = 10; pts[1].rec = 20; pts[2].rec = 30;
    for (auto& p : pts) p.xh = g.append_x(p.rec);
    pts[2].yh = g.append_y(30);
    pts[0].yh = g.append_y(10);
    pts[1].yh = g.append_y(20);
    g.bulk_build(pts);
    g.validate();

    std::vector<u32> out;
    g.report(0, 2, 0, 2, out);
    CHECK(out.size() == 3);
    out.clear();
    g.report(0, 1, 1, 2, out); // x in {10,20}, y in {10,20}
    std::sort(out.begin(), out.end());
    CHECK(out == std::vector<u32>{10, 20});
    out.clear();
    g.report(2, 2, 0, 0, out); // the single point (30, 30)
    CHECK(out == std::vector<u32>{30});
    out.clear();
    g.report(1, 0, 0, 2, out); // empty x range
    CHECK(out.empty());

    CHECK(g.rec_at_x(0) == 10);
    CHECK(g.rec_at_y(0) == 30);
    CHECK(g.x_rank(pts[2].xh) == 2);
    CHECK(g.y_rank(pts[2].yh) == 0);
}

TEST_CASE("grid matches brute force under random insert/erase/report") {
    std::mt19937_64 rng(911);
    GridStore g;
    Model m;
    std::vector<ModelPoint> live;
    u32 next_rec = 1;

    auto check_reports = [&](int count) {
        size_t n = m.x_order.size();
        if (n == 0) return;
        for (int i = 0; i < count; ++i) {
            size_t a = rng() % n, b = rng() % n, c = rng() % n, d = rng() % n;
            size_t xlo = std::min(a, b), xhi = std::max(a, b);
            size_t ylo = std::min(c, d), yhi = std::max(c, d);
            std::vector<u32> got;
            g.report(xlo, xhi, ylo, yhi, got);
            std::sort(got.begin(), got.end());
            REQUIRE(got == m.report(xlo, xhi, ylo, yhi));
        }
    };

    for (int step = 0; step < 3000; ++step) {
        bool grow = live.empty() || (rng() % 100 < 58);
        if (grow) {
            u32 rec = next_rec++;
            size_t xpos = rng() % (m.x_order.size() + 1);
            size_t ypos = rng() % (m.y_order.size() + 1);
            u32 x_after = xpos == 0 ? GridStore::kNil : g.x_handle_at(xpos - 1);
            u32 y_after = ypos == 0 ? GridStore::kNil : g.y_handle_at(ypos - 1);
            auto h = g.insert(rec, x_after, y_after);
            m.x_order.insert(m.x_order.begin() + xpos, rec);
            m.y_order.insert(m.y_order.begin() + ypos, rec);
            live.push_back({rec, h.x, h.y});
        } else {
            size_t i = rng() % live.size();
            g.erase(live[i].xh, live[i].yh);
            m.x_order.erase(std::find(m.x_order.begin(), m.x_order.end(), live[i].rec));
            m.y_order.erase(std::find(m.y_order.begin(), m.y_order.end(), live[i].rec));
            live.erase(live.begin() + i);
        }
        REQUIRE(g.size() == live.size());
        if (step % 61 == 0) {
            g.validate();
            check_reports(8);
        }
    }
    g.validate();
    check_reports(50);

    // drain to empty
    while (!live.empty()) {
        g.erase(live.back().xh, live.back().yh);
        live.pop_back();
    }
    CHECK(g.size() == 0);
    g.validate();
}

TEST_CASE("grid bulk build agrees with incremental inserts") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 20; ++round) {
        size_t n = 1 + rng() % 200;
        // random permutation for the y order of records 0..n-1 (x order = id)
        std::vector<u32> yperm(n);
        for (u32 i = 0; i < n; ++i) yperm[i] = i;
        std::shuffle(yperm.begin(), yperm.end(), rng);
        std::vector<size_t> yrank(n);
        for (size_t r = 0; r < n; ++r) yrank[yperm[r]] = r;

        GridStore bulk;
        std::vector<GridStore::Point> pts(n);
        for (u32 i = 0; i < n; ++i) { pts[i].rec = i; pts[i].xh = bulk.append_x(i); }
        for (u32 r = 0; r < n; ++r) pts[yperm[r]].yh = bulk.append_y(yperm[r]);
        bulk.bulk_build(pts);
        bulk.validate();

        GridStore inc;
        std::vector<u32> xhs, yhs_by_rank;
        for (u32 i = 0; i < n; ++i) {
            // records arrive in x order; splice into y order at yrank[i]
            size_t pos = 0;
            for (u32 prev = 0; prev < i; ++prev) pos += yrank[prev] < yrank[i];
            u32 y_after = pos == 0 ? GridStore::kNil : yhs_by_rank[pos - 1];
            auto h = inc.insert(i, i == 0 ? GridStore::kNil : xhs.back(), y_after);
            xhs.push_back(h.x);
            yhs_by_rank.insert(yhs_by_rank.begin() + pos, h.y);
        }
        inc.validate();

        for (int q = 0; q < 30; ++q) {
            size_t a = rng() % n, b = rng() % n, c = rng() % n, d = rng() % n;
            std::vector<u32> r1, r2;
            bulk.report(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d), r1);
            inc.report(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d), r2);
            std::sort(r1.begin(), r1.end());
            std::sort(r2.begin(), r2.end());
            REQUIRE(r1 == r2);
        }
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "antilde/errors.hpp"
#include "antilde/finite_geometry.hpp"

#include <algorithm>
#include <set>

using namespace antilde;

namespace {

// Brute-force oracle: a subspace is the sorted set of its vectors, each
// vector encoded base q. Shares nothing with the RREF machinery.
using VectorSet = std::vector<int>;

std::vector<int> decode(int code, int len, int q) {
    std::vector<int> v(static_cast<std::size_t>(len));
    for (int i = len - 1; i >= 0; --i) {
        v[static_cast<std::size_t>(i)] = code % q;
        code /= q;
    }
    return v;
}

int encode(const std::vector<int>& v, int q) {
    int code = 0;
    for (int x : v) code = code * q + x;
    return code;
}

VectorSet span_set(const std::vector<std::vector<int>>& gens, int q) {
    const int len = static_cast<int>(gens[0].size());
    std::set<int> members{0};
    bool grew = true;
    while (grew) {
        grew = false;
        const std::vector<int> current(members.begin(), members.end());
        for (int c : current)
            for (const auto& g : gens) {
                auto v = decode(c, len, q);
                for (int i = 0; i < len; ++i) v[i] = (v[i] + g[i]) % q;
                grew |= members.insert(encode(v, q)).second;
            }
    }
    return {members.begin(), members.end()};
}

std::set<VectorSet> brute_force_subspaces(int n, int q, int r) {
    const int len = n + 1;
    int total = 1;
    for (int i = 0; i < len; ++i) total *= q;
    std::set<VectorSet> out;
    std::vector<int> pick(static_cast<std::size_t>(r), 1);
    auto rec = [&](auto&& self, int k) -> void {
        if (k == r) {
            std::vector<std::vector<int>> gens;
            for (int c : pick) gens.push_back(decode(c, len, q));
            auto s = span_set(gens, q);
            if (static_cast<int>(s.size()) == int_pow(q, r)) out.insert(s);
            return;
        }
        for (int c = 1; c < total; ++c) {
            pick[static_cast<std::size_t>(k)] = c;
            self(self, k + 1);
        }
    };
    rec(rec, 0);
    return out;
}

VectorSet vectors_of(const Subspace& s, int q) {
    std::vector<std::vector<int>> gens;
    for (int i = 0; i < s.dim(); ++i) gens.push_back(s.row(i));
    return span_set(gens, q);
}

// q-Pascal recursion, independent of the product formula.
std::int64_t q_pascal(int n, int k, int q) {
    if (k == 0 || k == n) return 1;
    if (k < 0 || k > n) return 0;
    return q_pascal(n - 1, k - 1, q) + int_pow(q, k) * q_pascal(n - 1, k, q);
}

} // namespace

TEST_CASE("subspace counts match the point count formula") {
    CHECK(Geometry({2, 2}).points().size() == 7);
    CHECK(Geometry({2, 3}).points().size() == 13);
    CHECK(Geometry({2, 2}).subspaces(2).size() == 7);
}

TEST_CASE("enumeration agrees with brute-force span enumeration") {
    for (auto [n, q] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
        Geometry g({n, q});
        for (int r = 1; r <= n; ++r) {
            CAPTURE(n);
            CAPTURE(q);
            CAPTURE(r);
            const auto oracle = brute_force_subspaces(n, q, r);
            std::set<VectorSet> ours;
            for (const auto& s : g.subspaces(r)) ours.insert(vectors_of(s, q));
            CHECK(ours == oracle);
            CHECK(static_cast<std::int64_t>(g.subspaces(r).size()) == gaussian_binomial(n + 1, r, q));
            CHECK(gaussian_binomial(n + 1, r, q) == q_pascal(n + 1, r, q));
        }
    }
}

TEST_CASE("canonical index is lexicographic and round-trips") {
    for (auto [n, q] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
        Geometry g({n, q});
        for (int r = 1; r <= n; ++r) {
            const auto& list = g.subspaces(r);
            for (std::size_t i = 0; i < list.size(); ++i) {
                CHECK(list[i].index() == static_cast<int>(i));
                if (i > 0) CHECK(list[i - 1].basis() < list[i].basis());
                gf::Rows rows;
                for (int k = 0; k < r; ++k) rows.push_back(list[i].row(k));
                // scramble the generators: add row 0 into every other row, reverse
                for (std::size_t k = 1; k < rows.size(); ++k)
                    for (int c = 0; c < g.ambient(); ++c) rows[k][c] += rows[0][c] * (q - 1);
                std::reverse(rows.begin(), rows.end());
                CHECK(*g.span(rows) == list[i]);
            }
        }
    }
}

TEST_CASE("parameter errors") {
    Geometry g({2, 2});
    CHECK_THROWS_AS(g.subspaces(0), ParameterError);
    CHECK_THROWS_AS(g.subspaces(3), ParameterError);
    CHECK_THROWS_AS(Geometry({2, 4}), ParameterError);
    CHECK_THROWS_AS(Geometry({0, 2}), ParameterError);
    CHECK_THROWS_AS(g.incident(g.points()[0], g.points()[0]), ParameterError);
}

TEST_CASE("incidence") {
    Geometry g({2, 2});
    const auto& p = g.points()[3];
    int lines_through = 0;
    for (const auto& line : g.hyperplanes()) {
        const bool inc = g.incident(p, line);
        CHECK(inc == g.incident(line, p));
        lines_through += inc;
    }
    CHECK(lines_through == 3);
    CHECK_FALSE(g.incident(g.points()[0], g.points()[1]));
    const auto& line = g.hyperplanes()[0];
    for (const auto& q : g.points())
        if (g.contains(line, q)) CHECK(g.incident(q, line));
}

TEST_CASE("intersection") {
    Geometry g({2, 3});
    const auto& lines = g.hyperplanes();
    for (const auto& p : g.points())
        for (const auto& l : lines) {
            const auto meet = g.intersect(p, l);
            if (g.contains(l, p)) {
                REQUIRE(meet.has_value());
                CHECK(*meet == p);
            } else {
                CHECK_FALSE(meet.has_value());
            }
        }
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto meet = g.intersect(lines[i], lines[j]);
            REQUIRE(meet.has_value());
            CHECK(meet->dim() == 1);
            CHECK(g.contains(lines[i], *meet));
            CHECK(g.contains(lines[j], *meet));
        }
    // n = 3: two planes meet in a line, oracle via vector sets
    Geometry g3({3, 2});
    const auto& planes = g3.hyperplanes();
    for (std::size_t i = 0; i < planes.size(); ++i)
        for (std::size_t j = 0; j < planes.size(); ++j) {
            const auto a = vectors_of(planes[i], 2), b = vectors_of(planes[j], 2);
            VectorSet both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
            CHECK(vectors_of(*g3.intersect(planes[i], planes[j]), 2) == both);
        }
}

TEST_CASE("points off a hyperplane") {
    CHECK(Geometry({2, 2}).count_points_off_hyperplane() == 4);
    CHECK(Geometry({2, 3}).count_points_off_hyperplane() == 9);
    CHECK(Geometry({3, 2}).count_points_off_hyperplane() == 8);
}

TEST_CASE("chambers") {
    CHECK(Geometry({2, 2}).chambers().size() == 21);
    CHECK(Geometry({2, 3}).chambers().size() == 52);
    CHECK(Geometry({1, 2}).chambers().size() == 3);
    CHECK(flag_count(2, 2) == 21);
    CHECK(flag_count(2, 3) == 52);

    // brute force: every point/line pair checked by vector-set inclusion
    for (auto [n, q] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
        Geometry g({n, q});
        std::int64_t brute = 0;
        if (n == 2) {
            for (const auto& p : g.points())
                for (const auto& l : g.hyperplanes()) {
                    const auto vp = vectors_of(p, q), vl = vectors_of(l, q);
                    brute += std::includes(vl.begin(), vl.end(), vp.begin(), vp.end());
                }
        } else {
            for (const auto& p : g.points())
                for (const auto& l : g.subspaces(2))
                    for (const auto& h : g.subspaces(3)) {
                        const auto vp = vectors_of(p, q), vl = vectors_of(l, q), vh = vectors_of(h, q);
                        brute += std::includes(vl.begin(), vl.end(), vp.begin(), vp.end()) &&
                                 std::includes(vh.begin(), vh.end(), vl.begin(), vl.end());
                    }
        }
        const auto chambers = g.chambers();
        CHECK(static_cast<std::int64_t>(chambers.size()) == brute);
        CHECK(brute == flag_count(n, q));
        for (const auto& c : chambers)
            for (int i = 0; i + 1 < n; ++i) CHECK(g.contains(c.flag[i + 1], c.flag[i]));
    }
}

TEST_CASE("duality is an incidence-reversing bijection") {
    for (auto [n, q] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
        Geometry g({n, q});
        for (int r = 1; r <= n; ++r) {
            std::set<int> image;
            for (const auto& s : g.subspaces(r)) {
                const auto d = g.dual(s);
                CHECK(d.dim() == n + 1 - r);
                CHECK(g.dual(d) == s);
                image.insert(d.index());
            }
            CHECK(image.size() == g.subspaces(n + 1 - r).size());
        }
        for (int r = 1; r < n; ++r)
            for (const auto& u : g.subspaces(r))
                for (const auto& v : g.subspaces(r + 1))
                    CHECK(g.contains(v, u) == g.contains(g.dual(u), g.dual(v)));
    }
}

TEST_CASE("export table format") {
    Geometry g({2, 2});
    const std::string table = g.export_table();
    CHECK(table.rfind("0\t1\t0 0 1\n1\t1\t0 1 0\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 14);
    CHECK(g.table_checksum().size() == 64);
    CHECK(g.table_checksum() == Geometry({2, 2}).table_checksum());
    CHECK(g.table_checksum() != Geometry({2, 3}).table_checksum());
}

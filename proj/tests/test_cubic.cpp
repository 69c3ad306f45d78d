#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "modcubic/cubic.hpp"

using namespace modcubic;

namespace {

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = lo; n <= hi; ++n)
        if (is_prime(n)) out.push_back(n);
    return out;
}

// Direct count of x with f(x+u) - f(x) = v, no symbols involved.
int brute_x_count(const ReducedCubic& cur, std::uint64_t u, std::uint64_t v) {
    const Modulus& m = cur.modulus();
    int count = 0;
    for (std::uint64_t x = 0; x < m.value(); ++x)
        if (m.sub(cur.eval(m.add(x, u)), cur.eval(x)) == v) ++count;
    return count;
}

}  // namespace

TEST_CASE("curve construction and eval") {
    const Modulus m7(7);
    CHECK_THROWS_AS(ReducedCubic(m7, 0, 1), std::domain_error);
    CHECK_THROWS_AS(ReducedCubic(m7, 14, 1), std::domain_error);
    CHECK_THROWS_AS(GeneralCubic(m7, 7, 1, 2, 3), std::domain_error);
    const ReducedCubic cube7(m7, 1, 0);
    CHECK(cube7.eval(0) == 0);
    CHECK(cube7.eval(2) == 1);  // 8 mod 7
    const ReducedCubic cube5(Modulus(5), 1, 0);
    CHECK(cube5.eval(3) == 2);  // 27 mod 5
}

TEST_CASE("all_points enumerates the curve") {
    const ReducedCubic cur(Modulus(5), 1, 0);
    const auto pts = cur.all_points();
    const std::vector<CurvePoint> expect = {
        {0, 0}, {1, 1}, {2, 3}, {3, 2}, {4, 4}};
    CHECK(pts == expect);
    for (const std::uint64_t p : {7ull, 11ull, 13ull}) {
        const ReducedCubic c(Modulus(p), 2, 3);
        const auto all = c.all_points();
        REQUIRE(all.size() == p);
        for (const CurvePoint& pt : all) CHECK(c.eval(pt.x) == pt.y);
    }
}

TEST_CASE("normalize examples") {
    const Modulus m7(7);
    {
        const NormalizedCubic n = normalize(GeneralCubic(m7, 1, 0, 4, 0));
        CHECK(n.curve.a() == 1);
        CHECK(n.curve.c() == 4);
        CHECK(n.shift.dx == 0);
        CHECK(n.shift.dy == 0);
    }
    {
        const NormalizedCubic n = normalize(GeneralCubic(m7, 1, 3, 0, 0));
        CHECK(n.curve.a() == 1);
        CHECK(n.curve.c() == 4);
        CHECK(n.shift.dx == 1);
        CHECK(n.shift.dy == 2);
    }
}

TEST_CASE("normalize maps the point set exactly") {
    std::mt19937_64 gen(3);
    for (const std::uint64_t p : primes_in(5, 50)) {
        const Modulus m(p);
        for (int trial = 0; trial < 10; ++trial) {
            const GeneralCubic g(m, 1 + gen() % (p - 1), gen() % p, gen() % p,
                                 gen() % p);
            const NormalizedCubic n = normalize(g);
            for (std::uint64_t x = 0; x < p; ++x) {
                const std::uint64_t y = g.eval(x);
                const std::uint64_t tx = m.add(x, n.shift.dx);
                const std::uint64_t ty = m.sub(y, n.shift.dy);
                if (n.curve.eval(tx) != ty)
                    FAIL("translation misses the reduced curve at p="
                         << p << " x=" << x);
            }
        }
    }
}

TEST_CASE("difference_rhs examples") {
    const ReducedCubic cur(Modulus(7), 1, 0);
    CHECK(difference_rhs(cur, 1, 0) == 2);  // -inv(3) = -5 = 2 mod 7
    CHECK(difference_rhs(cur, 2, 2) == 0);
    CHECK_THROWS_AS(difference_rhs(cur, 0, 1), std::domain_error);
    CHECK_THROWS_AS(difference_rhs(cur, 7, 1), std::domain_error);
}

TEST_CASE("difference_rhs forced zero when 4v = a u^3 + 4 c u") {
    std::mt19937_64 gen(5);
    for (const std::uint64_t p : {5ull, 7ull, 13ull, 101ull}) {
        const Modulus m(p);
        for (int trial = 0; trial < 20; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            const std::uint64_t u = 1 + gen() % (p - 1);
            const std::uint64_t au3 =
                m.mul(cur.a(), m.mul(m.mul(u, u), u));
            const std::uint64_t v = m.mul(
                m.add(au3, m.mul(m.mul(4, cur.c()), u)), inv_mod(4, m));
            CHECK(difference_rhs(cur, u, v) == 0);
        }
    }
}

TEST_CASE("pair_condition examples") {
    const ReducedCubic c7(Modulus(7), 1, 0);
    CHECK(pair_condition(c7, 1, 0) == 1);
    CHECK(pair_condition(c7, 2, 2) == 0);
    const ReducedCubic c5(Modulus(5), 1, 0);
    CHECK(pair_condition(c5, 1, 1) == 1);
    CHECK_THROWS_AS(pair_condition(c7, 0, 3), std::domain_error);
}

TEST_CASE("pair_condition equals the symbol of difference_rhs") {
    std::mt19937_64 gen(9);
    for (const std::uint64_t p : primes_in(5, 61)) {
        const Modulus m(p);
        for (std::uint64_t a = 1; a < p; ++a) {
            const std::uint64_t cs[] = {0, 1, p - 1, gen() % p};
            for (const std::uint64_t c : cs) {
                const ReducedCubic cur(m, a, c);
                for (std::uint64_t u = 1; u < p; ++u)
                    for (std::uint64_t v = 0; v < p; ++v)
                        if (pair_condition(cur, u, v) !=
                            legendre(static_cast<std::int64_t>(
                                         difference_rhs(cur, u, v)),
                                     m))
                            FAIL("identity broken at p=" << p << " a=" << a
                                                         << " c=" << c
                                                         << " u=" << u
                                                         << " v=" << v);
            }
        }
    }
    // sampled at larger moduli
    for (const std::uint64_t p : {1009ull, 9973ull}) {
        const Modulus m(p);
        for (int trial = 0; trial < 500; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            const std::uint64_t u = 1 + gen() % (p - 1);
            const std::uint64_t v = gen() % p;
            CHECK(pair_condition(cur, u, v) ==
                  legendre(static_cast<std::int64_t>(
                               difference_rhs(cur, u, v)),
                           m));
        }
    }
}

TEST_CASE("reduced_parity_condition examples and identity") {
    const ReducedCubic c7(Modulus(7), 1, 0);
    CHECK(reduced_parity_condition(c7, 1, 1) == 0);  // u'^3 - v' = 0
    CHECK(reduced_parity_condition(c7, 1, 0) == 1);
    CHECK_THROWS_AS(reduced_parity_condition(c7, 0, 1), std::domain_error);
    std::mt19937_64 gen(13);
    for (const std::uint64_t p : primes_in(5, 37)) {
        const Modulus m(p);
        for (int trial = 0; trial < 6; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            for (std::uint64_t up = 1; up < p; ++up)
                for (std::uint64_t vp = 0; vp < p; ++vp)
                    if (reduced_parity_condition(cur, up, vp) !=
                        pair_condition(cur, 2 * up % p, 2 * vp % p))
                        FAIL("parity identity broken at p=" << p);
        }
    }
}

TEST_CASE("count_x_solutions matches brute force") {
    const ReducedCubic c7(Modulus(7), 1, 0);
    CHECK(count_x_solutions(c7, 1, 0) == 2);
    CHECK(count_x_solutions(c7, 2, 2) == 1);
    std::mt19937_64 gen(17);
    for (const std::uint64_t p : primes_in(5, 31)) {
        const Modulus m(p);
        const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
        for (std::uint64_t u = 1; u < p; ++u)
            for (std::uint64_t v = 0; v < p; ++v) {
                const int count = count_x_solutions(cur, u, v);
                if (count != brute_x_count(cur, u, v))
                    FAIL("count off at p=" << p << " u=" << u << " v=" << v);
                if (pair_condition(cur, u, v) == -1) CHECK(count == 0);
            }
    }
    // sampled larger
    const Modulus m(9973);
    for (int trial = 0; trial < 20; ++trial) {
        const ReducedCubic cur(m, 1 + gen() % 9972, gen() % 9973);
        const std::uint64_t u = 1 + gen() % 9972;
        const std::uint64_t v = gen() % 9973;
        CHECK(count_x_solutions(cur, u, v) == brute_x_count(cur, u, v));
    }
}

TEST_CASE("solve_pair recovers the solutions") {
    const ReducedCubic c7(Modulus(7), 1, 0);
    CHECK(solve_pair(c7, 1, 0) == std::vector<std::uint64_t>{1, 5});
    CHECK(solve_pair(c7, 2, 2) == std::vector<std::uint64_t>{6});
    std::mt19937_64 gen(19);
    for (const std::uint64_t p : primes_in(5, 101)) {
        const Modulus m(p);
        const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
        for (int trial = 0; trial < 50; ++trial) {
            const std::uint64_t u = 1 + gen() % (p - 1);
            const std::uint64_t v = gen() % p;
            const auto xs = solve_pair(cur, u, v);
            CHECK(static_cast<int>(xs.size()) ==
                  count_x_solutions(cur, u, v));
            for (const std::uint64_t x : xs)
                if (m.sub(cur.eval(m.add(x, u)), cur.eval(x)) != v)
                    FAIL("solve_pair returned a non-solution at p=" << p);
        }
    }
}

TEST_CASE("detect_in_box examples") {
    const ReducedCubic c7(Modulus(7), 1, 0);
    CHECK_FALSE(detect_in_box(c7, 1).has_value());
    const auto w = detect_in_box(c7, 2);
    REQUIRE(w.has_value());
    CHECK(w->p1 == CurvePoint{1, 1});
    CHECK(w->p2 == CurvePoint{2, 1});
    CHECK(w->u == 1);
    CHECK(w->v_signed == 0);
    CHECK(witness_ok(c7, *w));

    const ReducedCubic c5(Modulus(5), 1, 0);
    const auto w5 = detect_in_box(c5, 2);
    REQUIRE(w5.has_value());
    CHECK(witness_ok(c5, *w5));

    CHECK_THROWS_AS(detect_in_box(c7, 0), std::invalid_argument);
    CHECK_THROWS_AS(detect_in_box(c7, 8), std::invalid_argument);
}

TEST_CASE("detector agrees with the brute oracle") {
    std::mt19937_64 gen(23);
    for (const std::uint64_t p : primes_in(5, 53)) {
        const Modulus m(p);
        for (int trial = 0; trial < 3; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            for (std::uint64_t side = 1; side <= p; ++side) {
                const auto fast = detect_in_box(cur, side);
                const auto brute = brute_detect_in_box(cur, side);
                if (fast.has_value() != brute.has_value())
                    FAIL("presence mismatch at p=" << p << " side=" << side);
                if (fast) CHECK(witness_ok(cur, *fast));
                if (brute) CHECK(witness_ok(cur, *brute));
            }
        }
    }
}

TEST_CASE("detector returns the lexicographic minimum witness") {
    // Independent tie-break oracle: enumerate every valid representation of
    // every point pair that fits (orientation, wrap direction), rank by
    // (u, |w|, sign with + first, p1.x) and demand detect's choice is the
    // minimum.
    std::mt19937_64 gen(37);
    for (const std::uint64_t p : primes_in(5, 31)) {
        const Modulus m(p);
        for (int trial = 0; trial < 4; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            const auto pts = cur.all_points();
            for (std::uint64_t side = 2; side <= p; ++side) {
                using Rank = std::tuple<std::uint64_t, std::uint64_t, int,
                                        std::uint64_t>;
                std::optional<Rank> best;
                for (std::size_t i = 0; i < pts.size(); ++i)
                    for (std::size_t j = 0; j < pts.size(); ++j) {
                        if (i == j) continue;
                        const std::uint64_t u = m.sub(pts[j].x, pts[i].x);
                        if (u < 1 || u > side - 1) continue;
                        const std::uint64_t v = m.sub(pts[j].y, pts[i].y);
                        for (const std::int64_t w :
                             {static_cast<std::int64_t>(v),
                              static_cast<std::int64_t>(v) -
                                  static_cast<std::int64_t>(p)}) {
                            const std::uint64_t aw = std::llabs(w);
                            if (aw > side - 1) continue;
                            const Rank r{u, aw, w < 0 ? 1 : 0, pts[i].x};
                            if (!best || r < *best) best = r;
                        }
                    }
                const auto witness = detect_in_box(cur, side);
                REQUIRE(witness.has_value() == best.has_value());
                if (!witness) continue;
                const Rank got{witness->u,
                               static_cast<std::uint64_t>(
                                   std::llabs(witness->v_signed)),
                               witness->v_signed < 0 ? 1 : 0, witness->p1.x};
                if (got != *best)
                    FAIL("tie-break mismatch at p=" << p
                                                    << " side=" << side);
            }
        }
    }
}

TEST_CASE("min_box_side examples and minimality") {
    CHECK(min_box_side(ReducedCubic(Modulus(7), 1, 0)).h_min == 2);
    CHECK(min_box_side(ReducedCubic(Modulus(5), 1, 0)).h_min == 2);
    std::mt19937_64 gen(29);
    for (const std::uint64_t p : primes_in(5, 100)) {
        const Modulus m(p);
        for (int trial = 0; trial < 5; ++trial) {
            const ReducedCubic cur(m, 1 + gen() % (p - 1), gen() % p);
            const MinBoxResult res = min_box_side(cur);
            CHECK(res.h_min == brute_min_box_side(cur));
            CHECK(witness_ok(cur, res.witness));
            CHECK(detect_in_box(cur, res.h_min).has_value());
            if (res.h_min > 1)
                CHECK_FALSE(detect_in_box(cur, res.h_min - 1).has_value());
        }
    }
}

TEST_CASE("brute_min_box_side direct examples") {
    CHECK(brute_min_box_side(ReducedCubic(Modulus(7), 1, 0)) == 2);
    CHECK(brute_min_box_side(ReducedCubic(Modulus(5), 1, 0)) == 2);
}

TEST_CASE("translation leaves the minimal box side unchanged") {
    std::mt19937_64 gen(31);
    const auto ps = primes_in(5, 100);
    for (int trial = 0; trial < 25; ++trial) {
        const std::uint64_t p = ps[gen() % ps.size()];
        const Modulus m(p);
        const GeneralCubic g(m, 1 + gen() % (p - 1), gen() % p, gen() % p,
                             gen() % p);
        const std::uint64_t general_side =
            min_box_side_of_points(p, g.all_points());
        CHECK(general_side == min_box_side(normalize(g).curve).h_min);
    }
}

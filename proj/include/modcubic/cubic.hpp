#pragma once

// Curves y = a*x^3 + c*x (mod p), the quadratic-residue criterion for two
// curve points at offset (u, v), and exact detection of two points inside an
// H x H box. Boxes are cyclic: a box anchored at (X, Y) with side H covers
// the residues X+1 .. X+H in each coordinate, windows may wrap past p.
//
// The fast detector rests on one identity: two curve points with
// x2 = x1 + u and y2 = y1 + v exist iff (2x+u)^2 = R (mod p) is solvable,
// where R is difference_rhs(u, v). Solvability is a Legendre-symbol
// question, so the detector needs O(H^2 log p) work instead of an O(p^2)
// pair scan. Brute-force counterparts of each search are kept alongside as
// independent oracles.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "modcubic/modarith.hpp"

namespace modcubic {

struct CurvePoint {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    bool operator==(const CurvePoint&) const = default;
};

class ReducedCubic {
public:
    ReducedCubic(const Modulus& m, std::uint64_t a, std::uint64_t c)
        : m_(m), a_(m.reduce(a)), c_(m.reduce(c)) {
        if (a_ == 0)
            throw std::domain_error(
                "leading coefficient rejected: a is divisible by the "
                "modulus");
    }

    const Modulus& modulus() const { return m_; }
    std::uint64_t a() const { return a_; }
    std::uint64_t c() const { return c_; }

    std::uint64_t eval(std::uint64_t x) const {
        x = m_.reduce(x);
        const std::uint64_t x2 = m_.mul(x, x);
        return m_.add(m_.mul(a_, m_.mul(x2, x)), m_.mul(c_, x));
    }

    // One point per x, in x order.
    std::vector<CurvePoint> all_points() const {
        std::vector<CurvePoint> pts;
        pts.reserve(m_.value());
        for (std::uint64_t x = 0; x < m_.value(); ++x)
            pts.push_back({x, eval(x)});
        return pts;
    }

private:
    Modulus m_;
    std::uint64_t a_, c_;
};

class GeneralCubic {
public:
    GeneralCubic(const Modulus& m, std::uint64_t a, std::uint64_t b,
                 std::uint64_t c, std::uint64_t d)
        : m_(m),
          a_(m.reduce(a)),
          b_(m.reduce(b)),
          c_(m.reduce(c)),
          d_(m.reduce(d)) {
        if (a_ == 0)
            throw std::domain_error(
                "leading coefficient rejected: a is divisible by the "
                "modulus");
    }

    const Modulus& modulus() const { return m_; }
    std::uint64_t a() const { return a_; }
    std::uint64_t b() const { return b_; }
    std::uint64_t c() const { return c_; }
    std::uint64_t d() const { return d_; }

    std::uint64_t eval(std::uint64_t x) const {
        x = m_.reduce(x);
        const std::uint64_t x2 = m_.mul(x, x);
        const std::uint64_t x3 = m_.mul(x2, x);
        return m_.add(m_.add(m_.mul(a_, x3), m_.mul(b_, x2)),
                      m_.add(m_.mul(c_, x), d_));
    }

    std::vector<CurvePoint> all_points() const {
        std::vector<CurvePoint> pts;
        pts.reserve(m_.value());
        for (std::uint64_t x = 0; x < m_.value(); ++x)
            pts.push_back({x, eval(x)});
        return pts;
    }

private:
    Modulus m_;
    std::uint64_t a_, b_, c_, d_;
};

// (x, y) on the general curve maps to (x + dx, y - dy) on its reduced form.
struct Translation {
    std::uint64_t dx = 0;
    std::uint64_t dy = 0;
};

struct NormalizedCubic {
    ReducedCubic curve;
    Translation shift;
};

// Depress the cubic: substituting x -> x - dx with dx = b/(3a) kills the
// quadratic term and leaves c' = c - b^2/(3a); dy is the constant term that
// remains. Coordinate shifts do not change gaps, so box statistics carry
// over unchanged.
inline NormalizedCubic normalize(const GeneralCubic& g) {
    const Modulus& m = g.modulus();
    const std::uint64_t inv3a = inv_mod(m.mul(3, g.a()), m);
    const std::uint64_t dx = m.mul(g.b(), inv3a);
    const std::uint64_t b2 = m.mul(g.b(), g.b());
    const std::uint64_t c2 = m.sub(g.c(), m.mul(b2, inv3a));
    const std::uint64_t dx2 = m.mul(dx, dx);
    const std::uint64_t dx3 = m.mul(dx2, dx);
    const std::uint64_t dy =
        m.sub(m.add(m.mul(g.b(), dx2), g.d()),
              m.add(m.mul(g.a(), dx3), m.mul(g.c(), dx)));
    return {ReducedCubic(m, g.a(), c2), Translation{dx, dy}};
}

// R with (2x + u)^2 = R (mod p) characterising the x at which the curve
// gains v over a step of u: R = 4/(3au) * v - u^2/3 - 4c/(3a).
inline std::uint64_t difference_rhs(const ReducedCubic& cur, std::uint64_t u,
                                    std::uint64_t v) {
    const Modulus& m = cur.modulus();
    u = m.reduce(u);
    v = m.reduce(v);
    if (u == 0)
        throw std::domain_error(
            "difference_rhs: x-offset u is divisible by the modulus");
    const std::uint64_t inv3 = inv_mod(3, m);
    const std::uint64_t inva = inv_mod(cur.a(), m);
    const std::uint64_t invu = inv_mod(u, m);
    const std::uint64_t t1 =
        m.mul(m.mul(m.mul(m.mul(4, inv3), v), inva), invu);
    const std::uint64_t t2 = m.mul(inv3, m.mul(u, u));
    const std::uint64_t t3 = m.mul(m.mul(m.mul(4, inv3), inva), cur.c());
    return m.sub(m.sub(t1, t2), t3);
}

// The four Legendre symbols whose product decides solvability, kept apart
// so callers can show the factorisation.
struct ConditionFactors {
    int minus_three = 0;
    int a = 0;
    int u = 0;
    int poly = 0;
    std::uint64_t poly_value = 0;  // a*u^3 + 4*c*u - 4*v reduced mod p

    int product() const { return minus_three * a * u * poly; }
};

inline ConditionFactors pair_condition_factors(const ReducedCubic& cur,
                                               std::uint64_t u,
                                               std::uint64_t v) {
    const Modulus& m = cur.modulus();
    u = m.reduce(u);
    v = m.reduce(v);
    if (u == 0)
        throw std::domain_error(
            "pair_condition: x-offset u is divisible by the modulus");
    const std::uint64_t u2 = m.mul(u, u);
    const std::uint64_t au3 = m.mul(cur.a(), m.mul(u2, u));
    const std::uint64_t poly =
        m.sub(m.add(au3, m.mul(m.mul(4, cur.c()), u)), m.mul(4, v));
    ConditionFactors f;
    f.minus_three = legendre(-3, m);
    f.a = legendre(static_cast<std::int64_t>(cur.a()), m);
    f.u = legendre(static_cast<std::int64_t>(u), m);
    f.poly = legendre(static_cast<std::int64_t>(poly), m);
    f.poly_value = poly;
    return f;
}

// (-3/p)(a/p)(u/p)((a u^3 + 4cu - 4v)/p); equals legendre(difference_rhs).
// +1: two x solutions, 0: one, -1: none.
inline int pair_condition(const ReducedCubic& cur, std::uint64_t u,
                          std::uint64_t v) {
    return pair_condition_factors(cur, u, v).product();
}

// The even-offset variant: with u = 2u', v = 2v' the symbol of 8 cancels
// and the product collapses to (-3/p)(a/p)(u'/p)((a u'^3 + c u' - v')/p).
inline int reduced_parity_condition(const ReducedCubic& cur, std::uint64_t up,
                                    std::uint64_t vp) {
    const Modulus& m = cur.modulus();
    up = m.reduce(up);
    vp = m.reduce(vp);
    if (up == 0)
        throw std::domain_error(
            "reduced_parity_condition: u' is divisible by the modulus");
    const std::uint64_t up2 = m.mul(up, up);
    const std::uint64_t poly =
        m.sub(m.add(m.mul(cur.a(), m.mul(up2, up)), m.mul(cur.c(), up)), vp);
    return legendre(-3, m) * legendre(static_cast<std::int64_t>(cur.a()), m) *
           legendre(static_cast<std::int64_t>(up), m) *
           legendre(static_cast<std::int64_t>(poly), m);
}

// Number of x with eval(x + u) - eval(x) = v (mod p); always 1 + condition.
inline int count_x_solutions(const ReducedCubic& cur, std::uint64_t u,
                             std::uint64_t v) {
    return 1 + pair_condition(cur, u, v);
}

// All x with eval(x + u) - eval(x) = v, recovered as x = (r - u)/2 from the
// square roots r of difference_rhs. Sorted ascending.
inline std::vector<std::uint64_t> solve_pair(const ReducedCubic& cur,
                                             std::uint64_t u,
                                             std::uint64_t v) {
    const Modulus& m = cur.modulus();
    const std::uint64_t rhs = difference_rhs(cur, u, v);
    const auto roots = sqrt_mod(rhs, m);
    if (!roots) return {};
    const std::uint64_t inv2 = inv_mod(2, m);
    const std::uint64_t ur = m.reduce(u);
    std::vector<std::uint64_t> xs;
    xs.push_back(m.mul(m.sub(roots->first, ur), inv2));
    if (roots->second != roots->first)
        xs.push_back(m.mul(m.sub(roots->second, ur), inv2));
    std::sort(xs.begin(), xs.end());
    return xs;
}

// Two distinct curve points plus the box that holds them.
struct BoxWitness {
    CurvePoint p1, p2;
    std::uint64_t u = 0;       // p2.x - p1.x mod p, in [1, side-1]
    std::int64_t v_signed = 0; // y offset as the short signed gap
    std::uint64_t anchor_x = 0;
    std::uint64_t anchor_y = 0;
    std::uint64_t side = 0;
};

namespace detail {

// residue t inside the cyclic length-len window starting at start?
inline bool in_window(std::uint64_t start, std::uint64_t len, std::uint64_t t,
                      std::uint64_t p) {
    return (t + p - start) % p < len;
}

inline BoxWitness make_witness(const ReducedCubic& cur, std::uint64_t x,
                               std::uint64_t u, std::int64_t w,
                               std::uint64_t side) {
    const Modulus& m = cur.modulus();
    const std::uint64_t p = m.value();
    BoxWitness bw;
    bw.p1 = {x, cur.eval(x)};
    bw.p2 = {m.add(x, u), cur.eval(m.add(x, u))};
    bw.u = u;
    bw.v_signed = w;
    bw.side = side;
    bw.anchor_x = (x + p - 1) % p;
    const std::uint64_t y_start = w >= 0 ? bw.p1.y : bw.p2.y;
    bw.anchor_y = (y_start + p - 1) % p;
    return bw;
}

}  // namespace detail

// Full invariant check for a witness against its curve.
inline bool witness_ok(const ReducedCubic& cur, const BoxWitness& w) {
    const Modulus& m = cur.modulus();
    const std::uint64_t p = m.value();
    if (w.side < 2 || w.side > p) return false;
    if (w.u < 1 || w.u > w.side - 1) return false;
    if (w.v_signed < -static_cast<std::int64_t>(w.side - 1) ||
        w.v_signed > static_cast<std::int64_t>(w.side - 1))
        return false;
    if (w.p1 == w.p2) return false;
    if (cur.eval(w.p1.x) != w.p1.y || cur.eval(w.p2.x) != w.p2.y) return false;
    if (m.sub(w.p2.x, w.p1.x) != w.u) return false;
    if (m.sub(w.p2.y, w.p1.y) != m.reduce_signed(w.v_signed)) return false;
    const std::uint64_t xs = (w.anchor_x + 1) % p;
    const std::uint64_t ys = (w.anchor_y + 1) % p;
    return detail::in_window(xs, w.side, w.p1.x, p) &&
           detail::in_window(xs, w.side, w.p2.x, p) &&
           detail::in_window(ys, w.side, w.p1.y, p) &&
           detail::in_window(ys, w.side, w.p2.y, p);
}

// Criterion-driven detector. Scans x-offsets u in [1, H-1] and signed
// y-offsets w with |w| <= H-1 (order: 0, +1, -1, +2, ...); any cell whose
// condition is 0 or +1 yields concrete points via solve_pair. Returns the
// witness minimising (u, |w|, sign with + first, x), or nothing -- absence
// is exact, not heuristic. A 1 x 1 box can never hold two points.
inline std::optional<BoxWitness> detect_in_box(const ReducedCubic& cur,
                                               std::uint64_t side) {
    const std::uint64_t p = cur.modulus().value();
    if (side < 1 || side > p)
        throw std::invalid_argument(
            "detect_in_box: side must lie in [1, p]");
    if (side < 2) return std::nullopt;
    const std::uint64_t u_hi = std::min(side - 1, p - 1);
    for (std::uint64_t u = 1; u <= u_hi; ++u) {
        for (std::uint64_t aw = 0; aw <= side - 1; ++aw) {
            for (int sign = 0; sign < (aw == 0 ? 1 : 2); ++sign) {
                const std::int64_t w =
                    sign == 0 ? static_cast<std::int64_t>(aw)
                              : -static_cast<std::int64_t>(aw);
                const std::uint64_t v = cur.modulus().reduce_signed(w);
                if (pair_condition(cur, u, v) < 0) continue;
                const auto xs = solve_pair(cur, u, v);
                return detail::make_witness(cur, xs.front(), u, w, side);
            }
        }
    }
    return std::nullopt;
}

// Symbol-free oracle with the same presence semantics: enumerate the p
// curve points and test every unordered pair by its cyclic coordinate gaps.
// Quadratic in p; intended for moduli small enough to enumerate.
inline std::optional<BoxWitness> brute_detect_in_box(const ReducedCubic& cur,
                                                     std::uint64_t side) {
    const Modulus& m = cur.modulus();
    const std::uint64_t p = m.value();
    if (side < 1 || side > p)
        throw std::invalid_argument(
            "brute_detect_in_box: side must lie in [1, p]");
    if (side < 2) return std::nullopt;
    const auto pts = cur.all_points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const std::uint64_t dxf = m.sub(pts[j].x, pts[i].x);
            if (std::min(dxf, p - dxf) > side - 1) continue;
            const std::uint64_t dyf = m.sub(pts[j].y, pts[i].y);
            if (std::min(dyf, p - dyf) > side - 1) continue;
            const bool forward = dxf <= side - 1;
            const CurvePoint& p1 = forward ? pts[i] : pts[j];
            const std::uint64_t u = forward ? dxf : p - dxf;
            const std::uint64_t v = m.sub(cur.eval(m.add(p1.x, u)), p1.y);
            const std::int64_t w =
                v <= side - 1 ? static_cast<std::int64_t>(v)
                              : -static_cast<std::int64_t>(p - v);
            return detail::make_witness(cur, p1.x, u, w, side);
        }
    }
    return std::nullopt;
}

struct MinBoxResult {
    std::uint64_t h_min = 0;
    BoxWitness witness;
};

// Smallest side with a detection, by doubling then binary search; presence
// is monotone in the side. The p x p box holds the whole curve, so a result
// always exists.
inline MinBoxResult min_box_side(const ReducedCubic& cur) {
    const std::uint64_t p = cur.modulus().value();
    std::uint64_t lo = 1;  // detect(1) is always absent
    std::uint64_t hi = 2;
    while (!detect_in_box(cur, hi)) {
        lo = hi;
        hi = std::min(p, hi * 2);
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (detect_in_box(cur, mid))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, *detect_in_box(cur, hi)};
}

// Smallest side containing two of the given points: pairwise max cyclic
// gap plus one.
inline std::uint64_t min_box_side_of_points(std::uint64_t p,
                                            const std::vector<CurvePoint>& pts) {
    std::uint64_t best = p;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const std::uint64_t dxf = (pts[j].x + p - pts[i].x) % p;
            const std::uint64_t dyf = (pts[j].y + p - pts[i].y) % p;
            const std::uint64_t gx = std::min(dxf, p - dxf);
            const std::uint64_t gy = std::min(dyf, p - dyf);
            best = std::min(best, std::max(gx, gy) + 1);
        }
    }
    return best;
}

inline std::uint64_t brute_min_box_side(const ReducedCubic& cur) {
    return min_box_side_of_points(cur.modulus().value(), cur.all_points());
}

}  // namespace modcubic

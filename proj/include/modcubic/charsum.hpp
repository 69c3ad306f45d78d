#pragma once

// Empirical side of the character-sum story: interval sums of the Legendre
// symbol, maximal partial sums, 2r-th moments over spaced point families,
// the moment budget H^(2r-2) p^(1/2 + 1/(2r) + eps) they are compared
// against, and the Hoelder split used to chain the two. chi is always the
// Legendre symbol mod p.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "modcubic/cubic.hpp"
#include "modcubic/modarith.hpp"

namespace modcubic {

// S(N; h) = sum of chi(n) over N < n <= N + h. Whole periods vanish, so h
// is reduced mod p first.
inline std::int64_t interval_sum(const Modulus& m, std::int64_t start,
                                 std::uint64_t len) {
    const std::uint64_t p = m.value();
    len %= p;
    const std::uint64_t base = m.reduce_signed(start);
    std::int64_t s = 0;
    for (std::uint64_t n = 1; n <= len; ++n)
        s += legendre(static_cast<std::int64_t>(base + n), m);
    return s;
}

// max over 1 <= h <= window of |S(start; h)|, one incremental pass.
inline std::uint64_t max_partial(const Modulus& m, std::int64_t start,
                                 std::uint64_t window) {
    const std::uint64_t p = m.value();
    const std::uint64_t base = m.reduce_signed(start);
    const std::uint64_t steps = std::min(window, p);
    std::int64_t s = 0;
    std::uint64_t best = 0;
    for (std::uint64_t h = 1; h <= steps; ++h) {
        s += legendre(static_cast<std::int64_t>((base + h) % p), m);
        const std::uint64_t mag = static_cast<std::uint64_t>(std::llabs(s));
        if (mag > best) best = mag;
    }
    return best;
}

// Points N_1 < ... < N_J in [0, p-1] with consecutive gaps of at least h.
class SpacedFamily {
public:
    SpacedFamily(const Modulus& m, std::uint64_t h,
                 std::vector<std::uint64_t> pts)
        : m_(m), h_(h), points_(std::move(pts)) {
        if (h_ < 1)
            throw std::invalid_argument("spaced family: window must be >= 1");
        if (points_.empty())
            throw std::invalid_argument("spaced family: no points");
        for (std::size_t j = 0; j < points_.size(); ++j) {
            if (points_[j] >= m_.value())
                throw std::invalid_argument(
                    "spaced family: point outside [0, p-1]");
            if (j > 0 && points_[j] - points_[j - 1] < h_)
                throw std::invalid_argument(
                    "spaced family: gap below the window at index " +
                    std::to_string(j));
        }
    }

    const Modulus& modulus() const { return m_; }
    std::uint64_t window() const { return h_; }
    const std::vector<std::uint64_t>& points() const { return points_; }
    std::uint64_t size() const { return points_.size(); }

private:
    Modulus m_;
    std::uint64_t h_;
    std::vector<std::uint64_t> points_;
};

// Sort, dedupe, then keep the smallest value and every later one at least h
// beyond the last kept.
inline SpacedFamily greedy_spaced_family(const Modulus& m,
                                         std::vector<std::uint64_t> values,
                                         std::uint64_t h) {
    if (values.empty())
        throw std::invalid_argument("greedy_spaced_family: no values");
    for (auto& v : values) v = m.reduce(v);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<std::uint64_t> kept;
    kept.push_back(values.front());
    for (const std::uint64_t v : values)
        if (v - kept.back() >= h) kept.push_back(v);
    return SpacedFamily(m, h, std::move(kept));
}

// sum over the family of max_partial(N_j)^(2r). Partial maxima are exact
// integers; only the accumulation is floating point.
inline double moment(const SpacedFamily& fam, unsigned r) {
    if (r < 1) throw std::invalid_argument("moment: r must be >= 1");
    double acc = 0.0;
    for (const std::uint64_t n : fam.points()) {
        const double mp = static_cast<double>(
            max_partial(fam.modulus(), static_cast<std::int64_t>(n),
                        fam.window()));
        acc += std::pow(mp, 2.0 * r);
    }
    return acc;
}

// The moment budget with implied constant 1; callers compare via ratios.
inline double shao_bound(std::uint64_t p, std::uint64_t h, unsigned r,
                         double epsilon) {
    if (r < 1) throw std::invalid_argument("shao_bound: r must be >= 1");
    if (h < 1) throw std::invalid_argument("shao_bound: window must be >= 1");
    if (epsilon < 0.0)
        throw std::invalid_argument("shao_bound: epsilon must be >= 0");
    return std::pow(static_cast<double>(h), 2.0 * r - 2.0) *
           std::pow(static_cast<double>(p), 0.5 + 1.0 / (2.0 * r) + epsilon);
}

struct MomentReport {
    std::uint64_t p = 0;
    std::uint64_t window = 0;   // H
    unsigned r = 1;
    double epsilon = 0.0;
    std::uint64_t family_size = 0;  // J
    double lhs_moment = 0.0;
    double rhs_bound = 0.0;
    double ratio = 0.0;
    std::string family;  // "random" or "curve"
};

inline MomentReport make_moment_report(const SpacedFamily& fam, unsigned r,
                                       double epsilon, std::string family) {
    MomentReport rep;
    rep.p = fam.modulus().value();
    rep.window = fam.window();
    rep.r = r;
    rep.epsilon = epsilon;
    rep.family_size = fam.size();
    rep.lhs_moment = moment(fam, r);
    rep.rhs_bound = shao_bound(rep.p, rep.window, r, epsilon);
    rep.ratio = rep.lhs_moment / rep.rhs_bound;
    rep.family = std::move(family);
    return rep;
}

struct HolderChain {
    double lhs = 0.0;
    double rhs = 0.0;
};

// lhs = sum over u' <= H/2 of |sum over v' <= H/2 of chi(a u'^3 + c u' - v')|
// against its Hoelder majorant floor(H/2)^((2r-1)/2r) * (sum |.|^2r)^(1/2r).
// lhs <= rhs holds identically; the pair is exposed for numeric inspection.
inline HolderChain holder_chain_check(const ReducedCubic& cur,
                                      std::uint64_t side, unsigned r) {
    if (side < 2)
        throw std::invalid_argument(
            "holder_chain_check: side must be >= 2 so that H/2 >= 1");
    if (r < 1)
        throw std::invalid_argument("holder_chain_check: r must be >= 1");
    const Modulus& m = cur.modulus();
    const std::uint64_t half = side / 2;
    double lhs = 0.0;
    double pow_sum = 0.0;
    for (std::uint64_t up = 1; up <= half; ++up) {
        const std::uint64_t crest = cur.eval(up);  // a u'^3 + c u'
        std::int64_t inner = 0;
        for (std::uint64_t vp = 1; vp <= half; ++vp)
            inner += legendre(static_cast<std::int64_t>(m.sub(
                                  crest, m.reduce(vp))),
                              m);
        const double mag = static_cast<double>(std::llabs(inner));
        lhs += mag;
        pow_sum += std::pow(mag, 2.0 * r);
    }
    HolderChain out;
    out.lhs = lhs;
    out.rhs = std::pow(static_cast<double>(half),
                       (2.0 * r - 1.0) / (2.0 * r)) *
              std::pow(pow_sum, 1.0 / (2.0 * r));
    return out;
}

// chi over a full period as a lookup table: squares get +1, zero 0, the
// rest -1.
inline std::vector<std::int8_t> legendre_table(const Modulus& m) {
    const std::uint64_t p = m.value();
    std::vector<std::int8_t> chi(p, -1);
    chi[0] = 0;
    for (std::uint64_t k = 1; k <= (p - 1) / 2; ++k) chi[m.mul(k, k)] = 1;
    return chi;
}

// max over all anchors N in [0, p-1] and lengths 1 <= h <= p of |S(N; h)|.
// With P the prefix sums of chi over one period, every S(N; h) is a
// difference P(j) - P(i) and every index pair occurs, so the answer is
// max(P) - min(P). One O(p) pass instead of the naive O(p^2) scan.
inline std::uint64_t polya_vinogradov_max(const Modulus& m) {
    const auto chi = legendre_table(m);
    std::int64_t prefix = 0, lo = 0, hi = 0;
    for (std::uint64_t n = 1; n < m.value(); ++n) {
        prefix += chi[n];
        if (prefix < lo) lo = prefix;
        if (prefix > hi) hi = prefix;
    }
    return static_cast<std::uint64_t>(hi - lo);
}

}  // namespace modcubic

#pragma once

// Exact modular arithmetic over 64-bit prime moduli. All routines keep
// intermediates in 128 bits; the modulus is capped below 2^62 so that 2p^2
// still fits. Everything here is a pure function of its arguments.

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace modcubic {

// (a * b) mod m for reduced operands a, b < m. Moduli under 2^32 get a plain
// 64-bit multiply; larger ones go through a 128-bit intermediate.
inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    if (m <= 0xFFFFFFFFull) return (a * b) % m;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp,
                                 std::uint64_t m) {
    base %= m;
    std::uint64_t acc = 1 % m;
    while (exp > 0) {
        if (exp & 1) acc = mul_mod(acc, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// Deterministic Miller-Rabin. The witness set {2,...,37} is exact for every
// 64-bit input.
inline bool is_prime(std::uint64_t n) {
    constexpr std::uint64_t kWitnesses[] = {2,  3,  5,  7,  11, 13,
                                            17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (std::uint64_t q : kWitnesses) {
        if (n % q == 0) return n == q;
    }
    if (n < 41 * 41) return true;
    const int s = std::countr_zero(n - 1);
    const std::uint64_t d = (n - 1) >> s;
    for (std::uint64_t a : kWitnesses) {
        std::uint64_t x = pow_mod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// A validated prime modulus p with 3 < p < 2^62. Carries the cheap ring
// helpers used by everything downstream; operands of add/sub/mul must
// already be reduced.
class Modulus {
public:
    static constexpr std::uint64_t kLimit = 1ull << 62;

    explicit Modulus(std::uint64_t p) : p_(p) {
        if (p <= 3)
            throw std::domain_error("modulus " + std::to_string(p) +
                                    " rejected: must exceed 3");
        if (p >= kLimit)
            throw std::domain_error("modulus " + std::to_string(p) +
                                    " rejected: must be below 2^62");
        if (!is_prime(p))
            throw std::domain_error("modulus " + std::to_string(p) +
                                    " rejected: fails the is_prime check");
    }

    std::uint64_t value() const { return p_; }

    std::uint64_t reduce(std::uint64_t n) const { return n % p_; }

    std::uint64_t reduce_signed(std::int64_t n) const {
        std::int64_t r = n % static_cast<std::int64_t>(p_);
        if (r < 0) r += static_cast<std::int64_t>(p_);
        return static_cast<std::uint64_t>(r);
    }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }

    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p_ - b;
    }

    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return mul_mod(a, b, p_);
    }

    bool operator==(const Modulus&) const = default;

private:
    std::uint64_t p_;
};

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp,
                             const Modulus& m) {
    return pow_mod_u64(base, exp, m.value());
}

// Multiplicative inverse by extended Euclid; p prime makes every nonzero
// residue invertible.
inline std::uint64_t inv_mod(std::uint64_t x, const Modulus& m) {
    const std::uint64_t p = m.value();
    std::uint64_t a = x % p;
    if (a == 0)
        throw std::domain_error(
            "inv_mod: argument is divisible by the modulus");
    std::int64_t t = 0, t_next = 1;
    std::uint64_t r = p, r_next = a;
    while (r_next != 0) {
        const std::uint64_t q = r / r_next;
        const std::int64_t t2 = t - static_cast<std::int64_t>(q) * t_next;
        t = t_next;
        t_next = t2;
        const std::uint64_t r2 = r - q * r_next;
        r = r_next;
        r_next = r2;
    }
    return t < 0 ? static_cast<std::uint64_t>(t + static_cast<std::int64_t>(p))
                 : static_cast<std::uint64_t>(t);
}

// Legendre symbol via Euler's criterion; negative n is reduced first.
inline int legendre(std::int64_t n, const Modulus& m) {
    const std::uint64_t r = m.reduce_signed(n);
    if (r == 0) return 0;
    return pow_mod(r, (m.value() - 1) / 2, m) == 1 ? 1 : -1;
}

// Square roots mod p. Returns the root pair {r, p-r} ordered ascending,
// (0,0) for n = 0, and nothing for non-residues. Tonelli-Shanks, with the
// p = 3 (mod 4) exponent shortcut.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> sqrt_mod(
    std::uint64_t n, const Modulus& m) {
    const std::uint64_t p = m.value();
    n %= p;
    if (n == 0) return std::pair<std::uint64_t, std::uint64_t>{0, 0};
    if (legendre(static_cast<std::int64_t>(n), m) != 1) return std::nullopt;

    std::uint64_t root;
    if (p % 4 == 3) {
        root = pow_mod(n, (p + 1) / 4, m);
    } else {
        const int s = std::countr_zero(p - 1);
        const std::uint64_t q = (p - 1) >> s;
        std::uint64_t z = 2;
        while (legendre(static_cast<std::int64_t>(z), m) != -1) ++z;
        int order = s;
        std::uint64_t c = pow_mod(z, q, m);
        std::uint64_t t = pow_mod(n, q, m);
        root = pow_mod(n, (q + 1) / 2, m);
        while (t != 1) {
            std::uint64_t t2 = t;
            int i = 0;
            while (t2 != 1) {
                t2 = m.mul(t2, t2);
                ++i;
            }
            std::uint64_t b = c;
            for (int j = 0; j < order - i - 1; ++j) b = m.mul(b, b);
            order = i;
            c = m.mul(b, b);
            t = m.mul(t, c);
            root = m.mul(root, b);
        }
    }
    std::uint64_t other = p - root;
    if (other < root) std::swap(root, other);
    return std::pair<std::uint64_t, std::uint64_t>{root, other};
}

}  // namespace modcubic

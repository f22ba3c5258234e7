#pragma once

// Hand-rolled generators and brute-force oracles shared by the test binaries.

#include <cstdint>
#include <random>
#include <vector>

#include "blender/interval.hpp"
#include "blender/rational.hpp"

namespace blender::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// Rational in [lo, hi] on a grid of spacing 1/den.
    Rational rational(const Rational& lo, const Rational& hi, long den = 1000) {
        const Rational w = hi - lo;
        return lo + w * Rational(integer(0, den), den);
    }

    /// Rational strictly inside (lo, hi).
    Rational inner(const Rational& lo, const Rational& hi, long den = 1000) {
        return lo + (hi - lo) * Rational(integer(1, den - 1), den);
    }

    Interval interval(const Rational& lo, const Rational& hi) {
        Rational a = rational(lo, hi), b = rational(lo, hi);
        if (b < a) std::swap(a, b);
        if (a == b) return Interval::point(a);
        return {a, b, coin(), coin()};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Points lo + k (hi - lo)/n for k = 0..n.
inline std::vector<Rational> grid(const Rational& lo, const Rational& hi, long n) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    const Rational step = (hi - lo) / Rational(n);
    for (long k = 0; k <= n; ++k) out.push_back(lo + step * Rational(k));
    return out;
}

/// Membership straight from the endpoint inequalities.
inline bool member(const Interval& i, const Rational& x) {
    const bool left = i.lo_open() ? i.lo() < x : i.lo() <= x;
    const bool right = i.hi_open() ? x < i.hi() : x <= i.hi();
    return left && right;
}

inline bool member_any(const std::vector<Interval>& pieces, const Rational& x) {
    for (const Interval& p : pieces)
        if (member(p, x)) return true;
    return false;
}

/// dist(x, K \ I) for closed K, by cases on where the complement pieces lie.
inline Rational complement_distance(const Interval& i, const Interval& k, const Rational& x) {
    if (!member(i, x)) return Rational(0);
    const bool left = k.lo() < i.lo() || (k.lo() == i.lo() && i.lo_open());
    const bool right = i.hi() < k.hi() || (i.hi() == k.hi() && i.hi_open());
    if (!left && !right) return k.width();
    if (left && right) return min(x - i.lo(), i.hi() - x);
    return left ? x - i.lo() : i.hi() - x;
}

/// Grid minimum of max_I dist(x, K \ I); an upper bound on the exact L*,
/// equal to it when a minimiser lies on the grid.
inline Rational grid_lebesgue(const std::vector<Interval>& cover, const Interval& k, long n) {
    Rational best(-1);
    for (const Rational& x : grid(k.lo(), k.hi(), n)) {
        Rational v(0);
        for (const Interval& i : cover) v = max(v, complement_distance(i, k, x));
        if (best.sign() < 0 || v < best) best = v;
    }
    return best;
}

}  // namespace blender::testing

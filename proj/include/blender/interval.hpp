#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "blender/errors.hpp"
#include "blender/rational.hpp"

namespace blender {

/// Interval of rationals with independently open or closed endpoints.
///
/// Invariant: lo <= hi, and a degenerate interval (lo == hi) is a closed
/// point. Empty intervals are not representable; operations that can produce
/// one return std::optional.
class Interval {
public:
    Interval(Rational lo, Rational hi, bool lo_open = false, bool hi_open = false)
        : lo_(std::move(lo)), hi_(std::move(hi)), lo_open_(lo_open), hi_open_(hi_open) {
        if (hi_ < lo_) throw InvalidIntervalError("interval with lo > hi: " + lo_.str() + " > " + hi_.str());
        if (lo_ == hi_ && (lo_open_ || hi_open_))
            throw InvalidIntervalError("degenerate interval at " + lo_.str() + " must be closed");
    }

    static Interval closed(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), false, false}; }
    static Interval open(Rational lo, Rational hi) {
        if (!(lo < hi)) throw InvalidIntervalError("open interval needs lo < hi");
        return {std::move(lo), std::move(hi), true, true};
    }
    static Interval point(const Rational& x) { return {x, x, false, false}; }

    const Rational& lo() const noexcept { return lo_; }
    const Rational& hi() const noexcept { return hi_; }
    bool lo_open() const noexcept { return lo_open_; }
    bool hi_open() const noexcept { return hi_open_; }

    Rational width() const { return hi_ - lo_; }
    Rational midpoint() const { return (lo_ + hi_) / Rational(2); }
    bool is_point() const { return lo_ == hi_; }
    bool is_open() const { return lo_open_ && hi_open_; }
    Interval closure() const { return {lo_, hi_, false, false}; }

    bool contains(const Rational& x) const {
        const bool above = lo_open_ ? lo_ < x : lo_ <= x;
        const bool below = hi_open_ ? x < hi_ : x <= hi_;
        return above && below;
    }

    /// True iff every point of `k` lies in this interval (openness respected).
    bool contains(const Interval& k) const {
        const bool left = lo_ < k.lo_ || (lo_ == k.lo_ && (!lo_open_ || k.lo_open_));
        const bool right = k.hi_ < hi_ || (k.hi_ == hi_ && (!hi_open_ || k.hi_open_));
        return left && right;
    }

    std::optional<Interval> intersect(const Interval& o) const {
        Rational lo = lo_;
        bool lo_open = lo_open_;
        if (o.lo_ > lo_) {
            lo = o.lo_;
            lo_open = o.lo_open_;
        } else if (o.lo_ == lo_) {
            lo_open = lo_open_ || o.lo_open_;
        }
        Rational hi = hi_;
        bool hi_open = hi_open_;
        if (o.hi_ < hi_) {
            hi = o.hi_;
            hi_open = o.hi_open_;
        } else if (o.hi_ == hi_) {
            hi_open = hi_open_ || o.hi_open_;
        }
        if (hi < lo) return std::nullopt;
        if (hi == lo && (lo_open || hi_open)) return std::nullopt;
        return Interval(std::move(lo), std::move(hi), lo_open, hi_open);
    }

    /// Distance between the closures; zero when they meet.
    Rational distance(const Interval& o) const {
        if (o.lo_ > hi_) return o.lo_ - hi_;
        if (lo_ > o.hi_) return lo_ - o.hi_;
        return Rational(0);
    }

    Rational distance(const Rational& x) const {
        if (x < lo_) return lo_ - x;
        if (x > hi_) return x - hi_;
        return Rational(0);
    }

    friend bool operator==(const Interval&, const Interval&) = default;

    /// "[a, b)" style rendering with exact endpoints.
    std::string str() const {
        return std::string(lo_open_ ? "(" : "[") + lo_.str() + ", " + hi_.str() + (hi_open_ ? ")" : "]");
    }
    friend std::ostream& operator<<(std::ostream& os, const Interval& i) { return os << i.str(); }

private:
    Rational lo_;
    Rational hi_;
    bool lo_open_;
    bool hi_open_;
};

using ExactInterval = Interval;

/// Exact image of `interval` under x -> slope * x + offset.
///
/// Openness is carried with the endpoint it belongs to, so a negative slope
/// swaps both endpoints and flags.
inline Interval affine_image(const Rational& slope, const Rational& offset, const Interval& interval) {
    if (slope.is_zero()) throw DegenerateMapError("affine map with zero slope");
    Rational a = slope * interval.lo() + offset;
    Rational b = slope * interval.hi() + offset;
    if (slope.sign() > 0) return {std::move(a), std::move(b), interval.lo_open(), interval.hi_open()};
    return {std::move(b), std::move(a), interval.hi_open(), interval.lo_open()};
}

/// Finite union of intervals kept in canonical form: sorted, pairwise
/// disjoint and non-adjacent (touching pieces that share a closed endpoint
/// are merged).
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> pieces) : components_(std::move(pieces)) { canonicalize(); }

    const std::vector<Interval>& components() const noexcept { return components_; }
    bool empty() const noexcept { return components_.empty(); }

    void insert(Interval piece) {
        components_.push_back(std::move(piece));
        canonicalize();
    }

    bool contains(const Rational& x) const {
        return std::any_of(components_.begin(), components_.end(), [&](const Interval& c) { return c.contains(x); });
    }

    /// Points of `k` not covered by this set, in canonical form.
    IntervalSet complement_within(const Interval& k) const {
        std::vector<Interval> out;
        Rational cursor = k.lo();
        bool cursor_open = k.lo_open();
        bool exhausted = false;
        for (const Interval& c : components_) {
            if (c.hi() < cursor || (c.hi() == cursor && (c.hi_open() || cursor_open))) continue;
            // Gap [cursor, c.lo) before this component.
            if (c.lo() > k.hi() || (c.lo() == k.hi() && (c.lo_open() || k.hi_open()))) break;
            if (cursor < c.lo()) {
                out.emplace_back(cursor, c.lo(), cursor_open, !c.lo_open());
            } else if (cursor == c.lo() && c.lo_open() && !cursor_open) {
                out.push_back(Interval::point(cursor));
            }
            if (c.hi() > k.hi() || (c.hi() == k.hi() && (!c.hi_open() || k.hi_open()))) {
                exhausted = true;
                break;
            }
            cursor = c.hi();
            cursor_open = !c.hi_open();
        }
        if (!exhausted) {
            if (cursor < k.hi()) {
                out.emplace_back(cursor, k.hi(), cursor_open, k.hi_open());
            } else if (cursor == k.hi() && !cursor_open && !k.hi_open()) {
                out.push_back(Interval::point(cursor));
            }
        }
        return IntervalSet(std::move(out));
    }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    void canonicalize() {
        std::sort(components_.begin(), components_.end(), [](const Interval& a, const Interval& b) {
            if (a.lo() != b.lo()) return a.lo() < b.lo();
            return !a.lo_open() && b.lo_open();
        });
        std::vector<Interval> merged;
        for (Interval& c : components_) {
            if (!merged.empty()) {
                Interval& last = merged.back();
                const bool joins = c.lo() < last.hi() || (c.lo() == last.hi() && (!last.hi_open() || !c.lo_open()));
                if (joins) {
                    if (c.hi() > last.hi()) {
                        last = Interval(last.lo(), c.hi(), last.lo_open(), c.hi_open());
                    } else if (c.hi() == last.hi() && last.hi_open() && !c.hi_open()) {
                        last = Interval(last.lo(), last.hi(), last.lo_open(), false);
                    }
                    continue;
                }
            }
            merged.push_back(std::move(c));
        }
        components_ = std::move(merged);
    }

    std::vector<Interval> components_;
};

inline IntervalSet affine_image(const Rational& slope, const Rational& offset, const IntervalSet& set) {
    std::vector<Interval> out;
    out.reserve(set.components().size());
    for (const Interval& c : set.components()) out.push_back(affine_image(slope, offset, c));
    return IntervalSet(std::move(out));
}

/// True iff every point of `k` lies in `set`.
///
/// A connected `k` covered by a canonical union must sit inside one
/// component, since components are separated by uncovered points.
inline bool set_contains(const IntervalSet& set, const Interval& k) {
    return std::any_of(set.components().begin(), set.components().end(),
                       [&](const Interval& c) { return c.contains(k); });
}

/// Leftmost point of `k` outside `set`, if any.
///
/// The uncovered part of `k` can start with an open endpoint (no minimum);
/// then the midpoint of its first piece is returned instead.
inline std::optional<Rational> uncovered_point(const IntervalSet& set, const Interval& k) {
    const IntervalSet gaps = set.complement_within(k);
    if (gaps.empty()) return std::nullopt;
    const Interval& first = gaps.components().front();
    if (!first.lo_open()) return first.lo();
    return first.midpoint();
}

}  // namespace blender

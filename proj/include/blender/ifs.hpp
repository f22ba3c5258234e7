#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blender/errors.hpp"
#include "blender/interval.hpp"
#include "blender/rational.hpp"

namespace blender {

/// x -> slope * x + offset.
struct AffineMap {
    Rational slope;
    Rational offset;

    Rational operator()(const Rational& x) const { return slope * x + offset; }
    Interval operator()(const Interval& i) const { return affine_image(slope, offset, i); }

    /// this ∘ inner
    AffineMap after(const AffineMap& inner) const { return {slope * inner.slope, slope * inner.offset + offset}; }

    AffineMap inverse() const {
        if (slope.is_zero()) throw DegenerateMapError("cannot invert a zero-slope map");
        return {Rational(1) / slope, -offset / slope};
    }

    friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Finite symbol sequence over {1..k}.
///
/// Entries read as past symbols: the leftmost entry is the most recent one,
/// so the coded fiber point is phi_{w1} ∘ ... ∘ phi_{wn} applied to a seed.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<int> symbols) : symbols_(std::move(symbols)) {
        for (int s : symbols_)
            if (s < 1 || s > 9) throw ParseError("symbol out of range: " + std::to_string(s));
    }

    static Word repeat(int symbol, std::size_t n) { return Word(std::vector<int>(n, symbol)); }

    static Word parse(std::string_view text) {
        std::vector<int> out;
        out.reserve(text.size());
        for (char c : text) {
            if (c < '1' || c > '9') throw ParseError("invalid symbol '" + std::string(1, c) + "' in word");
            out.push_back(c - '0');
        }
        return Word(std::move(out));
    }

    const std::vector<int>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    int operator[](std::size_t i) const { return symbols_[i]; }

    void push_back(int s) {
        if (s < 1 || s > 9) throw ParseError("symbol out of range: " + std::to_string(s));
        symbols_.push_back(s);
    }
    void append(const Word& other) { symbols_.insert(symbols_.end(), other.symbols_.begin(), other.symbols_.end()); }

    std::string str() const {
        std::string out;
        out.reserve(symbols_.size());
        for (int s : symbols_) out.push_back(static_cast<char>('0' + s));
        return out;
    }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<int> symbols_;
};

/// Contracting affine IFS {phi_1, ..., phi_k} on the fiber line.
class AffineIFS {
public:
    explicit AffineIFS(std::vector<AffineMap> maps) : maps_(std::move(maps)) {
        if (maps_.size() < 2) throw InvalidSystemError("an IFS needs at least two maps");
        for (std::size_t i = 0; i < maps_.size(); ++i) {
            const Rational& s = maps_[i].slope;
            if (s.is_zero()) throw InvalidSystemError("map " + std::to_string(i + 1) + " has zero slope");
            if (!(abs(s) < Rational(1)))
                throw InvalidSystemError("map " + std::to_string(i + 1) + " is not contracting (|slope| = " +
                                         abs(s).str() + ")");
        }
    }

    std::size_t size() const noexcept { return maps_.size(); }
    /// Maps are indexed by symbol, starting at 1.
    const AffineMap& map(int symbol) const { return maps_.at(static_cast<std::size_t>(symbol - 1)); }
    const std::vector<AffineMap>& maps() const noexcept { return maps_; }

    std::vector<Interval> images(const Interval& b) const {
        std::vector<Interval> out;
        out.reserve(maps_.size());
        for (const AffineMap& m : maps_) out.push_back(m(b));
        return out;
    }

private:
    std::vector<AffineMap> maps_;
};

struct CoveringCertificate {
    bool covered = false;
    std::vector<Interval> images;
    std::optional<Rational> lebesgue_number;
    std::optional<Rational> witness;
};

namespace detail {

/// dist(x, K \ I) for x in the closure of K. K \ I is the union of a left
/// piece ending at I.lo and a right piece starting at I.hi (either may be
/// absent); with both absent the distance is width(K) by convention.
struct ComplementDistance {
    std::optional<Rational> left_anchor;
    std::optional<Rational> right_anchor;
    Interval element;
    Rational fallback;

    ComplementDistance(const Interval& i, const Interval& k) : element(i), fallback(k.width()) {
        const bool has_left = k.lo() < i.lo() || (k.lo() == i.lo() && i.lo_open() && !k.lo_open());
        const bool has_right = i.hi() < k.hi() || (i.hi() == k.hi() && i.hi_open() && !k.hi_open());
        if (has_left) left_anchor = i.lo();
        if (has_right) right_anchor = i.hi();
    }

    Rational operator()(const Rational& x) const {
        if (!element.contains(x)) return Rational(0);
        if (!left_anchor && !right_anchor) return fallback;
        std::optional<Rational> d;
        if (left_anchor) d = x - *left_anchor;
        if (right_anchor) {
            Rational r = *right_anchor - x;
            if (!d || r < *d) d = std::move(r);
        }
        return *d;
    }
};

}  // namespace detail

/// Supremal Lebesgue number of `cover` over `k`:
///   L* = min_{x in K} max_{I in cover} dist(x, K \ I).
/// Any 0 < L < L* is a valid Lebesgue number. The function being minimised
/// is continuous and piecewise linear with slopes in {-1, 0, 1}, so the
/// minimum is attained at one of the candidate breakpoints enumerated below.
inline Rational lebesgue_number(const std::vector<Interval>& cover, const Interval& k) {
    if (!set_contains(IntervalSet(cover), k)) throw NotACoverError("cover does not contain " + k.str());

    std::vector<detail::ComplementDistance> dists;
    dists.reserve(cover.size());
    std::vector<Rational> anchors{k.lo(), k.hi()};
    for (const Interval& i : cover) {
        dists.emplace_back(i, k);
        anchors.push_back(i.lo());
        anchors.push_back(i.hi());
    }
    const Rational w = k.width();
    std::vector<Rational> candidates;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        candidates.push_back(anchors[a]);
        candidates.push_back(anchors[a] + w);
        candidates.push_back(anchors[a] - w);
        for (std::size_t b = a + 1; b < anchors.size(); ++b) candidates.push_back((anchors[a] + anchors[b]) / Rational(2));
    }

    const Interval closed_k = k.closure();
    std::optional<Rational> best;
    for (const Rational& x : candidates) {
        if (!closed_k.contains(x)) continue;
        Rational value(0);
        for (const auto& d : dists) value = max(value, d(x));
        if (!best || value < *best) best = std::move(value);
    }
    return *best;
}

/// Decides closure(B) ⊂ phi_1(B) ∪ ... ∪ phi_k(B) exactly.
inline CoveringCertificate check_covering(const AffineIFS& ifs, const Interval& b) {
    if (!b.is_open() || b.is_point()) throw PreconditionError("covering check needs a nondegenerate open B");
    CoveringCertificate cert;
    cert.images = ifs.images(b);
    const IntervalSet united(cert.images);
    const Interval closure = b.closure();
    cert.covered = set_contains(united, closure);
    if (cert.covered) {
        cert.lebesgue_number = lebesgue_number(cert.images, closure);
    } else {
        cert.witness = uncovered_point(united, closure);
    }
    return cert;
}

/// phi_{w1} ∘ phi_{w2} ∘ ... ∘ phi_{wn}(k0); the empty word returns k0.
inline Interval code_to_enclosure(const AffineIFS& ifs, const Word& word, const Interval& k0) {
    Interval out = k0;
    for (auto it = word.symbols().rbegin(); it != word.symbols().rend(); ++it) {
        if (static_cast<std::size_t>(*it) > ifs.size()) throw ParseError("symbol exceeds IFS alphabet");
        out = ifs.map(*it)(out);
    }
    return out;
}

}  // namespace blender

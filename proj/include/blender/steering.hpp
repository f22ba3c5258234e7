#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "blender/errors.hpp"
#include "blender/ifs.hpp"
#include "blender/interval.hpp"
#include "blender/skew_system.hpp"

namespace blender {

/// Fiber region guaranteed for the image of the start enclosure at every
/// time in [first, last] (time t = after t symbols).
struct TimedRegion {
    std::size_t first = 0;
    std::size_t last = 0;
    Interval region = Interval::point(Rational(0));

    friend bool operator==(const TimedRegion&, const TimedRegion&) = default;
};

/// A word together with the fiber values it steers and the regions the
/// forward images are guaranteed to visit.
struct CylinderConstraint {
    Word word;
    Interval start_enclosure = Interval::point(Rational(0));
    Interval end_enclosure = Interval::point(Rational(0));
    std::vector<TimedRegion> checkpoints;
};

/// Forward fiber map of a whole word: g_{w_n} ∘ ... ∘ g_{w_1}.
inline AffineMap forward_map(const SkewSystem& sys, const Word& word) {
    AffineMap m{Rational(1), Rational(0)};
    for (int s : word.symbols()) m = sys.fiber_map(s).after(m);
    return m;
}

/// Exact replay of a constraint: walks the start enclosure forward under the
/// word and checks every timed region. Returns the first failing time.
inline std::optional<std::size_t> first_violation(const SkewSystem& sys, const CylinderConstraint& c) {
    Interval image = c.start_enclosure;
    auto check = [&](std::size_t t) {
        for (const TimedRegion& r : c.checkpoints)
            if (r.first <= t && t <= r.last && !r.region.contains(image)) return false;
        return true;
    };
    if (!check(0)) return std::size_t{0};
    for (std::size_t t = 0; t < c.word.size(); ++t) {
        image = sys.fiber_map(c.word[t])(image);
        if (!check(t + 1)) return t + 1;
    }
    if (!c.end_enclosure.contains(image) || !image.contains(c.end_enclosure)) return c.word.size();
    return std::nullopt;
}

namespace detail {

/// Symbol maximising width(g_i(current) ∩ constraint); ties go to the smaller
/// symbol, and any nonempty intersection beats an empty one.
inline std::optional<std::pair<int, Interval>> widest_branch(const SkewSystem& sys, const Interval& current,
                                                             const Interval& constraint) {
    std::optional<std::pair<int, Interval>> best;
    for (int symbol = 1; symbol <= 2; ++symbol) {
        auto clipped = sys.fiber_map(symbol)(current).intersect(constraint);
        if (!clipped) continue;
        if (!best || clipped->width() > best->second.width()) best.emplace(symbol, std::move(*clipped));
    }
    return best;
}

/// Pulls the final forward image back through the word; all intermediate
/// clips are implied because each image is contained in g(previous).
inline Interval pull_back(const SkewSystem& sys, const Word& word, const Interval& end) {
    return forward_map(sys, word).inverse()(end);
}

inline void require_covering(const SkewSystem& sys) {
    if (!check_covering(sys.ifs(), sys.region()).covered)
        throw PreconditionError("covering property is not certified for B = " + sys.region().str());
}

}  // namespace detail

/// Word of length m keeping every forward image of the (refined) start inside
/// B. Each step takes the branch whose image retains the widest part of B.
inline CylinderConstraint stay_in(const SkewSystem& sys, const Interval& start, std::size_t m) {
    const Interval& b = sys.region();
    if (!b.contains(start)) throw PreconditionError("stay_in start " + start.str() + " is not inside B");
    detail::require_covering(sys);

    CylinderConstraint out;
    Interval current = start;
    for (std::size_t t = 0; t < m; ++t) {
        auto next = detail::widest_branch(sys, current, b);
        if (!next) throw SteeringError(t, "enclosure " + current.str() + " has no branch back into B");
        if (!start.is_point() && next->second.is_point())
            throw SteeringError(t, "enclosure collapsed to a point");
        out.word.push_back(next->first);
        current = std::move(next->second);
    }
    out.start_enclosure = detail::pull_back(sys, out.word, current);
    out.end_enclosure = current;
    out.checkpoints.push_back({0, m, b});
    return out;
}

/// Word of length <= max_len taking a refined part of `start` into `target`
/// while every intermediate image stays in `constraint`.
///
/// Runs forward with the widest-branch rule. It stops as soon as the image
/// fits inside the target, or once the image meets the target and is at least
/// as wide as it (further expansion can no longer produce containment); in
/// the latter case the image is clipped to the target and the clip is pulled
/// back onto the start.
inline CylinderConstraint steer_into(const SkewSystem& sys, const Interval& start, const Interval& target,
                                     const Interval& constraint, std::size_t max_len) {
    if (!constraint.contains(target)) throw PreconditionError("steering target must lie inside the constraint");
    if (!constraint.contains(start)) throw PreconditionError("steering start must lie inside the constraint");
    if (constraint == sys.region()) detail::require_covering(sys);

    CylinderConstraint out;
    Interval current = start;
    Rational best_distance = current.distance(target);
    for (std::size_t t = 0;; ++t) {
        if (target.contains(current)) break;
        if (auto meet = current.intersect(target); meet && current.width() >= target.width()) {
            if (meet->is_point() && !start.is_point()) {
                // Touching endpoints only; keep expanding.
            } else {
                current = std::move(*meet);
                break;
            }
        }
        if (t == max_len)
            throw SteeringError(t, "target " + target.str() + " not reached; best distance " + best_distance.str());
        auto next = detail::widest_branch(sys, current, constraint);
        if (!next) throw SteeringError(t, "enclosure " + current.str() + " leaves the constraint on every branch");
        out.word.push_back(next->first);
        current = std::move(next->second);
        best_distance = min(best_distance, current.distance(target));
    }
    out.start_enclosure = detail::pull_back(sys, out.word, current);
    out.end_enclosure = current;
    out.checkpoints.push_back({0, out.word.size(), constraint});
    out.checkpoints.push_back({out.word.size(), out.word.size(), target});
    return out;
}

}  // namespace blender

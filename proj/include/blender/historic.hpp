#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "blender/errors.hpp"
#include "blender/ifs.hpp"
#include "blender/interval.hpp"
#include "blender/skew_system.hpp"
#include "blender/steering.hpp"

namespace blender {

/// Fiber-only tent observable: 1 for |x| <= one, 0 for |x| >= zero, linear
/// in between.
struct ObservableSpec {
    Rational one;
    Rational zero;

    static ObservableSpec defaults_for(const SystemParams& p) { return {p.eps / Rational(4), p.eps / Rational(2)}; }

    friend bool operator==(const ObservableSpec&, const ObservableSpec&) = default;
};

inline void validate(const ObservableSpec& spec, const SystemParams& p) {
    if (!(Rational(0) < spec.one)) throw ParameterError("observable check failed: 0 < one");
    if (!(spec.one < spec.zero)) throw ParameterError("observable check failed: one < zero");
    if (!(spec.zero <= p.eps)) throw ParameterError("observable check failed: zero <= eps");
}

inline Rational observable_value(const ObservableSpec& spec, const Rational& fiber) {
    const Rational r = abs(fiber);
    if (r <= spec.one) return Rational(1);
    if (r >= spec.zero) return Rational(0);
    return (spec.zero - r) / (spec.zero - spec.one);
}

inline Rational observable_value(const SkewSystem& sys, const ObservableSpec& spec, const Point& z) {
    validate(spec, sys.params());
    return observable_value(spec, z.fiber);
}

/// Exact prefix averages a_1..a_n with a_k = (1/k) sum_{i<k} phi(f^i z).
inline std::vector<Rational> birkhoff_partial_averages(const SkewSystem& sys, const ObservableSpec& spec,
                                                       const Point& z, std::size_t n) {
    validate(spec, sys.params());
    std::vector<Rational> out;
    out.reserve(n);
    Rational sum(0);
    visit_orbit(sys, z, n, [&](std::size_t k, const Point& p, int) {
        sum += observable_value(spec, p.fiber);
        out.push_back(sum / Rational(static_cast<long>(k + 1)));
    });
    return out;
}

struct HistoricWitness {
    std::size_t n1;
    std::size_t n2;
    Rational gap;
};

/// First n in [N, horizon] at which some earlier-or-equal index m >= N gives
/// |a_m - a_n| > 1/2; the pair is ordered so that a_{n1} - a_{n2} > 1/2.
/// Absence only means no witness up to the horizon.
inline std::optional<HistoricWitness> detect_historic(const SkewSystem& sys, const ObservableSpec& spec,
                                                      const Point& z, std::size_t N, std::size_t horizon) {
    if (N > horizon) throw PreconditionError("detect_historic needs N <= horizon");
    if (N == 0) N = 1;
    const auto avg = birkhoff_partial_averages(sys, spec, z, horizon);
    const Rational half(1, 2);
    std::size_t arg_max = N, arg_min = N;
    for (std::size_t n = N; n <= horizon; ++n) {
        const Rational& a = avg[n - 1];
        if (a > avg[arg_max - 1]) arg_max = n;
        if (a < avg[arg_min - 1]) arg_min = n;
        if (avg[arg_max - 1] - a > half) return HistoricWitness{arg_max, n, avg[arg_max - 1] - a};
        if (a - avg[arg_min - 1] > half) return HistoricWitness{n, arg_min, a - avg[arg_min - 1]};
    }
    return std::nullopt;
}

enum class Phase { NearP, TransitOut, InD, TransitBack };
enum class CheckpointKind { High, Low };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::NearP: return "NearP";
        case Phase::TransitOut: return "TransitOut";
        case Phase::InD: return "InD";
        case Phase::TransitBack: return "TransitBack";
    }
    return "?";
}
inline const char* to_string(CheckpointKind k) { return k == CheckpointKind::High ? "high" : "low"; }

struct Block {
    Phase phase;
    std::size_t length;

    friend bool operator==(const Block&, const Block&) = default;
};

struct ScheduleCheckpoint {
    std::size_t n;
    CheckpointKind kind;
    /// High: guaranteed lower bound on a_n. Low: guaranteed upper bound.
    Rational bound;

    friend bool operator==(const ScheduleCheckpoint&, const ScheduleCheckpoint&) = default;
};

/// Upper bounds on the steering lengths of the two transit phases. The back
/// transit includes the final landing symbol.
struct TransitBounds {
    std::size_t out = 6;
    std::size_t back = 8;

    friend bool operator==(const TransitBounds&, const TransitBounds&) = default;
};

struct Schedule {
    std::size_t N = 0;
    Rational slack;
    TransitBounds transit;
    std::vector<Block> blocks;
    std::vector<ScheduleCheckpoint> checkpoints;

    std::size_t horizon() const {
        std::size_t n = 0;
        for (const Block& b : blocks) n += b.length;
        return n;
    }
    friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline constexpr std::size_t kDefaultMaxHorizon = 1000000;

/// Transit bounds for a concrete system. Leaving P: the NearP block ends with
/// the fiber in [lambda*one/2, lambda*one], which needs k expansions until its
/// lower end clears eps. Returning: an enclosure of width >= L reaches full
/// width of B after ceil(log_lambda(|B|/L)) expansions, plus the landing symbol
/// and one spare step.
inline TransitBounds transit_bounds(const SkewSystem& sys, const ObservableSpec& spec) {
    const SystemParams& p = sys.params();
    const Interval& b = sys.region();
    TransitBounds t;
    Rational lo = p.lambda * spec.one / Rational(2);
    std::size_t out = 0;
    while (!(lo > b.lo())) {
        lo *= p.lambda;
        ++out;
    }
    t.out = out + 1;

    const auto cover = check_covering(sys.ifs(), b);
    if (!cover.covered) throw PreconditionError("covering property is not certified for B = " + b.str());
    Rational width = *cover.lebesgue_number;
    std::size_t back = 0;
    while (width < b.width()) {
        width *= p.lambda;
        ++back;
    }
    t.back = back + 2;
    return t;
}

/// Alternating block plan realising the high (> 7/8) and low (< 1/8)
/// checkpoint inequalities with a margin `slack`. Transit steps count as
/// possibly nonzero for low checkpoints and as non-one for high ones.
///
/// The plan holds depth + 1 checkpoints: the first high one at n = N, then
/// alternately low and high. Consecutive checkpoints form the depth pairs.
inline Schedule make_schedule(std::size_t N, std::size_t depth, const Rational& slack, TransitBounds transit = {},
                              std::size_t max_horizon = kDefaultMaxHorizon) {
    if (depth < 1) throw ScheduleError("depth must be at least 1");
    if (N < 1) throw ScheduleError("N must be at least 1");
    const Rational eighth(1, 8);
    if (!(Rational(0) < slack && slack < eighth)) throw ScheduleError("slack must satisfy 0 < slack < 1/8, got " + slack.str());
    if (transit.back < 1) throw ScheduleError("back transit needs at least the landing symbol");

    const Rational high = Rational(7, 8) + slack;
    const Rational low = eighth - slack;

    Schedule s;
    s.N = N;
    s.slack = slack;
    s.transit = transit;

    std::size_t n = N;
    std::size_t ones = N;
    std::size_t possibly_nonzero = N;
    std::size_t last_long_block = N;
    s.blocks.push_back({Phase::NearP, N});
    s.checkpoints.push_back({n, CheckpointKind::High, Rational(1)});

    auto to_size = [&](const mpz_class& z) -> std::size_t {
        if (z <= 0) return 0;
        if (!z.fits_ulong_p()) throw ScheduleError("schedule length overflow");
        return z.get_ui();
    };

    for (std::size_t k = 1; k <= depth; ++k) {
        if (k % 2 == 1) {
            n += transit.out;
            possibly_nonzero += transit.out;
            s.blocks.push_back({Phase::TransitOut, transit.out});
            // possibly_nonzero / (n + b) <= low
            const Rational need = Rational(static_cast<long>(possibly_nonzero)) / low;
            std::size_t b = to_size(ceil(need)) > n ? to_size(ceil(need)) - n : 1;
            b = std::max({b, last_long_block + 1, std::size_t{1}});
            n += b;
            last_long_block = b;
            s.blocks.push_back({Phase::InD, b});
            s.checkpoints.push_back({n, CheckpointKind::Low,
                                     Rational(static_cast<long>(possibly_nonzero)) / Rational(static_cast<long>(n))});
        } else {
            n += transit.back;
            possibly_nonzero += transit.back;
            s.blocks.push_back({Phase::TransitBack, transit.back});
            // (ones + a) / (n + a) >= high
            const Rational need =
                (high * Rational(static_cast<long>(n)) - Rational(static_cast<long>(ones))) / (Rational(1) - high);
            std::size_t a = std::max({to_size(ceil(need)), last_long_block + 1, std::size_t{1}});
            n += a;
            ones += a;
            possibly_nonzero += a;
            last_long_block = a;
            s.blocks.push_back({Phase::NearP, a});
            s.checkpoints.push_back(
                {n, CheckpointKind::High, Rational(static_cast<long>(ones)) / Rational(static_cast<long>(n))});
        }
        if (n > max_horizon)
            throw ScheduleError("schedule horizon " + std::to_string(n) + " exceeds the limit " +
                                std::to_string(max_horizon));
    }
    return s;
}

struct CheckpointPair {
    std::size_t n1;  // high
    std::size_t n2;  // low
    Rational avg1;
    Rational avg2;

    friend bool operator==(const CheckpointPair&, const CheckpointPair&) = default;
};

struct HistoricCertificate {
    SystemParams params;
    ObservableSpec observable;
    std::size_t N = 0;
    Schedule schedule;
    std::vector<Block> realized_blocks;
    std::vector<CheckpointPair> pairs;
    Rational gap;
    CylinderConstraint constraint;
    Point chosen_point;

    std::size_t horizon() const { return constraint.word.size(); }
};

namespace detail {

/// NearP enclosure of a block of length a: [delta/2, delta] with
/// delta = one / lambda^(a-1), so that a steps of g_1 keep |x| <= one.
inline Interval near_p_enclosure(const SkewSystem& sys, const ObservableSpec& spec, std::size_t a) {
    const Rational delta = spec.one / pow(sys.params().lambda, a - 1);
    return Interval::closed(delta / Rational(2), delta);
}

struct RealizedBounds {
    std::size_t n;
    CheckpointKind kind;
    Rational guaranteed;  // ones/n for high, possibly-nonzero/n for low
};

inline std::vector<RealizedBounds> realized_checkpoints(const std::vector<Block>& blocks) {
    std::vector<RealizedBounds> out;
    std::size_t n = 0, ones = 0, nonzero = 0;
    for (const Block& b : blocks) {
        n += b.length;
        if (b.phase == Phase::NearP) ones += b.length;
        if (b.phase != Phase::InD) nonzero += b.length;
        const auto size_q = [](std::size_t v) { return Rational(static_cast<long>(v)); };
        if (b.phase == Phase::NearP) out.push_back({n, CheckpointKind::High, size_q(ones) / size_q(n)});
        if (b.phase == Phase::InD) out.push_back({n, CheckpointKind::Low, size_q(nonzero) / size_q(n)});
    }
    return out;
}

}  // namespace detail

/// Synthesises a point whose partial averages oscillate according to
/// `schedule`, then recomputes its orbit and averages exactly.
///
/// Runs forward over the blocks, maintaining the fiber enclosure of the
/// current time; NearP blocks apply g_1, transits steer, InD blocks stay in
/// B. Every clip shrinks the current enclosure only, so one pull-back of the
/// final enclosure yields the start set for the whole word.
inline HistoricCertificate construct_historic_point(const SkewSystem& sys, const ObservableSpec& spec,
                                                    const Schedule& schedule) {
    validate(spec, sys.params());
    const auto cover = check_covering(sys.ifs(), sys.region());
    if (!cover.covered) throw PreconditionError("covering property is not certified");
    if (!distal_report(sys, spec.zero).is_distal) throw PreconditionError("fixed point is not certified distal");
    if (schedule.blocks.empty() || schedule.blocks.front().phase != Phase::NearP)
        throw ScheduleError("schedule must start with a NearP block");

    const Interval& b = sys.region();
    const Interval near_region = Interval::closed(-spec.one, spec.one);

    HistoricCertificate cert;
    cert.params = sys.params();
    cert.observable = spec;
    cert.N = schedule.N;
    cert.schedule = schedule;

    Interval current = detail::near_p_enclosure(sys, spec, schedule.blocks.front().length);
    Word& word = cert.constraint.word;
    auto& regions = cert.constraint.checkpoints;

    for (std::size_t k = 0; k < schedule.blocks.size(); ++k) {
        const Block& block = schedule.blocks[k];
        const std::size_t t0 = word.size();
        std::size_t length = block.length;
        try {
            switch (block.phase) {
                case Phase::NearP: {
                    if (!detail::near_p_enclosure(sys, spec, block.length).contains(current))
                        throw SteeringError(0, "NearP block entered outside its start window");
                    for (std::size_t i = 0; i < block.length; ++i) {
                        word.push_back(1);
                        current = sys.fiber_map(1)(current);
                    }
                    regions.push_back({t0, t0 + block.length - 1, near_region});
                    break;
                }
                case Phase::TransitOut: {
                    auto c = steer_into(sys, current, b, fiber_chart(), block.length);
                    word.append(c.word);
                    current = c.end_enclosure;
                    length = c.word.size();
                    regions.push_back({t0, t0 + length, fiber_chart()});
                    break;
                }
                case Phase::InD: {
                    auto c = stay_in(sys, current, block.length);
                    word.append(c.word);
                    current = c.end_enclosure;
                    regions.push_back({t0, t0 + block.length, b});
                    break;
                }
                case Phase::TransitBack: {
                    if (k + 1 >= schedule.blocks.size() || schedule.blocks[k + 1].phase != Phase::NearP)
                        throw ScheduleError("TransitBack must be followed by a NearP block");
                    const Interval landing = detail::near_p_enclosure(sys, spec, schedule.blocks[k + 1].length);
                    const Interval target = sys.inverse_fiber_map(2)(landing);
                    auto c = steer_into(sys, current, target, b, block.length - 1);
                    word.append(c.word);
                    regions.push_back({t0, t0 + c.word.size(), b});
                    word.push_back(2);
                    current = sys.fiber_map(2)(c.end_enclosure);
                    length = c.word.size() + 1;
                    break;
                }
            }
        } catch (const SteeringError& e) {
            throw SteeringError(t0 + e.step(), "block " + std::to_string(k) + " (" + to_string(block.phase) +
                                                   "): " + e.what());
        } catch (const PreconditionError& e) {
            throw SteeringError(t0, "block " + std::to_string(k) + " (" + to_string(block.phase) + "): " + e.what());
        }
        cert.realized_blocks.push_back({block.phase, length});
    }

    const AffineMap total = forward_map(sys, word);
    cert.constraint.start_enclosure = total.inverse()(current);
    cert.constraint.end_enclosure = current;
    if (cert.constraint.start_enclosure.is_point())
        throw CertificateAssemblyError("start enclosure collapsed to a point");
    cert.chosen_point = sys.realize_base(word, cert.constraint.start_enclosure.midpoint());

    // Exact replay of the chosen point.
    const std::size_t horizon = word.size();
    std::vector<Rational> avg;
    avg.reserve(horizon);
    Rational sum(0);
    visit_orbit(sys, cert.chosen_point, horizon, [&](std::size_t t, const Point& p, int symbol) {
        if (symbol != word[t])
            throw CertificateAssemblyError("realised itinerary departs from the word at step " + std::to_string(t));
        sum += observable_value(spec, p.fiber);
        avg.push_back(sum / Rational(static_cast<long>(t + 1)));
    });

    const auto checkpoints = detail::realized_checkpoints(cert.realized_blocks);
    const Rational seven_eighths(7, 8), eighth(1, 8);
    for (const auto& c : checkpoints) {
        const Rational& a = avg[c.n - 1];
        const bool ok = c.kind == CheckpointKind::High ? (a >= c.guaranteed && c.guaranteed > seven_eighths)
                                                        : (a <= c.guaranteed && c.guaranteed < eighth);
        if (!ok)
            throw CertificateAssemblyError("average " + a.str() + " at n=" + std::to_string(c.n) +
                                           " misses its bound " + c.guaranteed.str());
        if (c.n < schedule.N) throw CertificateAssemblyError("checkpoint before N");
    }
    for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i) {
        const auto& x = checkpoints[i];
        const auto& y = checkpoints[i + 1];
        const auto& hi = x.kind == CheckpointKind::High ? x : y;
        const auto& lo = x.kind == CheckpointKind::High ? y : x;
        cert.pairs.push_back({hi.n, lo.n, avg[hi.n - 1], avg[lo.n - 1]});
    }
    if (cert.pairs.empty()) throw ScheduleError("schedule yields no checkpoint pair");
    cert.gap = cert.pairs.front().avg1 - cert.pairs.front().avg2;
    for (const auto& p : cert.pairs) cert.gap = min(cert.gap, p.avg1 - p.avg2);
    if (!(cert.gap > Rational(1, 2))) throw CertificateAssemblyError("gap " + cert.gap.str() + " is not above 1/2");
    return cert;
}

struct Verdict {
    bool passed = true;
    std::string reason;

    explicit operator bool() const noexcept { return passed; }
    static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

/// Independent replay of a certificate: rebuilds the orbit of the chosen
/// point from scratch and checks the itinerary, every timed region (by exact
/// interval propagation of the start enclosure), every average and every pair
/// inequality. Nothing from the certificate is trusted beyond its claims.
inline Verdict verify_certificate(const SkewSystem& sys, const ObservableSpec& spec, const HistoricCertificate& cert) {
    if (!(cert.params == sys.params())) return Verdict::fail("certificate was issued for different system parameters");
    if (!(cert.observable == spec)) return Verdict::fail("certificate was issued for a different observable");
    const CylinderConstraint& c = cert.constraint;
    const std::size_t horizon = c.word.size();
    if (horizon == 0) return Verdict::fail("empty word");
    if (cert.pairs.empty()) return Verdict::fail("no checkpoint pairs");

    std::size_t realized = 0;
    for (const Block& b : cert.realized_blocks) realized += b.length;
    if (realized != horizon) return Verdict::fail("realised block lengths do not add up to the word length");

    const Schedule& plan = cert.schedule;
    if (plan.N != cert.N) return Verdict::fail("schedule N differs from the certificate's N");
    if (plan.checkpoints.size() < 2) return Verdict::fail("schedule has fewer than two checkpoints");
    try {
        const Schedule regenerated = make_schedule(plan.N, plan.checkpoints.size() - 1, plan.slack, plan.transit,
                                                   std::numeric_limits<std::size_t>::max());
        if (!(regenerated == plan)) return Verdict::fail("schedule is not the plan its own parameters generate");
    } catch (const ScheduleError& e) {
        return Verdict::fail(std::string("schedule parameters are invalid: ") + e.what());
    }
    if (cert.realized_blocks.size() != plan.blocks.size())
        return Verdict::fail("realised blocks do not match the schedule");
    for (std::size_t k = 0; k < plan.blocks.size(); ++k) {
        const Block& want = plan.blocks[k];
        const Block& got = cert.realized_blocks[k];
        const bool transit = want.phase == Phase::TransitOut || want.phase == Phase::TransitBack;
        if (got.phase != want.phase || (transit ? got.length > want.length : got.length != want.length))
            return Verdict::fail("realised block " + std::to_string(k) + " does not fit the schedule");
    }
    const auto realized_cps = detail::realized_checkpoints(cert.realized_blocks);
    if (cert.pairs.size() + 1 != realized_cps.size()) return Verdict::fail("pair count does not match the schedule");
    for (std::size_t i = 0; i < cert.pairs.size(); ++i) {
        const auto& x = realized_cps[i];
        const auto& y = realized_cps[i + 1];
        const std::size_t hi = x.kind == CheckpointKind::High ? x.n : y.n;
        const std::size_t lo = x.kind == CheckpointKind::High ? y.n : x.n;
        if (cert.pairs[i].n1 != hi || cert.pairs[i].n2 != lo)
            return Verdict::fail("pair " + std::to_string(i) + " is not at the realised checkpoints");
    }

    if (!c.start_enclosure.contains(cert.chosen_point.fiber))
        return Verdict::fail("chosen point lies outside the start enclosure");
    for (const TimedRegion& r : c.checkpoints)
        if (r.first > r.last || r.last > horizon) return Verdict::fail("timed region out of range");
    if (auto bad = first_violation(sys, c)) return Verdict::fail("checkpoint violated at time " + std::to_string(*bad));
    if (!(cert.chosen_point == sys.realize_base(c.word, cert.chosen_point.fiber)))
        return Verdict::fail("chosen point's base is not the realisation of the word");

    std::vector<Rational> avg;
    try {
        Rational sum(0);
        std::optional<std::size_t> departure;
        visit_orbit(sys, cert.chosen_point, horizon, [&](std::size_t t, const Point& p, int symbol) {
            if (!departure && symbol != c.word[t]) departure = t;
            sum += observable_value(spec, p.fiber);
            avg.push_back(sum / Rational(static_cast<long>(t + 1)));
        });
        if (departure)
            return Verdict::fail("itinerary of the chosen point departs from the word at step " +
                                 std::to_string(*departure));
    } catch (const OrbitEscapeError& e) {
        return Verdict::fail(e.what());
    }

    std::optional<Rational> gap;
    for (std::size_t i = 0; i < cert.pairs.size(); ++i) {
        const CheckpointPair& p = cert.pairs[i];
        const std::string tag = "pair " + std::to_string(i) + ": ";
        if (p.n1 < cert.N || p.n2 < cert.N) return Verdict::fail(tag + "index below N");
        if (p.n1 == 0 || p.n2 == 0 || p.n1 > horizon || p.n2 > horizon) return Verdict::fail(tag + "index out of range");
        if (avg[p.n1 - 1] != p.avg1) return Verdict::fail(tag + "avg1 does not match the replay");
        if (avg[p.n2 - 1] != p.avg2) return Verdict::fail(tag + "avg2 does not match the replay");
        const Rational d = p.avg1 - p.avg2;
        if (!(d > Rational(1, 2))) return Verdict::fail(tag + "difference " + d.str() + " is not above 1/2");
        gap = gap ? min(*gap, d) : d;
    }
    if (*gap != cert.gap) return Verdict::fail("gap does not equal the smallest pair difference");
    return {};
}

}  // namespace blender

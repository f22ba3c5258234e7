#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blender/errors.hpp"
#include "blender/ifs.hpp"
#include "blender/interval.hpp"
#include "blender/rational.hpp"

namespace blender {

/// Parameters of the one-step skew product f(w, x) = (F(w), g_i(x)) with
/// g_1(x) = lambda x and g_2(x) = lambda x - mu.
struct SystemParams {
    Rational lambda{3, 2};
    Rational mu{1, 2};
    Rational eps{1, 100};
    int s_dim = 1;
    int uu_dim = 1;
    Rational kappa{1, 3};  // base stable contraction
    Rational rho{3};       // base strong-unstable expansion
    Rational delta0{1, 1000};  // local unstable fiber radius at P

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Max-norm chart bound for the fiber coordinate; orbits leaving it escape.
inline const Rational& fiber_chart_bound() {
    static const Rational bound(2);
    return bound;
}

inline Interval fiber_chart() { return Interval::closed(-fiber_chart_bound(), fiber_chart_bound()); }

struct Point {
    std::vector<Rational> base_s;
    std::vector<Rational> base_uu;
    Rational fiber;

    friend bool operator==(const Point&, const Point&) = default;
};

struct OrbitEntry {
    Point point;
    int symbol;
};

/// Checks the parameter inequalities; throws ParameterError naming the first
/// one that fails.
inline void validate(const SystemParams& p) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ParameterError("parameter check failed: " + what);
    };
    require(Rational(1) < p.lambda, "1 < lambda");
    require(p.lambda < Rational(2), "lambda < 2");
    require(Rational(0) < p.mu, "0 < mu");
    require(p.mu < Rational(1), "mu < 1");
    require(Rational(0) < p.eps, "0 < eps");
    require(p.eps < (p.mu + Rational(1)) / p.lambda - p.eps, "eps < (mu+1)/lambda - eps (B nonempty)");
    require(Rational(0) < p.kappa, "0 < kappa");
    require(p.kappa < Rational(1), "kappa < 1");
    // Two disjoint vertical strips of width 2*kappa inside [-1,1].
    require(p.kappa < Rational(1, 2), "kappa < 1/2 (disjoint vertical strips)");
    require(Rational(1) < p.rho, "1 < rho");
    // Two disjoint horizontal strips of width 2/rho inside [-1,1].
    require(Rational(2) < p.rho, "rho > 2 (disjoint horizontal strips)");
    require(p.s_dim >= 1 && p.s_dim <= 3, "1 <= s_dim <= 3");
    require(p.uu_dim >= 1 && p.uu_dim <= 3, "1 <= uu_dim <= 3");
    require(Rational(0) < p.delta0, "0 < delta0");
}

/// Prototypical blender-horseshoe on [-1,1]^{s+uu} x R.
///
/// Base branch i acts coordinatewise: stable coordinates contract by kappa
/// toward the anchor a_i (a_1 = -1, a_2 = +1), strong-unstable coordinates
/// expand by rho away from the same anchor. H_i is the product of the full
/// stable cube with the uu-strip of width 2/rho at the anchor; V_i is the
/// product of the s-strip of width 2*kappa at the anchor with the full
/// uu-cube. Both branches preserve orientation.
class SkewSystem {
public:
    explicit SkewSystem(SystemParams params) : p_(std::move(params)) {
        validate(p_);
        const Rational one(1);
        b_ = Interval::open(p_.eps, (p_.mu + one) / p_.lambda - p_.eps);
        fiber_[0] = {p_.lambda, Rational(0)};
        fiber_[1] = {p_.lambda, -p_.mu};
        const Rational anchor[2] = {Rational(-1), Rational(1)};
        for (int i = 0; i < 2; ++i) {
            s_map_[i] = {p_.kappa, anchor[i] * (one - p_.kappa)};
            uu_map_[i] = {p_.rho, anchor[i] * (one - p_.rho)};
        }
        h_strip_[0] = Interval::closed(Rational(-1), Rational(-1) + Rational(2) / p_.rho);
        h_strip_[1] = Interval::closed(one - Rational(2) / p_.rho, one);
        v_strip_[0] = Interval::closed(Rational(-1), Rational(-1) + Rational(2) * p_.kappa);
        v_strip_[1] = Interval::closed(one - Rational(2) * p_.kappa, one);

        // Fixed point of branch 1: anchor -1 is fixed by both base maps, and
        // g_1(0) = 0.
        fixed_point_.base_s.assign(static_cast<std::size_t>(p_.s_dim), fixed_coordinate(s_map_[0]));
        fixed_point_.base_uu.assign(static_cast<std::size_t>(p_.uu_dim), fixed_coordinate(uu_map_[0]));
        fixed_point_.fiber = Rational(0);
    }

    const SystemParams& params() const noexcept { return p_; }
    /// B = (eps, (mu+1)/lambda - eps).
    const Interval& region() const noexcept { return b_; }
    const Point& fixed_point() const noexcept { return fixed_point_; }

    /// Expanding fiber map g_symbol.
    const AffineMap& fiber_map(int symbol) const { return fiber_.at(index(symbol)); }
    /// Contracting inverse phi_symbol = g_symbol^{-1}.
    AffineMap inverse_fiber_map(int symbol) const { return fiber_map(symbol).inverse(); }
    AffineIFS ifs() const { return AffineIFS({inverse_fiber_map(1), inverse_fiber_map(2)}); }

    const AffineMap& stable_map(int symbol) const { return s_map_.at(index(symbol)); }
    const AffineMap& unstable_map(int symbol) const { return uu_map_.at(index(symbol)); }
    /// uu-extent of the horizontal rectangle H_symbol.
    const Interval& horizontal_strip(int symbol) const { return h_strip_.at(index(symbol)); }
    /// s-extent of the vertical rectangle V_symbol.
    const Interval& vertical_strip(int symbol) const { return v_strip_.at(index(symbol)); }

    /// Branch whose horizontal rectangle holds the base of z, if any.
    std::optional<int> branch_of(const Point& z) const {
        const Interval cube = Interval::closed(Rational(-1), Rational(1));
        for (const Rational& s : z.base_s)
            if (!cube.contains(s)) return std::nullopt;
        for (int symbol = 1; symbol <= 2; ++symbol) {
            bool inside = true;
            for (const Rational& u : z.base_uu) inside = inside && horizontal_strip(symbol).contains(u);
            if (inside) return symbol;
        }
        return std::nullopt;
    }

    /// Applies the branch of `symbol` unconditionally.
    Point apply_branch(const Point& z, int symbol) const {
        Point out;
        out.base_s.reserve(z.base_s.size());
        out.base_uu.reserve(z.base_uu.size());
        for (const Rational& s : z.base_s) out.base_s.push_back(stable_map(symbol)(s));
        for (const Rational& u : z.base_uu) out.base_uu.push_back(unstable_map(symbol)(u));
        out.fiber = fiber_map(symbol)(z.fiber);
        return out;
    }

    /// Inverse of apply_branch.
    Point inverse_branch(const Point& z, int symbol) const {
        Point out;
        const AffineMap s_inv = stable_map(symbol).inverse();
        const AffineMap u_inv = unstable_map(symbol).inverse();
        for (const Rational& s : z.base_s) out.base_s.push_back(s_inv(s));
        for (const Rational& u : z.base_uu) out.base_uu.push_back(u_inv(u));
        out.fiber = inverse_fiber_map(symbol)(z.fiber);
        return out;
    }

    /// Base point whose forward itinerary starts with `word` and then stays
    /// in H_1 forever: nested pull-back of the branch-1 fixed uu-coordinate.
    /// The stable coordinates are free and are taken from P.
    Point realize_base(const Word& word, const Rational& fiber) const {
        Rational u = fixed_coordinate(uu_map_[0]);
        for (auto it = word.symbols().rbegin(); it != word.symbols().rend(); ++it)
            u = unstable_map(*it).inverse()(u);
        Point z;
        z.base_s = fixed_point_.base_s;
        z.base_uu.assign(static_cast<std::size_t>(p_.uu_dim), u);
        z.fiber = fiber;
        return z;
    }

private:
    static std::size_t index(int symbol) {
        if (symbol < 1 || symbol > 2) throw PreconditionError("symbol must be 1 or 2");
        return static_cast<std::size_t>(symbol - 1);
    }
    static Rational fixed_coordinate(const AffineMap& m) { return m.offset / (Rational(1) - m.slope); }

    SystemParams p_;
    Interval b_ = Interval::point(Rational(0));
    std::array<AffineMap, 2> fiber_;
    std::array<AffineMap, 2> s_map_;
    std::array<AffineMap, 2> uu_map_;
    std::array<Interval, 2> h_strip_{Interval::point(Rational(0)), Interval::point(Rational(0))};
    std::array<Interval, 2> v_strip_{Interval::point(Rational(0)), Interval::point(Rational(0))};
    Point fixed_point_;
};

inline SkewSystem build_system(const SystemParams& params) { return SkewSystem(params); }

inline std::string describe(const Point& z) {
    std::string out = "(s=[";
    for (std::size_t i = 0; i < z.base_s.size(); ++i) out += (i ? ", " : "") + z.base_s[i].str();
    out += "], uu=[";
    for (std::size_t i = 0; i < z.base_uu.size(); ++i) out += (i ? ", " : "") + z.base_uu[i].str();
    return out + "], x=" + z.fiber.str() + ")";
}

/// One step of f. The step index in a thrown OrbitEscapeError is 0.
inline std::pair<Point, int> step(const SkewSystem& sys, const Point& z) {
    if (abs(z.fiber) > fiber_chart_bound()) throw OrbitEscapeError(0, "fiber outside chart at " + describe(z));
    const auto symbol = sys.branch_of(z);
    if (!symbol) throw OrbitEscapeError(0, "base outside H1 ∪ H2 at " + describe(z));
    return {sys.apply_branch(z, *symbol), *symbol};
}

/// Calls visit(t, z_t, symbol_t) for t < n without storing the orbit.
template <class Visitor>
void visit_orbit(const SkewSystem& sys, const Point& z, std::size_t n, Visitor&& visit) {
    Point current = z;
    for (std::size_t t = 0; t < n; ++t) {
        std::pair<Point, int> next;
        try {
            next = step(sys, current);
        } catch (const OrbitEscapeError&) {
            throw OrbitEscapeError(t, describe(current));
        }
        visit(t, static_cast<const Point&>(current), next.second);
        current = std::move(next.first);
    }
}

/// z_0, ..., z_{n-1} with the symbol taken at each. Escape reports the index
/// of the first point outside the domain.
inline std::vector<OrbitEntry> orbit(const SkewSystem& sys, const Point& z, std::size_t n) {
    std::vector<OrbitEntry> out;
    out.reserve(n);
    Point current = z;
    for (std::size_t t = 0; t < n; ++t) {
        std::pair<Point, int> next;
        try {
            next = step(sys, current);
        } catch (const OrbitEscapeError&) {
            throw OrbitEscapeError(t, describe(current));
        }
        out.push_back({std::move(current), next.second});
        current = std::move(next.first);
    }
    return out;
}

struct HyperbolicityReport {
    bool chain_holds = false;
    Rational norm_s;    // ‖Df|E^s‖
    Rational norm_cu;   // ‖Df|E^cu‖
    Rational conorm_uu; // m(Df|E^uu)
    Rational gamma_hat;
    Rational nu_hat;
};

/// For the affine model the bundle norms are the constants (kappa, lambda,
/// rho). gamma_hat = 1/lambda is the tightest witness; nu_hat is the midpoint
/// of (1/rho, 1/lambda).
inline HyperbolicityReport hyperbolicity_report(const SystemParams& p) {
    HyperbolicityReport r;
    r.norm_s = p.kappa;
    r.norm_cu = p.lambda;
    r.conorm_uu = p.rho;
    r.gamma_hat = Rational(1) / p.lambda;
    r.nu_hat = (Rational(1) / p.rho + r.gamma_hat) / Rational(2);
    const Rational one(1);
    r.chain_holds = r.norm_s < one && one < r.norm_cu && r.norm_cu <= one / r.gamma_hat &&
                    one / r.gamma_hat < one / r.nu_hat && one / r.nu_hat < r.conorm_uu;
    return r;
}

inline HyperbolicityReport hyperbolicity_report(const SkewSystem& sys) { return hyperbolicity_report(sys.params()); }

struct DistalReport {
    bool is_distal = false;
    Rational distance_to_family;
    Rational r_max;
    Word witness_word;
};

/// Distance of P from closure(V x B) in the max metric, and the number of
/// g_1 iterates after which the local unstable fiber (-delta0, delta0) of P
/// reaches into B.
inline DistalReport distal_report(const SkewSystem& sys, const Rational& r) {
    if (r.sign() <= 0) throw PreconditionError("distal radius must be positive");
    const SystemParams& p = sys.params();
    const Point& P = sys.fixed_point();

    // Base distance to V = V_1 ∪ V_2 (each V_i spans the full uu-cube).
    std::optional<Rational> base_distance;
    for (int symbol = 1; symbol <= 2; ++symbol) {
        Rational d(0);
        for (const Rational& s : P.base_s) d = max(d, sys.vertical_strip(symbol).distance(s));
        if (!base_distance || d < *base_distance) base_distance = d;
    }
    const Rational fiber_distance = sys.region().closure().distance(P.fiber);

    DistalReport rep;
    rep.distance_to_family = max(*base_distance, fiber_distance);
    rep.r_max = rep.distance_to_family;

    constexpr std::size_t kMaxWitnessLength = 100000;
    Rational reach = p.delta0;
    std::size_t n = 0;
    while (n < kMaxWitnessLength) {
        reach *= p.lambda;
        ++n;
        if (reach > sys.region().lo()) break;
    }
    const bool found = reach > sys.region().lo();
    if (found) rep.witness_word = Word::repeat(1, n);
    rep.is_distal = found && rep.distance_to_family >= r && rep.distance_to_family.sign() > 0;
    return rep;
}

}  // namespace blender

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blender/errors.hpp"
#include "blender/ifs.hpp"
#include "blender/interval.hpp"
#include "blender/skew_system.hpp"

namespace blender {

/// Almost-vertical uu-disc D(y) = (h_s, y, h_c(y)), y in [-1,1]^uu, with
/// constant stable part and affine fiber part h_c(y) = center + sum_k slope_k y_k.
class VerticalDisc {
public:
    VerticalDisc(std::vector<Rational> base_anchor, Rational center, std::vector<Rational> slopes)
        : base_anchor_(std::move(base_anchor)), center_(std::move(center)), slopes_(std::move(slopes)) {}

    /// Constant vertical disc through fiber value x.
    static VerticalDisc constant(const SkewSystem& sys, const Rational& x) {
        return {sys.fixed_point().base_s, x,
                std::vector<Rational>(static_cast<std::size_t>(sys.params().uu_dim), Rational(0))};
    }

    const std::vector<Rational>& base_anchor() const noexcept { return base_anchor_; }
    const Rational& center() const noexcept { return center_; }
    const std::vector<Rational>& slopes() const noexcept { return slopes_; }

    /// Max-norm Lipschitz constant of h_c.
    Rational lipschitz_c() const {
        Rational c(0);
        for (const Rational& a : slopes_) c += abs(a);
        return c;
    }

    /// h_c([-1,1]^uu); its width equals lipschitz_c * diam([-1,1]^uu).
    Interval fiber_range() const {
        const Rational c = lipschitz_c();
        return Interval::closed(center_ - c, center_ + c);
    }

    friend bool operator==(const VerticalDisc&, const VerticalDisc&) = default;

private:
    std::vector<Rational> base_anchor_;
    Rational center_;
    std::vector<Rational> slopes_;
};

struct Condition {
    bool holds = false;
    std::string detail;
};

struct BlenderReport {
    Condition cond1;  // maximal invariant set / Markov geometry
    Condition cond2;  // H_i x B_i maps over V_i x B
    Condition cond3;  // closure(B) covered with Lebesgue number L
    Condition cond4;  // c_hat_max < L
    std::vector<Interval> sub_regions;  // B_i = phi_i(B)
    CoveringCertificate covering;
    std::optional<Rational> lebesgue_number;
    Rational c_hat_max;
    /// Largest Lipschitz bound whose one-step growth by lambda stays below L.
    std::optional<Rational> max_admissible_c_hat;
    DistalReport distal;
    bool overall = false;
};

/// Checks the four covering conditions for the one-step model.
///
/// cond1 is structural: F maps each H_i affinely onto V_i and the strips are
/// pairwise disjoint, giving a full shift on two symbols. cond2 is checked on
/// both the open and the closed form, g_i(B_i) ⊂ B and g_i(cl B_i) ⊂ cl B.
/// cond3 runs the exact covering certifier; cond4 compares c_hat_max with L
/// (c_hat_max = 0 for the unperturbed one-step model).
inline BlenderReport covering_conditions_report(const SkewSystem& sys, const Rational& c_hat_max,
                                                std::optional<Rational> distal_radius = std::nullopt) {
    BlenderReport rep;
    rep.c_hat_max = c_hat_max;
    const Interval& b = sys.region();
    const Interval unit = Interval::closed(Rational(-1), Rational(1));

    {
        bool ok = !sys.horizontal_strip(1).intersect(sys.horizontal_strip(2)) &&
                  !sys.vertical_strip(1).intersect(sys.vertical_strip(2));
        for (int i = 1; i <= 2 && ok; ++i) {
            ok = sys.unstable_map(i)(sys.horizontal_strip(i)) == unit && sys.stable_map(i)(unit) == sys.vertical_strip(i);
        }
        rep.cond1 = {ok, ok ? "F maps H_i onto V_i; strips disjoint" : "branch geometry is not a full shift"};
    }

    {
        bool ok = true;
        for (int i = 1; i <= 2; ++i) {
            const Interval bi = sys.inverse_fiber_map(i)(b);
            rep.sub_regions.push_back(bi);
            const AffineMap& g = sys.fiber_map(i);
            ok = ok && b.contains(g(bi)) && b.closure().contains(g(bi.closure()));
        }
        rep.cond2 = {ok, ok ? "g_i(B_i) ⊂ B and g_i(cl B_i) ⊂ cl B" : "some g_i(B_i) leaves B"};
    }

    rep.covering = check_covering(sys.ifs(), b);
    rep.lebesgue_number = rep.covering.lebesgue_number;
    rep.cond3 = {rep.covering.covered,
                 rep.covering.covered ? "L = " + rep.lebesgue_number->str()
                                      : "uncovered point " + rep.covering.witness->str()};
    if (rep.lebesgue_number) rep.max_admissible_c_hat = *rep.lebesgue_number / sys.params().lambda;

    const bool c4 = rep.lebesgue_number && c_hat_max < *rep.lebesgue_number;
    rep.cond4 = {c4, rep.lebesgue_number ? c_hat_max.str() + (c4 ? " < " : " >= ") + rep.lebesgue_number->str()
                                         : "no Lebesgue number"};

    rep.distal = distal_report(sys, distal_radius.value_or(sys.params().eps / Rational(2)));
    rep.overall = rep.cond1.holds && rep.cond2.holds && rep.cond3.holds && rep.cond4.holds;
    return rep;
}

/// One application of strict invariance: picks a symbol whose inverse image
/// of B contains the whole fiber range, and returns the sub-disc of f(D)
/// over the uu-cube. The sub-disc's slopes are the old ones times
/// lambda/rho, so the family stays admissible under iteration.
class InvarianceStepper {
public:
    explicit InvarianceStepper(const SkewSystem& sys) : sys_(&sys), report_(covering_conditions_report(sys, Rational(0))) {
        if (!report_.overall) throw PreconditionError("covering conditions do not hold; no strictly invariant family");
        for (int i = 1; i <= 2; ++i) preimages_.push_back(sys.inverse_fiber_map(i)(sys.region()));
    }

    const Rational& lebesgue_number() const { return *report_.lebesgue_number; }

    /// Admissible: fiber range inside cl B (the covered set), and both its
    /// width and Lipschitz bound below L. Images land in the open B.
    bool admissible(const VerticalDisc& d) const {
        const Interval range = d.fiber_range();
        return sys_->region().closure().contains(range) && range.width() < lebesgue_number() &&
               d.lipschitz_c() < lebesgue_number() &&
               d.slopes().size() == static_cast<std::size_t>(sys_->params().uu_dim) &&
               d.base_anchor().size() == static_cast<std::size_t>(sys_->params().s_dim);
    }

    std::pair<int, VerticalDisc> step(const VerticalDisc& d) const {
        if (!admissible(d)) throw PreconditionError("disc is not admissible (fiber range " + d.fiber_range().str() + ")");
        const Interval range = d.fiber_range();
        std::optional<int> symbol;
        for (int i = 1; i <= 2 && !symbol; ++i)
            if (preimages_[static_cast<std::size_t>(i - 1)].contains(range)) symbol = i;
        if (!symbol) throw InvarianceError("no branch maps fiber range " + range.str() + " into B");

        const SystemParams& p = sys_->params();
        const Rational anchor = *symbol == 1 ? Rational(-1) : Rational(1);
        // Restriction of D to H_i: y = anchor + (y' - anchor)/rho for y' in the cube.
        Rational center = d.center();
        std::vector<Rational> slopes;
        const Rational shift = anchor * (Rational(1) - Rational(1) / p.rho);
        for (const Rational& a : d.slopes()) {
            center += a * shift;
            slopes.push_back(p.lambda * a / p.rho);
        }
        center = sys_->fiber_map(*symbol)(center);
        std::vector<Rational> base;
        for (const Rational& s : d.base_anchor()) base.push_back(sys_->stable_map(*symbol)(s));
        VerticalDisc image(std::move(base), std::move(center), std::move(slopes));
        if (!sys_->region().contains(image.fiber_range()))
            throw InvarianceError("image fiber range " + image.fiber_range().str() + " leaves B");
        return {*symbol, std::move(image)};
    }

private:
    const SkewSystem* sys_;
    BlenderReport report_;
    std::vector<Interval> preimages_;
};

inline std::pair<int, VerticalDisc> strict_invariance_step(const SkewSystem& sys, const VerticalDisc& disc) {
    return InvarianceStepper(sys).step(disc);
}

}  // namespace blender

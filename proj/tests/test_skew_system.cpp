#include <gtest/gtest.h>

#include "blender/skew_system.hpp"
#include "support.hpp"

using namespace blender;
using blender::testing::Gen;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

Point at(const Rational& s, const Rational& uu, const Rational& x) { return Point{{s}, {uu}, x}; }

}  // namespace

TEST(BuildSystem, Defaults) {
    const SkewSystem sys = build_system(SystemParams{});
    EXPECT_EQ(sys.region(), Interval::open(q(1, 100), q(99, 100)));
    const Point& P = sys.fixed_point();
    EXPECT_EQ(P.fiber, q(0));
    EXPECT_EQ(P.base_s, std::vector<Rational>{q(-1)});
    EXPECT_EQ(P.base_uu, std::vector<Rational>{q(-1)});
    const auto [image, symbol] = step(sys, P);
    EXPECT_EQ(image, P);
    EXPECT_EQ(symbol, 1);
}

TEST(BuildSystem, HigherDimensions) {
    SystemParams p;
    p.s_dim = 3;
    p.uu_dim = 2;
    const SkewSystem sys = build_system(p);
    EXPECT_EQ(sys.fixed_point().base_s.size(), 3u);
    EXPECT_EQ(sys.fixed_point().base_uu.size(), 2u);
    EXPECT_EQ(step(sys, sys.fixed_point()).first, sys.fixed_point());
}

TEST(BuildSystem, RejectsBadParameters) {
    auto with = [](auto edit) {
        SystemParams p;
        edit(p);
        return p;
    };
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.mu = q(0); })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.eps = q(1, 2); })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.kappa = q(1); })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.lambda = q(2); })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.rho = q(2); })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.uu_dim = 4; })), ParameterError);
    EXPECT_THROW(build_system(with([](SystemParams& p) { p.delta0 = q(0); })), ParameterError);
    try {
        build_system(with([](SystemParams& p) { p.eps = q(1, 2); }));
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("B nonempty"), std::string::npos);
    }
}

TEST(BuildSystem, BranchGeometry) {
    const SkewSystem sys = build_system(SystemParams{});
    const Interval cube = Interval::closed(q(-1), q(1));
    EXPECT_FALSE(sys.horizontal_strip(1).intersect(sys.horizontal_strip(2)).has_value());
    EXPECT_FALSE(sys.vertical_strip(1).intersect(sys.vertical_strip(2)).has_value());
    for (int i = 1; i <= 2; ++i) {
        EXPECT_EQ(sys.unstable_map(i)(sys.horizontal_strip(i)), cube);
        EXPECT_EQ(sys.stable_map(i)(cube), sys.vertical_strip(i));
    }
    EXPECT_EQ(sys.horizontal_strip(1), Interval::closed(q(-1), q(-1, 3)));
    EXPECT_EQ(sys.vertical_strip(2), Interval::closed(q(1, 3), q(1)));
}

TEST(BuildSystem, FiberMapsInvertExactly) {
    const SkewSystem sys = build_system(SystemParams{});
    Gen gen(41);
    for (int k = 0; k < 200; ++k) {
        const Rational x = gen.rational(q(-2), q(2), 997);
        for (int i = 1; i <= 2; ++i) {
            EXPECT_EQ(sys.fiber_map(i)(sys.inverse_fiber_map(i)(x)), x);
            EXPECT_EQ(sys.inverse_fiber_map(i)(sys.fiber_map(i)(x)), x);
        }
    }
}

TEST(Step, Examples) {
    const SkewSystem sys = build_system(SystemParams{});
    const auto [a, sa] = step(sys, at(q(0), q(1), q(1, 3)));
    EXPECT_EQ(sa, 2);
    EXPECT_EQ(a.fiber, q(0));
    const auto [b, sb] = step(sys, at(q(0), q(-1), q(1, 100)));
    EXPECT_EQ(sb, 1);
    EXPECT_EQ(b.fiber, q(3, 200));
}

TEST(Step, BaseOutsideHorizontalStripsEscapes) {
    const SkewSystem sys = build_system(SystemParams{});
    EXPECT_THROW(step(sys, at(q(0), q(0), q(0))), OrbitEscapeError);
    EXPECT_THROW(step(sys, at(q(2), q(-1), q(0))), OrbitEscapeError);
}

TEST(Orbit, FixedPoint) {
    const SkewSystem sys = build_system(SystemParams{});
    const auto o = orbit(sys, sys.fixed_point(), 5);
    ASSERT_EQ(o.size(), 5u);
    for (const auto& e : o) {
        EXPECT_EQ(e.point, sys.fixed_point());
        EXPECT_EQ(e.symbol, 1);
    }
    EXPECT_TRUE(orbit(sys, sys.fixed_point(), 0).empty());
}

TEST(Orbit, EscapeReportsStepIndex) {
    const SkewSystem sys = build_system(SystemParams{});
    try {
        orbit(sys, at(q(-1), q(-1), q(2)), 10);
        FAIL() << "expected escape";
    } catch (const OrbitEscapeError& e) {
        EXPECT_EQ(e.step(), 1u);  // 2 is on the chart boundary, 3 is not
    }
    try {
        orbit(sys, at(q(-1), q(-1), q(1, 100)), 50);
        FAIL() << "expected escape";
    } catch (const OrbitEscapeError& e) {
        // (3/2)^k / 100 first exceeds 2 at k = 14.
        EXPECT_EQ(e.step(), 14u);
    }
}

TEST(Hyperbolicity, Defaults) {
    const SkewSystem sys = build_system(SystemParams{});
    const HyperbolicityReport h = hyperbolicity_report(sys);
    EXPECT_TRUE(h.chain_holds);
    EXPECT_EQ(h.norm_s, q(1, 3));
    EXPECT_EQ(h.norm_cu, q(3, 2));
    EXPECT_EQ(h.conorm_uu, q(3));
    EXPECT_EQ(h.gamma_hat, q(2, 3));
    EXPECT_EQ(h.nu_hat, q(1, 2));

    // Difference quotients along actual steps reproduce the norms.
    const Point z1 = at(q(1, 5), q(-9, 10), q(1, 10));
    const Point z2 = at(q(1, 7), q(-7, 10), q(1, 7));
    const Point w1 = step(sys, z1).first, w2 = step(sys, z2).first;
    EXPECT_EQ((w1.base_s[0] - w2.base_s[0]) / (z1.base_s[0] - z2.base_s[0]), h.norm_s);
    EXPECT_EQ((w1.fiber - w2.fiber) / (z1.fiber - z2.fiber), h.norm_cu);
    EXPECT_EQ((w1.base_uu[0] - w2.base_uu[0]) / (z1.base_uu[0] - z2.base_uu[0]), h.conorm_uu);
}

TEST(Hyperbolicity, EqualCenterAndStrongRatesBreakTheChain) {
    SystemParams p;
    p.rho = p.lambda;
    EXPECT_FALSE(hyperbolicity_report(p).chain_holds);
}

TEST(Distal, Defaults) {
    const SkewSystem sys = build_system(SystemParams{});
    const DistalReport d = distal_report(sys, q(1, 200));
    EXPECT_TRUE(d.is_distal);
    EXPECT_EQ(d.distance_to_family, q(1, 100));
    EXPECT_EQ(d.witness_word, Word::repeat(1, 6));
    EXPECT_GT(pow(q(3, 2), 6) * q(1, 1000), q(1, 100));
    EXPECT_LE(pow(q(3, 2), 5) * q(1, 1000), q(1, 100));
    EXPECT_FALSE(distal_report(sys, q(1, 50)).is_distal);
    EXPECT_TRUE(distal_report(sys, q(1, 100)).is_distal);
    EXPECT_THROW(distal_report(sys, q(0)), PreconditionError);
}

TEST(Property, BranchRoundTrip) {
    const SkewSystem sys = build_system(SystemParams{});
    Gen gen(42);
    for (int k = 0; k < 1000; ++k) {
        const int i = static_cast<int>(gen.integer(1, 2));
        const Interval& h = sys.horizontal_strip(i);
        const Point z = at(gen.rational(q(-1), q(1)), gen.rational(h.lo(), h.hi()), gen.rational(q(-1), q(1)));
        const auto [image, symbol] = step(sys, z);
        ASSERT_EQ(symbol, i);
        ASSERT_EQ(sys.inverse_branch(image, i), z);
        // And the other way round, starting in V_i.
        const Interval& v = sys.vertical_strip(i);
        const Point w = at(gen.rational(v.lo(), v.hi()), gen.rational(q(-1), q(1)), gen.rational(q(-1), q(1)));
        ASSERT_EQ(step(sys, sys.inverse_branch(w, i)).first, w);
    }
}

TEST(Property, SymbolRegressionRecoversItinerary) {
    const SkewSystem sys = build_system(SystemParams{});
    const AffineIFS ifs = sys.ifs();
    const Rational lambda = sys.params().lambda, mu = sys.params().mu;
    Gen gen(43);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> symbols;
        for (int k = 0; k < 60; ++k) symbols.push_back(static_cast<int>(gen.integer(1, 2)));
        const Word word(symbols);
        // A fiber value whose forward orbit under the word stays in [0, 1].
        const Rational x0 = code_to_enclosure(ifs, word, Interval::point(gen.rational(q(0), q(1)))).lo();
        const auto o = orbit(sys, sys.realize_base(word, x0), word.size());
        for (std::size_t t = 0; t + 1 < o.size(); ++t) {
            ASSERT_EQ(o[t].symbol, word[t]);
            const Rational jump = (lambda * o[t].point.fiber - o[t + 1].point.fiber) / mu;
            ASSERT_TRUE(jump == q(0) || jump == q(1));
            ASSERT_EQ(jump == q(1) ? 2 : 1, o[t].symbol);
        }
    }
}

TEST(Property, ChainMonotoneInBaseRates) {
    Gen gen(44);
    for (int k = 0; k < 500; ++k) {
        SystemParams p;
        p.lambda = gen.inner(q(1), q(2), 100);
        p.kappa = gen.inner(q(0), q(3, 2), 100);
        p.rho = gen.inner(q(1), q(4), 100);
        const bool before = hyperbolicity_report(p).chain_holds;
        SystemParams stronger = p;
        stronger.kappa = p.kappa * gen.inner(q(0), q(1), 50);
        stronger.rho = p.rho + gen.rational(q(0), q(2), 50);
        if (before) {
            ASSERT_TRUE(hyperbolicity_report(stronger).chain_holds);
        }
    }
}

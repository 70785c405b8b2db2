#include "property_checks.hpp"

#include <gtest/gtest.h>

using namespace divforge;
using namespace propcheck;

TEST(BlowUp, PullbackIsAnIsometry) {
    EXPECT_EQ(blowup_isometry(1000, 20260417), "");
    SurfaceModel base = elliptic_base();
    SurfaceModel up = base.blow_up({"x", {{"F1", 1}}, {}}).blow_up({"y", {}, "x"});
    EXPECT_EQ(up.self_intersection(gen("e[x]")), -1);
    EXPECT_EQ(up.intersect(gen("e[x]"), gen("e[y]")), 0);
    EXPECT_TRUE(up.linearly_equivalent(up.canonical(), base.canonical() + gen("e[x]") + gen("e[y]")));
}

TEST(Reduce, IdempotentAndClassPreserving) {
    SurfaceModel s = elliptic_base().blow_up({"x", {}, {}});
    std::mt19937 rng(7);
    for (int k = 0; k < 1000; ++k) {
        DivisorClass d = random_class(s, rng) + DivisorClass::tag("t", k % 3);
        DivisorClass r = s.reduce(d);
        ASSERT_EQ(s.reduce(r), r);
        ASSERT_TRUE(s.linearly_equivalent(d, r));
        ASSERT_EQ(s.self_intersection(d), s.self_intersection(r));
        ASSERT_EQ(s.intersect(d, s.canonical()), s.intersect(r, s.canonical()));
    }
}

TEST(Ledger, RiemannRochHoldsOnEveryCorpusEntry) {
    std::size_t checked = 0;
    EXPECT_EQ(ledger_rr_consistency(&checked), "");
    EXPECT_GT(checked, 20u);
}

TEST(FundamentalCycle, AgreesWithBruteForceOnSmallGraphs) {
    CycleSweep r = fundamental_cycle_sweep(5);
    EXPECT_EQ(r.failure, "");
    EXPECT_GT(r.definite, 100u);
    EXPECT_GT(r.configs, r.definite);
}

TEST(FundamentalCycle, BruteForceOracleOnKnownGraphs) {
    // A3 chain and D4 star
    std::vector<std::vector<long>> a3{{-2, 1, 0}, {1, -2, 1}, {0, 1, -2}};
    EXPECT_EQ(brute_minimal(a3, 3), (std::vector<long>{1, 1, 1}));
    std::vector<std::vector<long>> d4{{-2, 1, 1, 1}, {1, -2, 0, 0}, {1, 0, -2, 0}, {1, 0, 0, -2}};
    EXPECT_EQ(brute_minimal(d4, 3), (std::vector<long>{2, 1, 1, 1}));
    EXPECT_TRUE(sylvester_negative_definite(d4));
    EXPECT_FALSE(sylvester_negative_definite({{-1, 1}, {1, -1}}));
}

TEST(Peel, IndependentOfCandidateOrder) { EXPECT_EQ(peel_order_independence(50, 99), ""); }

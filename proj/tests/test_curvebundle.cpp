#include "divforge/curvebundle.hpp"

#include <gtest/gtest.h>

using namespace divforge;

namespace {

using E = CurveClassExpr;

BaseCurve with_alpha(int g) {
    BaseCurve c(g);
    c.add_torsion({"alpha", {}, 2, true});
    return c;
}

BaseCurve elliptic_ab() {
    BaseCurve c(1);
    for (const char* p : {"Q1", "Q2", "Q3", "a", "b"}) c.add_point(p);
    c.add_torsion({"t", {{"a", 1}, {"b", -1}}, 2, true});
    return c;
}

}  // namespace

TEST(CurveDegree, MinusKPlusAlphaHasDegreeTwoMinusTwoQ) {
    for (int q = 3; q <= 7; ++q) {
        BaseCurve c = with_alpha(q);
        E d = -E::canonical() + E::torsion_symbol("alpha");
        // independent oracle: torsion contributes nothing, -K contributes -(2q-2)
        EXPECT_EQ(c.degree(d), 2 - 2 * q) << "q=" << q;
    }
}

TEST(CurveDegree, CanonicalAndZero) {
    BaseCurve c(4);
    EXPECT_EQ(c.degree(E::canonical()), 6);
    EXPECT_EQ(c.degree(E{}), 0);
}

TEST(CurveReduce, TorsionReducesModuloOrder) {
    BaseCurve c = elliptic_ab();
    E ab = E::point("a") - E::point("b");
    EXPECT_TRUE(c.reduce(Integer(2) * ab).empty());
    EXPECT_EQ(c.reduce(Integer(3) * ab), c.reduce(ab));
    EXPECT_TRUE(c.is_nonzero_torsion(c.reduce(ab)));
}

TEST(CurveReduce, PreservesDegree) {
    BaseCurve c = elliptic_ab();
    E e = Integer(3) * E::point("a") + E::point("Q1") - Integer(5) * E::point("b");
    EXPECT_EQ(c.degree(c.reduce(e)), c.degree(e));
}

TEST(CurveH0, NegativeTorsionHasNoSections) {
    BaseCurve c = with_alpha(3);
    EXPECT_EQ(value_of(c.h0(-E::torsion_symbol("alpha"))), 0);
}

TEST(CurveH0, MinusDIsCanonicalMinusAlpha) {
    for (int q = 3; q <= 6; ++q) {
        BaseCurve c = with_alpha(q);
        EXPECT_EQ(value_of(c.h0(E::canonical() - E::torsion_symbol("alpha"))), q - 1);
    }
}

TEST(CurveH0, MultiplesOfMinusD) {
    for (int q = 3; q <= 5; ++q)
        for (int m = 2; m <= 4; ++m) {
            BaseCurve c = with_alpha(q);
            E minus_d = E::canonical() - E::torsion_symbol("alpha");
            EXPECT_EQ(value_of(c.h0(Integer(m) * minus_d)), m * (2 * q - 2) + 1 - q);
        }
}

TEST(CurveH1, CanonicalPlusAlphaAndStructureSheaf) {
    BaseCurve c = with_alpha(4);
    EXPECT_EQ(value_of(c.h1(E::canonical() + E::torsion_symbol("alpha"))), 0);
    EXPECT_EQ(value_of(c.h1(E{})), 4);
    EXPECT_EQ(value_of(c.h1(E::canonical() + E::canonical())), 0);
}

TEST(CurveRR, PrymCaseAndTrivialCase) {
    BaseCurve c = with_alpha(5);
    E ka = E::canonical() + E::torsion_symbol("alpha");
    EXPECT_EQ(value_of(c.h0(ka)), 4);
    EXPECT_EQ(c.rr(ka), value_of(c.h0(ka)) - value_of(c.h1(ka)));
    EXPECT_EQ(c.rr(E{}), 1 - 5);
}

TEST(CurveRR, EllipticMultiplesOfThree) {
    BaseCurve c = elliptic_ab();
    for (int m = 1; m <= 4; ++m) {
        E d = Integer(m) * (E::point("Q1") + E::point("Q2") + E::point("Q3"));
        EXPECT_EQ(value_of(c.h0(d)), 3 * m);
    }
}

TEST(CurveRR, UndecidedClassNeedsDeclaration) {
    BaseCurve c(3);
    c.add_point("p");
    c.add_point("r");
    CurveH0 v = c.h0(E::point("p") + E::point("r"));
    ASSERT_FALSE(resolved(v));
    c.add_fact({E::point("p") + E::point("r"), 1, "general points"});
    EXPECT_EQ(value_of(c.h0(E::point("p") + E::point("r"))), 1);
}

TEST(CurveRR, ContradictingFactRejected) {
    BaseCurve c(2);
    EXPECT_THROW(c.add_fact({E::canonical(), 1, "wrong"}), Error);
}

TEST(CurvePositivity, Thresholds) {
    BaseCurve c = with_alpha(3);
    E minus_d = E::canonical() - E::torsion_symbol("alpha");
    for (int a = 2; a <= 4; ++a) EXPECT_EQ(c.positivity(Integer(a) * minus_d), Positivity::VeryAmple);
    c.add_point("p");
    EXPECT_EQ(c.positivity(Integer(6) * E::point("p")), Positivity::BasePointFree);
    EXPECT_EQ(c.positivity(Integer(5) * E::point("p")), Positivity::Unknown);
}

TEST(CurveErrors, TorsionOnRationalCurveAndUnknownSymbols) {
    BaseCurve p1(0);
    EXPECT_THROW(p1.add_torsion({"alpha", {}, 2, true}), Error);
    BaseCurve c(2);
    EXPECT_THROW(c.h0(E::point("nowhere")), UnknownName);
    EXPECT_THROW(c.h0(E::torsion_symbol("beta")), UnknownName);
}

TEST(CurveRR, OracleSweepAgreesWithRiemannRoch) {
    // h0 - h1 = deg + 1 - g wherever both are decided
    for (int g = 1; g <= 5; ++g) {
        BaseCurve c = with_alpha(g);
        c.add_point("p");
        for (int k = -2; k <= 3; ++k)
            for (int n = -3; n <= 8; ++n)
                for (int t = 0; t <= 1; ++t) {
                    E e = Integer(k) * E::canonical() + Integer(n) * E::point("p") + Integer(t) * E::torsion_symbol("alpha");
                    CurveH0 a = c.h0(e), b = c.h1(e);
                    if (resolved(a) && resolved(b))
                        EXPECT_EQ(value_of(a) - value_of(b), c.degree(e) + 1 - g) << e.str() << " g=" << g;
                }
    }
}

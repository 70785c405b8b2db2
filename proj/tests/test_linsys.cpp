#include "divforge/linsys.hpp"

#include <gtest/gtest.h>

using namespace divforge;

namespace {

using Cmp = Ledger::Cmp;

DivisorClass g(const std::string& n, long c = 1) { return DivisorClass::generator(n, c); }
DivisorClass e(int i, long c = 1) { return g("e[x" + std::to_string(i) + "]", c); }

// Plane blown up at x1..x10 with the sextic J, the conic Q through x4..x8,
// the line M through x9, x10 and the degree 18 curve C.
SurfaceModel plane_model() {
    SurfaceModel s = SurfaceModel::plane();
    s.add_curve({"J", g("l", 6), {}, true});
    s.add_curve({"C", g("l", 18), {}, true, true});
    s.add_curve({"Q", g("l", 2), {}, true, true, true});
    s.add_curve({"M", g("l"), {}, true, true, true});
    for (int i = 1; i <= 10; ++i) {
        std::vector<std::pair<std::string, Integer>> hosts{{"J", 2}, {"C", i <= 3 ? 4 : 6}};
        if (i >= 4 && i <= 8) hosts.emplace_back("Q", 1);
        if (i >= 9) hosts.emplace_back("M", 1);
        s = s.blow_up({"x" + std::to_string(i), hosts, {}});
    }
    return s;
}

// Expected count of plane curves of degree d with the given point multiplicities.
long plane_count(long d, const std::vector<std::pair<int, long>>& mults) {
    long v = (d + 2) * (d + 1) / 2;
    for (const auto& [i, m] : mults) v -= m * (m + 1) / 2;
    return v;
}

DivisorClass plane_class(long d, const std::vector<std::pair<int, long>>& mults) {
    DivisorClass c = g("l", d);
    for (const auto& [i, m] : mults) c += e(i, -m);
    return c;
}

std::vector<std::pair<int, long>> range_mult(int from, int to, long m) {
    std::vector<std::pair<int, long>> v;
    for (int i = from; i <= to; ++i) v.emplace_back(i, m);
    return v;
}

template <class... V>
std::vector<std::pair<int, long>> cat(V... parts) {
    std::vector<std::pair<int, long>> out;
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

Integer exact(const Interval& iv) {
    EXPECT_TRUE(iv.exact()) << iv.str();
    return iv.lo;
}

// F4 with towers over F1, F2, F3 (the model Y).
SurfaceModel f4_y(bool with_f_towers = false) {
    SurfaceModel s = SurfaceModel::ruled(0, 4, {"P", "P1", "P2", "P3"});
    s.set_bundle(Integer(-4) * CurveClassExpr::point("pt"));
    s.set_canonical(g("C0", -2) + g("f[P1]", -2) + g("f[P2]", -2) + g("f[P3]", -2));
    s.add_curve({"C0", g("C0"), {}, true, true, true});
    s.add_curve({"F", g("f[P]"), {}, true, true, true});
    for (int i = 1; i <= 3; ++i) s.add_curve({"F" + std::to_string(i), g("f[P" + std::to_string(i) + "]"), {}, true, true, true});
    std::vector<std::string> fibers{"F1", "F2", "F3"};
    if (with_f_towers) fibers.push_back("F");
    for (const auto& f : fibers)
        for (int j = 1; j <= 2; ++j) {
            std::string t = f.substr(1) + std::to_string(j);
            s = s.blow_up({"x" + t, {{f, 1}}, {}});
            s = s.blow_up({"y" + t, {{f, 1}}, "x" + t});
            s = s.blow_up({"z" + t, {}, "y" + t});
        }
    return s;
}

std::vector<std::string> peel_candidates(const SurfaceModel& s) {
    std::vector<std::string> out;
    for (const auto& c : s.curves()) out.push_back(c.name);
    return out;
}

}  // namespace

TEST(Restriction, RationalCurves) {
    SurfaceModel s = plane_model();
    const CurveRecord& j = s.curve("J");
    auto r = std::get<Restriction>(restrict_coh(s, j, s.curve("C").cls));
    EXPECT_EQ(r.h0, 1);
    EXPECT_EQ(r.h1, 0);
    const CurveRecord& m = s.curve("M");
    auto rm = std::get<Restriction>(restrict_coh(s, m, plane_class(4, cat(range_mult(4, 8, 1), range_mult(9, 10, 2)))));
    EXPECT_EQ(rm.h0, 1);
    EXPECT_EQ(rm.h1, 0);
    auto rb = std::get<Restriction>(restrict_coh(s, s.curve("E[x1]"), e(1, 2)));
    EXPECT_EQ(s.intersect(e(1, 2), s.curve("E[x1]").cls), -2);
    EXPECT_EQ(rb.h0, 0);
    EXPECT_EQ(rb.h1, 1);
}

TEST(Ledger, PlaneChainReplaysEveryNode) {
    SurfaceModel s = plane_model();
    Ledger led;
    auto cubic = range_mult(4, 10, 1);
    auto quartic = cat(range_mult(4, 8, 1), range_mult(9, 10, 2));
    auto sextic = range_mult(4, 10, 2);
    auto dodecic = cat(range_mult(1, 3, 2), range_mult(4, 10, 4));
    led.fact(s, 0, plane_class(3, cubic), Cmp::Eq, 3, "general nodes");
    led.ses(s, plane_class(4, quartic), "M");
    led.ses(s, plane_class(6, sextic), "Q");
    led.ses(s, plane_class(12, dodecic), "J");
    led.ses(s, s.curve("C").cls, "J");
    // every node agrees with the expected-count oracle
    EXPECT_EQ(exact(led.h(s, 0, plane_class(3, cubic))), plane_count(3, cubic));
    EXPECT_EQ(exact(led.h(s, 0, plane_class(4, quartic))), plane_count(4, quartic));
    EXPECT_EQ(exact(led.h(s, 0, plane_class(6, sextic))), plane_count(6, sextic));
    EXPECT_EQ(exact(led.h(s, 0, plane_class(12, dodecic))), plane_count(12, dodecic));
    EXPECT_EQ(exact(led.h(s, 1, plane_class(12, dodecic))), 0);
    EXPECT_EQ(exact(led.restriction(s, 0, "J", plane_class(12, dodecic))), 5);
    EXPECT_EQ(exact(led.h(s, 0, s.curve("C").cls)), 13);
    EXPECT_EQ(plane_count(18, cat(range_mult(1, 3, 4), range_mult(4, 10, 6))), 13);
    EXPECT_TRUE(led.rr_consistent(s));
}

TEST(Ledger, LeftExactnessGivesZero) {
    SurfaceModel s = plane_model();
    Ledger led;
    DivisorClass a = -s.canonical();
    led.ses(s, a, "J");
    EXPECT_EQ(exact(led.h(s, 0, a - s.curve("J").cls)), 0);
    EXPECT_EQ(exact(led.restriction(s, 0, "J", a)), 0);
    EXPECT_EQ(exact(led.h(s, 0, a)), 0);
}

TEST(Ledger, SerreLinkOnPlaneModel) {
    SurfaceModel s = plane_model();
    Ledger led;
    DivisorClass d = -s.canonical() - s.curve("C").cls;
    led.fact(s, 0, plane_class(12, cat(range_mult(1, 3, 2), range_mult(4, 10, 4))), Cmp::Eq, 12, "chain");
    led.serre(s, d);
    EXPECT_EQ(exact(led.h(s, 2, d)), 12);
    EXPECT_EQ(exact(led.h(s, 0, d)), 0);
    EXPECT_EQ(exact(led.h(s, 1, d)), 0);
    EXPECT_EQ(exact(led.h(s, 0, s.canonical())), 0);
    EXPECT_EQ(exact(led.h(s, 2, DivisorClass{})), 0);
}

TEST(Ledger, ContradictionCarriesTrace) {
    SurfaceModel s = SurfaceModel::plane();
    Ledger led;
    try {
        led.fact(s, 0, g("l", 2), Cmp::Eq, 5, "wrong");
        FAIL() << "expected a contradiction";
    } catch (const LedgerContradiction& c) {
        EXPECT_FALSE(c.trace().empty());
    }
}

TEST(Ledger, PointConditionsBound) {
    SurfaceModel s = plane_model();
    Ledger led;
    led.conditions(s, g("l", 3) - e(1), g("l", 3));
    EXPECT_EQ(led.h(s, 0, g("l", 3) - e(1)).lo, 9);
    EXPECT_THROW(led.conditions(s, g("l", 3) + e(1), g("l", 3)), Error);
}

TEST(Peel, ModelYFixedAndMobileParts) {
    SurfaceModel y = f4_y();
    auto cands = peel_candidates(y);
    PeelResult k = fixed_part_peel(y, -y.canonical(), cands);
    EXPECT_EQ(y.reduce(k.mobile), DivisorClass{});
    EXPECT_TRUE(y.linearly_equivalent(k.fixed, -y.canonical()));
    EXPECT_EQ(k.multiplicities.at("C0"), 2);
    EXPECT_EQ(k.multiplicities.at("F1"), 2);
    EXPECT_EQ(k.multiplicities.at("E[y11]"), 2);
    EXPECT_EQ(k.multiplicities.at("E[z11]"), 1);
    PeelResult k2 = fixed_part_peel(y, Integer(-2) * y.canonical(), cands);
    EXPECT_TRUE(y.linearly_equivalent(k2.mobile, g("f", 3)));
    EXPECT_EQ(k2.multiplicities.count("F"), 0u);
}

TEST(Peel, FinalModelHasNoMobilePart) {
    SurfaceModel x = f4_y(true);
    PeelResult k2 = fixed_part_peel(x, Integer(-2) * x.canonical(), peel_candidates(x));
    EXPECT_EQ(k2.mobile, DivisorClass{});
    EXPECT_EQ(k2.multiplicities.at("F"), 3);
}

TEST(Peel, NothingToPeelAndDivergence) {
    SurfaceModel s = SurfaceModel::plane();
    s.add_curve({"M", g("l"), {}, true, true, true});
    PeelResult r = fixed_part_peel(s, g("l", 2), {"M"});
    EXPECT_EQ(r.fixed, DivisorClass{});
    EXPECT_EQ(r.mobile, g("l", 2));
    // a fiber has square zero, so subtracting it never raises the degree on it
    SurfaceModel q = SurfaceModel::ruled(0, 0, {"P"});
    q.add_curve({"F", g("f[P]"), {}, true, true, true});
    EXPECT_THROW(fixed_part_peel(q, g("f", 2) - g("C0"), {"F"}, 5), Error);
}

TEST(NefBig, EllipticDecomposition) {
    SurfaceModel s = SurfaceModel::ruled(1, 3, {"Q1", "Q2", "Q3", "a", "b"});
    s.add_torsion({"t", {{"a", 1}, {"b", -1}}, 2, true});
    s.set_bundle(-CurveClassExpr::point("Q1") - CurveClassExpr::point("Q2") - CurveClassExpr::point("Q3") -
                 CurveClassExpr::point("a") + CurveClassExpr::point("b"));
    s.add_curve({"C0", g("C0"), {}, true, true});
    for (int i = 1; i <= 3; ++i) s.add_curve({"F" + std::to_string(i), g("f[Q" + std::to_string(i) + "]"), {}, true, true, true});
    s.add_curve({"C", Integer(3) * (g("C0") - s.fiber_class(*s.bundle())), {}, true, true});
    Decomposition parts{{"C0", 1}};
    for (int i = 1; i <= 3; ++i) {
        parts.emplace_back("F" + std::to_string(i), 2);
        for (int j = 1; j <= 3; ++j) {
            std::string x = "x" + std::to_string(i) + std::to_string(j);
            s = s.blow_up({x, {{"F" + std::to_string(i), 1}, {"C", 1}}, {}});
            parts.emplace_back("E[" + x + "]", 2);
        }
    }
    DivisorClass kc = s.canonical() + s.curve("C").cls;
    Certificate nef = nef_on_effective(s, kc, parts);
    EXPECT_TRUE(nef.conclusion);
    Certificate big = big_check(s, nef);
    EXPECT_TRUE(big.conclusion);
    EXPECT_GT(big.self_intersection, 0);
    EXPECT_TRUE(recheck(s, big));
}

TEST(NefBig, ExceptionalCurveAndFiber) {
    SurfaceModel s = SurfaceModel::ruled(0, 1, {"P"}).blow_up({"x", {}, {}});
    s.add_curve({"F", g("f[P]"), {}, true, true, true});
    EXPECT_FALSE(nef_on_effective(s, s.curve("E[x]").cls, {{"E[x]", 1}}).conclusion);
    Certificate f = nef_on_effective(s, g("f[P]"), {{"F", 1}});
    EXPECT_TRUE(f.conclusion);
    EXPECT_FALSE(big_check(s, f).conclusion);
    EXPECT_THROW(nef_on_effective(s, g("f[P]"), {{"F", 2}}), Error);
}

TEST(Counting, ExpectedDimension) {
    std::vector<Integer> m{4, 4, 4, 6, 6, 6, 6, 6, 6, 6};
    EXPECT_EQ(expected_dim_plane(18, m), 12);
    EXPECT_EQ(expected_dim_plane(3, std::vector<Integer>(7, 1)), 2);
    EXPECT_EQ(expected_dim_plane(1, {}), 2);
    EXPECT_EQ(expected_dim_plane(2, std::vector<Integer>(9, 1)), -1);
}

TEST(Counting, PluckerGenus) {
    std::vector<Integer> m{4, 4, 4, 6, 6, 6, 6, 6, 6, 6};
    EXPECT_EQ(plucker_genus(18, m), 13);
    EXPECT_EQ(plucker_genus(6, std::vector<Integer>(10, 2)), 0);
    EXPECT_EQ(plucker_genus(3, {}), 1);
    EXPECT_THROW(plucker_genus(3, {3}), Error);
}

TEST(Counting, CastelnuovoSeveriAndProducts) {
    EXPECT_EQ(castelnuovo_severi_bound(2, 0, 3, 1), 5);
    EXPECT_EQ(castelnuovo_severi_bound(2, 1, 3, 1), 7);
    EXPECT_EQ(castelnuovo_severi_bound(2, 0, 2, 0), 1);
    EXPECT_EQ(product_curve_genus(4, 4), 9);
    EXPECT_EQ(product_curve_genus(2, 2), 1);
    for (int b = 1; b <= 5; ++b) EXPECT_EQ(product_curve_genus(1, b), 0);
}

TEST(DropTests, PointAndPairs) {
    EXPECT_TRUE(bpf_drop_test(12, 11));
    EXPECT_FALSE(bpf_drop_test(12, 12));
    EXPECT_FALSE(bpf_drop_test(12, 10));
    EXPECT_TRUE(separation_drop_test(12, 10));
    EXPECT_FALSE(separation_drop_test(12, 11));
    EXPECT_FALSE(separation_drop_test(12, 9));
}

TEST(Plurigenus, Parity) {
    EXPECT_EQ(plurigenus_parity_bound(1), 0);
    EXPECT_EQ(plurigenus_parity_bound(2), 1);
    EXPECT_EQ(plurigenus_parity_bound(3), 0);
}

TEST(Reider, F4BoxHasNoObstruction) {
    SurfaceModel s = SurfaceModel::ruled(0, 4, {"P", "P1", "P2", "P3"});
    s.set_bundle(Integer(-4) * CurveClassExpr::point("pt"));
    s.add_curve({"C0", g("C0"), {}, true, true, true});
    s.add_curve({"F", g("f[P]"), {}, true, true, true});
    for (int i = 1; i <= 3; ++i) s.add_curve({"F" + std::to_string(i), g("f[P" + std::to_string(i) + "]"), {}, true, true, true});
    DivisorClass c = Integer(4) * (g("C0") - s.fiber_class(*s.bundle()));
    ReiderResult r = reider_search(s, c, {{"C0", 4}, {"F", 4}, {"F1", 4}, {"F2", 4}, {"F3", 4}});
    ASSERT_TRUE(std::holds_alternative<NoObstruction>(r));
    EXPECT_EQ(std::get<NoObstruction>(r).examined, 5u * 5 * 5 * 5 * 5 - 1);
}

TEST(Reider, FiberWitnessAndEmptyBox) {
    SurfaceModel s = SurfaceModel::ruled(0, 4, {"P"});
    s.add_curve({"F", g("f[P]"), {}, true, true, true});
    DivisorClass c = g("C0") + g("f", 4);
    ReiderResult r = reider_search(s, c, {{"F", 2}});
    ASSERT_TRUE(std::holds_alternative<ReiderWitness>(r));
    EXPECT_EQ(std::get<ReiderWitness>(r).E, g("f[P]"));
    EXPECT_TRUE(std::holds_alternative<NoObstruction>(reider_search(s, c, {})));
    auto undecided = [](const DivisorClass&) -> std::optional<bool> { return std::nullopt; };
    EXPECT_THROW(reider_search(s, c, {{"F", 1}}, 4, undecided), Error);
}

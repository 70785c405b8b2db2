#pragma once

// Sections and pushforward h0 on decomposable ruled surfaces P(O + O(D)).

#include "divforge/curvebundle.hpp"
#include "divforge/picard.hpp"

#include <utility>

namespace divforge {

struct RuledPresentation {
    const SurfaceModel* surface = nullptr;
    CurveClassExpr D_class;
    bool decomposable = true;

    /// Reads D from the model; the bundle must have been set.
    static RuledPresentation of(const SurfaceModel& s) {
        if (s.kind() != SurfaceKind::Ruled) throw Error("not a ruled surface");
        if (!s.bundle()) throw Error("ruled surface has no bundle declared");
        RuledPresentation p{&s, *s.bundle(), s.decomposable()};
        if (s.base().degree(p.D_class) != -s.e_invariant()) throw Error("deg D must equal -e");
        return p;
    }
    static RuledPresentation of(SurfaceModel&&) = delete;  // would dangle

    const SurfaceModel& model() const { return *surface; }

    void require_decomposable() const {
        if (!decomposable) throw Error("operation requires a decomposable ruled surface");
    }
};

/// C1 = C0 - D.f, the section disjoint from C0.
inline DivisorClass c1_class(const RuledPresentation& p) {
    p.require_decomposable();
    return DivisorClass::generator("C0") - p.model().fiber_class(p.D_class);
}

/// h0(a C0 + delta f) = sum_{i=0}^{a} h0(delta + i D).
inline CurveH0 h0_ruled(const RuledPresentation& p, const Integer& a, const CurveClassExpr& delta) {
    p.require_decomposable();
    if (a < 0) throw Error("h0_ruled needs a >= 0");
    const BaseCurve& base = p.model().base();
    Integer total = 0;
    for (Integer i = 0; i <= a; ++i) {
        CurveH0 term = base.h0(delta + Integer(i) * p.D_class);
        if (!resolved(term)) return term;
        total += value_of(term);
    }
    return total;
}

/// Splits a class with no exceptional part into (C0 coefficient, base-curve class).
inline std::pair<Integer, CurveClassExpr> split_ruled(const SurfaceModel& s, const DivisorClass& d) {
    if (!s.is_pullback_from_minimal(d)) throw Error("class has exceptional components: " + d.str());
    return {d.coeff("C0"), s.base_class(d)};
}

/// h0 of a class pulled back from the minimal ruled model.  Negative C0
/// coefficient gives 0 since fibers are nef.
inline CurveH0 h0_ruled_class(const RuledPresentation& p, const DivisorClass& d) {
    auto [a, delta] = split_ruled(p.model(), d);
    if (a < 0) return Integer(0);
    return h0_ruled(p, a, delta);
}

struct AntibicanonicalH0 {
    CurveH0 minus_2k;
    CurveH0 minus_k;
};

inline AntibicanonicalH0 antibicanonical_h0(const RuledPresentation& p) {
    p.require_decomposable();
    const DivisorClass& k = p.model().canonical();
    return {h0_ruled_class(p, Integer(-2) * k), h0_ruled_class(p, -k)};
}

}  // namespace divforge

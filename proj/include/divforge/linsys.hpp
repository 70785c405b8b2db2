#pragma once

// Linear systems: the cohomology ledger (interval propagation over exact
// sequences and Riemann-Roch), fixed-part peeling, nef/big certificates,
// plane-curve counts, covering-genus bounds and the bounded Reider search.

#include "divforge/curvebundle.hpp"
#include "divforge/integer.hpp"
#include "divforge/picard.hpp"
#include "divforge/ruled.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace divforge {

enum class Rule {
    RiemannRoch,
    CurveRiemannRoch,
    SerreDualSurface,
    Structure,
    PlaneCurves,
    RuledPushforward,
    ExceptionalFixed,
    NefObstruction,
    Declared,
    DeclaredVanishing,
    Antieffective,
    KVVanishing,
    EffectiveNonvanishing,
    PointConditions,
    ExactSequence,
    RationalCurveRestriction,
    HighDegreeCurveRestriction,
    NegativeDegreeRestriction,
    PrymRestriction,
    FixedPartPeel,
};

inline const char* to_string(Rule r) {
    switch (r) {
        case Rule::RiemannRoch: return "RiemannRoch";
        case Rule::CurveRiemannRoch: return "CurveRiemannRoch";
        case Rule::SerreDualSurface: return "SerreDualSurface";
        case Rule::Structure: return "Structure";
        case Rule::PlaneCurves: return "PlaneCurves";
        case Rule::RuledPushforward: return "RuledPushforward";
        case Rule::ExceptionalFixed: return "ExceptionalFixed";
        case Rule::NefObstruction: return "NefObstruction";
        case Rule::Declared: return "Declared";
        case Rule::DeclaredVanishing: return "DeclaredVanishing";
        case Rule::Antieffective: return "Antieffective";
        case Rule::KVVanishing: return "KVVanishing";
        case Rule::EffectiveNonvanishing: return "EffectiveNonvanishing";
        case Rule::PointConditions: return "PointConditions";
        case Rule::ExactSequence: return "ExactSequence";
        case Rule::RationalCurveRestriction: return "RationalCurveRestriction";
        case Rule::HighDegreeCurveRestriction: return "HighDegreeCurveRestriction";
        case Rule::NegativeDegreeRestriction: return "NegativeDegreeRestriction";
        case Rule::PrymRestriction: return "PrymRestriction";
        case Rule::FixedPartPeel: return "FixedPartPeel";
    }
    return "?";
}

struct Interval {
    Integer lo = 0;
    std::optional<Integer> hi;

    bool exact() const { return hi && *hi == lo; }
    std::string str() const {
        if (exact()) return lo.str();
        return "[" + lo.str() + ", " + (hi ? hi->str() : std::string("inf")) + "]";
    }
};

class LedgerContradiction : public Error {
public:
    LedgerContradiction(const std::string& msg, std::vector<std::string> trace)
        : Error(msg), trace_(std::move(trace)) {}
    const std::vector<std::string>& trace() const { return trace_; }

private:
    std::vector<std::string> trace_;
};

// ---------------------------------------------------------------------------
// Certificates

enum class CertKind { Nef, Big, FixedPart, BasePointFree, Separation };

inline const char* to_string(CertKind k) {
    switch (k) {
        case CertKind::Nef: return "Nef";
        case CertKind::Big: return "Big";
        case CertKind::FixedPart: return "FixedPart";
        case CertKind::BasePointFree: return "BasePointFree";
        case CertKind::Separation: return "Separation";
    }
    return "?";
}

struct CertItem {
    std::string component;
    DivisorClass cls;
    Integer multiplicity;
    Integer value;  ///< intersection of the certified class with the component
};

struct Certificate {
    CertKind kind = CertKind::Nef;
    DivisorClass target;
    std::vector<CertItem> items;
    Integer self_intersection = 0;
    bool nef = false;
    bool conclusion = false;
};

using Decomposition = std::vector<std::pair<std::string, Integer>>;

inline DivisorClass decomposition_class(const SurfaceModel& s, const Decomposition& parts) {
    DivisorClass d;
    for (const auto& [name, m] : parts) d += m * s.curve(name).cls;
    return d;
}

/// Nef on an effective decomposition into irreducible curves: D.C >= 0 for every component.
inline Certificate nef_on_effective(const SurfaceModel& s, const DivisorClass& d, const Decomposition& parts) {
    for (const auto& [name, m] : parts) {
        if (m < 0) throw Error("negative multiplicity in decomposition: " + name);
        if (!s.curve(name).irreducible) throw Error("decomposition component is not irreducible: " + name);
    }
    if (!s.linearly_equivalent(decomposition_class(s, parts), d))
        throw Error("decomposition does not sum to " + d.str());
    Certificate c;
    c.kind = CertKind::Nef;
    c.target = d;
    c.nef = true;
    for (const auto& [name, m] : parts) {
        const DivisorClass& cls = s.curve(name).cls;
        Integer v = s.intersect(d, cls);
        c.items.push_back({name, cls, m, v});
        if (m > 0 && v < 0) c.nef = false;
    }
    c.self_intersection = s.self_intersection(d);
    c.conclusion = c.nef;
    return c;
}

inline Certificate big_check(const SurfaceModel& s, const Certificate& nef_cert) {
    if (nef_cert.kind != CertKind::Nef && nef_cert.kind != CertKind::Big) throw Error("big_check needs a nef certificate");
    Certificate c = nef_cert;
    c.kind = CertKind::Big;
    c.self_intersection = s.self_intersection(c.target);
    c.conclusion = c.nef && c.self_intersection > 0;
    return c;
}

/// Recomputes every itemized value and the conclusion from scratch.
inline bool recheck(const SurfaceModel& s, const Certificate& c) {
    bool nef = true;
    DivisorClass sum;
    for (const auto& it : c.items) {
        if (s.intersect(c.target, it.cls) != it.value) return false;
        if (it.multiplicity > 0 && it.value < 0) nef = false;
        sum += it.multiplicity * it.cls;
    }
    if (!s.linearly_equivalent(sum, c.target)) return false;
    if (nef != c.nef) return false;
    if (c.kind == CertKind::Nef) return c.conclusion == nef;
    if (c.kind == CertKind::Big) return c.conclusion == (nef && s.self_intersection(c.target) > 0);
    return true;
}

// ---------------------------------------------------------------------------
// Restrictions to curves

struct Restriction {
    Integer h0, h1;
    Rule rule;
};

using RestrictionResult = std::variant<Restriction, NeedsDeclaration>;

/// Solves A ~ x B + y (-K) up to the declared linear equivalences.
inline std::optional<std::pair<Integer, Integer>> prym_coordinates(const SurfaceModel& s, const DivisorClass& b,
                                                                   const DivisorClass& a) {
    DivisorClass vb = s.reduce(b), vk = s.reduce(-s.canonical()), va = s.reduce(a);
    std::set<std::string> keys;
    for (const auto* v : {&vb, &vk, &va})
        for (const auto& [g, c] : v->coeffs) keys.insert(g);
    std::vector<std::string> k(keys.begin(), keys.end());
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = i + 1; j < k.size(); ++j) {
            Integer b1 = vb.coeff(k[i]), b2 = vb.coeff(k[j]), k1 = vk.coeff(k[i]), k2 = vk.coeff(k[j]);
            Integer det = b1 * k2 - b2 * k1;
            if (det == 0) continue;
            Integer a1 = va.coeff(k[i]), a2 = va.coeff(k[j]);
            Integer xn = a1 * k2 - a2 * k1, yn = b1 * a2 - b2 * a1;
            if (xn % det != 0 || yn % det != 0) return std::nullopt;
            Integer x = xn / det, y = yn / det;
            if (s.reduce(va - x * vb - y * vk).is_zero()) return std::make_pair(x, y);
            return std::nullopt;
        }
    return std::nullopt;
}

/// h0, h1 of O_B(A) for an irreducible curve B.  `prym` means O_B(-K) is a
/// nonzero 2-torsion class and O_B(B) = K_B + O_B(-K).
inline RestrictionResult restrict_coh(const SurfaceModel& s, const CurveRecord& b, const DivisorClass& a,
                                      bool prym = false) {
    Integer d = s.intersect(a, b.cls);
    Integer g = s.adjunction_pa(b.cls);
    CurveClassExpr as_expr = CurveClassExpr::point("A|" + b.name, d);
    if (!b.irreducible) return NeedsDeclaration{as_expr, b.name + " is not declared irreducible"};
    if (g == 0) return Restriction{d + 1 > 0 ? d + 1 : Integer(0), -d - 1 > 0 ? Integer(-d - 1) : Integer(0),
                                   Rule::RationalCurveRestriction};
    if (d < 0) return Restriction{0, g - 1 - d, Rule::NegativeDegreeRestriction};
    if (d > 2 * g - 2) return Restriction{d + 1 - g, 0, Rule::HighDegreeCurveRestriction};
    if (prym) {
        if (auto xy = prym_coordinates(s, b.cls, a)) {
            BaseCurve c(g);
            c.add_torsion({"alpha", {}, 2, true});
            CurveClassExpr e = xy->first * CurveClassExpr::canonical() +
                               CurveClassExpr::torsion_symbol("alpha", xy->first + xy->second);
            CurveH0 h0 = c.h0(e), h1 = c.h1(e);
            if (resolved(h0) && resolved(h1)) return Restriction{value_of(h0), value_of(h1), Rule::PrymRestriction};
        }
    }
    return NeedsDeclaration{as_expr, "degree " + d.str() + " on " + b.name + " of genus " + g.str() +
                                         " is not decided by the restriction rules"};
}

// ---------------------------------------------------------------------------
// Fixed part peeling

struct PeelResult {
    DivisorClass fixed;
    DivisorClass mobile;
    std::map<std::string, Integer> multiplicities;
    std::vector<std::string> trace;
};

/// Subtracts irreducible candidates N with (current).N < 0, most negative
/// first, ties by candidate order, until none applies or nothing is left.
inline PeelResult fixed_part_peel(const SurfaceModel& s, const DivisorClass& m, const std::vector<std::string>& candidates,
                                  const Integer& max_multiplicity = 64) {
    for (const auto& c : candidates)
        if (!s.curve(c).irreducible) throw Error("peeling candidate is not irreducible: " + c);
    PeelResult r;
    r.mobile = m;
    for (;;) {
        if (s.reduce(r.mobile).is_zero()) break;
        std::optional<std::size_t> pick;
        Integer best = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            Integer v = s.intersect(r.mobile, s.curve(candidates[i]).cls);
            if (v < best) {
                best = v;
                pick = i;
            }
        }
        if (!pick) break;
        const std::string& n = candidates[*pick];
        Integer& mult = r.multiplicities[n];
        if (++mult > max_multiplicity)
            throw Error("peeling diverges: " + n + " exceeds multiplicity " + max_multiplicity.str());
        r.trace.push_back("(" + r.mobile.str() + ")." + n + " = " + best.str() + " < 0: subtract " + n);
        r.fixed += s.curve(n).cls;
        r.mobile -= s.curve(n).cls;
    }
    r.mobile = s.reduce(r.mobile);
    return r;
}

// ---------------------------------------------------------------------------
// Counting formulas

/// max(-1, C(d+2,2) - sum r(r+1)/2 - 1).
inline Integer expected_dim_plane(const Integer& d, const std::vector<Integer>& mults) {
    if (d < 0) throw Error("expected_dim_plane needs d >= 0");
    Integer v = binomial(d + 2, 2) - 1;
    for (const auto& r : mults) {
        if (r < 0) throw Error("negative multiplicity");
        v -= r * (r + 1) / 2;
    }
    return v < -1 ? Integer(-1) : v;
}

inline Integer plucker_genus(const Integer& d, const std::vector<Integer>& mults) {
    if (d < 1) throw Error("plucker_genus needs d >= 1");
    Integer g = (d - 1) * (d - 2) / 2;
    for (const auto& r : mults) g -= r * (r - 1) / 2;
    if (g < 0) throw Error("negative genus: no such irreducible plane curve");
    return g;
}

inline Integer castelnuovo_severi_bound(const Integer& d1, const Integer& g1, const Integer& d2, const Integer& g2) {
    return d1 * g1 + d2 * g2 + (d1 - 1) * (d2 - 1);
}

inline Integer product_curve_genus(const Integer& a, const Integer& b) {
    if (a < 1 || b < 1) throw Error("product_curve_genus needs a, b >= 1");
    return (a - 1) * (b - 1);
}

inline bool bpf_drop_test(const Integer& dim_l, const Integer& dim_l_minus_point) {
    return dim_l - dim_l_minus_point == 1;
}

inline bool separation_drop_test(const Integer& dim_l, const Integer& dim_l_minus_two_points) {
    return dim_l - dim_l_minus_two_points == 2;
}

inline Integer plurigenus_parity_bound(const Integer& m) {
    if (m < 1) throw Error("plurigenus_parity_bound needs m >= 1");
    return m % 2 == 0 ? Integer(1) : Integer(0);
}

// ---------------------------------------------------------------------------
// Reider search

struct NoObstruction {
    std::size_t examined = 0;
};
struct ReiderWitness {
    DivisorClass E;
    std::map<std::string, Integer> combination;
    Integer value;
};
using ReiderResult = std::variant<NoObstruction, ReiderWitness>;

/// true = effective, false = not effective, nullopt = undecided.
using EffectivityOracle = std::function<std::optional<bool>(const DivisorClass&)>;

/// Enumerates nonzero combinations sum c_i C_i (0 <= c_i <= bound_i) of the
/// named curves and reports the first accepted E with 0 < C.E < threshold.
inline ReiderResult reider_search(const SurfaceModel& s, const DivisorClass& c,
                                  const std::vector<std::pair<std::string, Integer>>& box,
                                  const Integer& threshold = 4, EffectivityOracle oracle = {}) {
    for (const auto& [n, b] : box)
        if (b < 0) throw Error("negative box bound for " + n);
    if (!oracle) oracle = [](const DivisorClass&) -> std::optional<bool> { return true; };
    std::vector<Integer> coef(box.size(), 0);
    std::vector<Integer> dots;
    for (const auto& [n, b] : box) dots.push_back(s.intersect(c, s.curve(n).cls));
    NoObstruction none;
    bool pending = false;
    for (;;) {
        std::size_t i = 0;
        while (i < box.size() && coef[i] == box[i].second) coef[i++] = 0;
        if (i == box.size()) break;
        coef[i] += 1;
        ++none.examined;
        Integer v = 0;
        for (std::size_t j = 0; j < box.size(); ++j) v += coef[j] * dots[j];
        if (!(v > 0 && v < threshold)) continue;
        DivisorClass e;
        std::map<std::string, Integer> comb;
        for (std::size_t j = 0; j < box.size(); ++j)
            if (coef[j] != 0) {
                e += coef[j] * s.curve(box[j].first).cls;
                comb[box[j].first] = coef[j];
            }
        std::optional<bool> eff = oracle(e);
        if (!eff) {
            pending = true;
            continue;
        }
        if (*eff) return ReiderWitness{e, comb, v};
    }
    if (pending) throw Error("Reider search box exhausted with undecided effectivity");
    return none;
}

// ---------------------------------------------------------------------------
// Cohomology ledger

class Ledger {
public:
    enum class Cmp { Eq, Ge, Le };

    struct Constraint {
        std::vector<std::pair<std::size_t, Integer>> terms;
        Integer rhs;
        Cmp cmp;
        Rule rule;
        std::string note;
    };

    struct Bound {
        std::optional<std::size_t> constraint;  ///< none: initial nonnegativity
        std::vector<std::size_t> deps;
    };

    struct Var {
        std::string name;
        Interval value;
        Bound lo_from, hi_from;
    };

    struct Entry {
        DivisorClass cls;
        std::array<std::size_t, 3> h;
    };

    const std::vector<Var>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<std::string>& history() const { return history_; }
    const std::map<DivisorClass, std::array<std::size_t, 3>>& classes() const { return class_vars_; }

    /// Interval for h^i(D).
    Interval h(const SurfaceModel& s, int i, const DivisorClass& d) {
        if (i < 0 || i > 2) throw Error("cohomology degree must be 0, 1 or 2");
        std::size_t v = ensure_class(s, d)[i];
        propagate();
        return vars_[v].value;
    }

    std::size_t var_index(const SurfaceModel& s, int i, const DivisorClass& d) { return ensure_class(s, d)[i]; }

    Interval restriction(const SurfaceModel& s, int i, const std::string& curve, const DivisorClass& a) {
        if (i < 0 || i > 1) throw Error("curve cohomology degree must be 0 or 1");
        std::size_t v = ensure_restriction(s, s.curve(curve), a)[i];
        propagate();
        return vars_[v].value;
    }
    std::size_t restriction_index(const SurfaceModel& s, int i, const std::string& curve, const DivisorClass& a) {
        return ensure_restriction(s, s.curve(curve), a)[i];
    }

    void declare_nef(const SurfaceModel& s, const DivisorClass& n, const std::string& why) {
        DivisorClass key = s.reduce(n);
        nefs_.push_back({key, why});
        history_.push_back("nef " + key.str() + (why.empty() ? "" : " (" + why + ")"));
        for (const auto& [cls, h] : class_vars_) apply_nef(s, cls, h, nefs_.back());
        propagate();
    }

    void fact(const SurfaceModel& s, int i, const DivisorClass& d, Cmp cmp, const Integer& value, const std::string& why) {
        std::size_t v = ensure_class(s, d)[i];
        add({{{v, 1}}, value, cmp, Rule::Declared, why.empty() ? "declared" : why});
        history_.push_back("fact " + vars_[v].name + " " + cmp_str(cmp) + " " + value.str());
        propagate();
    }

    /// h0(A) >= h0(B) - sum m(m+1)/2 for A = B - sum m e[x].
    void conditions(const SurfaceModel& s, const DivisorClass& a, const DivisorClass& b) {
        DivisorClass diff = s.reduce(a - b);
        if (!diff.tags.empty()) throw Error("point conditions: classes differ by torsion");
        Integer lost = 0;
        for (const auto& [g, c] : diff.coeffs) {
            if (s.generator(g).role != GeneratorRole::Exceptional || c > 0)
                throw Error("point conditions: " + a.str() + " is not " + b.str() + " minus exceptional multiples");
            lost += (-c) * (-c + 1) / 2;
        }
        std::size_t ha = ensure_class(s, a)[0], hb = ensure_class(s, b)[0];
        add({{{ha, 1}, {hb, -1}}, -lost, Cmp::Ge, Rule::PointConditions,
             "at most " + lost.str() + " conditions imposed on " + vars_[hb].name});
        history_.push_back("conditions " + vars_[ha].name + " from " + vars_[hb].name);
        propagate();
    }

    void serre(const SurfaceModel& s, const DivisorClass& d) {
        ensure_class(s, d);
        history_.push_back("serre " + s.reduce(d).str());
        propagate();
    }

    /// h0(D) = 0 since D.N < 0 for a nef class N.
    void vanish_by_nef(const SurfaceModel& s, const DivisorClass& d, const DivisorClass& n) {
        DivisorClass key = s.reduce(n);
        auto it = std::find_if(nefs_.begin(), nefs_.end(), [&](const auto& p) { return p.first == key; });
        if (it == nefs_.end()) throw Error(n.str() + " is not declared nef");
        Integer v = s.intersect(d, n);
        if (v >= 0) throw Error("(" + d.str() + ")." + n.str() + " = " + v.str() + " is not negative");
        std::size_t h0 = ensure_class(s, d)[0];
        add({{{h0, 1}}, 0, Cmp::Eq, Rule::NefObstruction, "(D).(" + key.str() + ") = " + v.str() + " < 0"});
        history_.push_back("vanish " + vars_[h0].name + " by nef " + key.str());
        propagate();
    }

    /// h0(D) = 0 since -D is a nonzero effective combination of curves.
    void vanish_by_antieffective(const SurfaceModel& s, const DivisorClass& d, const Decomposition& parts) {
        Integer total = 0;
        for (const auto& [n, m] : parts) {
            if (m < 0) throw Error("negative multiplicity in antieffective decomposition");
            total += m;
        }
        if (total == 0) throw Error("antieffective decomposition is empty");
        if (!s.linearly_equivalent(decomposition_class(s, parts), -d))
            throw Error("decomposition does not sum to " + (-d).str());
        std::size_t h0 = ensure_class(s, d)[0];
        add({{{h0, 1}}, 0, Cmp::Eq, Rule::Antieffective, "-D is a nonzero effective curve"});
        history_.push_back("vanish " + vars_[h0].name + " by antieffective");
        propagate();
    }

    /// h1(D) = h2(D) = 0 for D ~ K + L with L nef and big.
    void vanish_by_kv(const SurfaceModel& s, const DivisorClass& d, const Certificate& cert) {
        if (cert.kind != CertKind::Big || !cert.conclusion) throw Error("KV vanishing needs a nef and big certificate");
        if (!recheck(s, cert)) throw Error("certificate does not recheck on this surface");
        if (!s.linearly_equivalent(d, s.canonical() + cert.target))
            throw Error(d.str() + " is not K + " + cert.target.str());
        auto h = ensure_class(s, d);
        std::string note = "K + (" + cert.target.str() + "), nef and big";
        add({{{h[1], 1}}, 0, Cmp::Eq, Rule::KVVanishing, note});
        add({{{h[2], 1}}, 0, Cmp::Eq, Rule::KVVanishing, note});
        history_.push_back("vanish " + vars_[h[1]].name + " by kv");
        propagate();
    }

    void effective(const SurfaceModel& s, const DivisorClass& d, const Decomposition& parts) {
        for (const auto& [n, m] : parts)
            if (m < 0) throw Error("negative multiplicity in effective decomposition");
        if (!s.linearly_equivalent(decomposition_class(s, parts), d))
            throw Error("decomposition does not sum to " + d.str());
        std::size_t h0 = ensure_class(s, d)[0];
        add({{{h0, 1}}, 1, Cmp::Ge, Rule::EffectiveNonvanishing, "effective decomposition given"});
        history_.push_back("effective " + vars_[h0].name);
        propagate();
    }

    /// 0 -> O(A-B) -> O(A) -> O_B(A) -> 0.
    void ses(const SurfaceModel& s, const DivisorClass& a, const std::string& curve) {
        const CurveRecord& b = s.curve(curve);
        auto sub = ensure_class(s, a - b.cls);
        auto full = ensure_class(s, a);
        auto r = ensure_restriction(s, b, a);
        std::array<std::size_t, 8> d{sub[0], full[0], r[0], sub[1], full[1], r[1], sub[2], full[2]};
        std::string note = "0 -> O(" + s.reduce(a - b.cls).str() + ") -> O(" + s.reduce(a).str() + ") -> O_" +
                           curve + "(" + s.reduce(a).str() + ") -> 0";
        for (std::size_t k = 0; k < 8; ++k) {
            Constraint c{{}, 0, k == 7 ? Cmp::Eq : Cmp::Ge, Rule::ExactSequence, note};
            for (std::size_t j = 0; j <= k; ++j) c.terms.emplace_back(d[j], ((k - j) % 2 == 0) ? 1 : -1);
            add(std::move(c));
        }
        history_.push_back("ses " + s.reduce(a).str() + " by " + curve);
        propagate();
    }

    PeelResult peel(const SurfaceModel& s, const DivisorClass& m, const std::vector<std::string>& candidates,
                    const Integer& bound = 64) {
        PeelResult r = fixed_part_peel(s, m, candidates, bound);
        std::size_t hm = ensure_class(s, m)[0], hr = ensure_class(s, r.mobile)[0];
        add({{{hm, 1}, {hr, -1}}, 0, Cmp::Eq, Rule::FixedPartPeel,
             "fixed part " + r.fixed.str() + " leaves " + r.mobile.str()});
        history_.push_back("peel " + vars_[hm].name + " -> " + vars_[hr].name);
        propagate();
        return r;
    }

    /// Marks an irreducible curve C with K.C = 0, h0(O_C(-K)) = 0 and an
    /// effective W ~ -2K disjoint from C: O_C(-K) is then nonzero 2-torsion.
    void prym(const SurfaceModel& s, const std::string& curve, const Decomposition& w) {
        const CurveRecord& c = s.curve(curve);
        if (!c.irreducible) throw Error(curve + " is not declared irreducible");
        if (s.intersect(c.cls, s.canonical()) != 0) throw Error("K." + curve + " is not 0");
        for (const auto& [n, m] : w) {
            if (m <= 0) throw Error("W multiplicities must be positive");
            if (n == curve || s.curve(n).cls == c.cls) throw Error(curve + " is a component of W");
            s.curve(n);
        }
        DivisorClass wc = decomposition_class(s, w);
        if (!s.linearly_equivalent(wc, Integer(-2) * s.canonical())) throw Error("W is not linearly equivalent to -2K");
        if (s.intersect(wc, c.cls) != 0) throw Error("W." + curve + " is not 0");
        std::size_t h0 = ensure_restriction(s, c, -s.canonical())[0];
        propagate();
        if (!vars_[h0].value.hi || *vars_[h0].value.hi != 0)
            throw Error("h0(O_" + curve + "(-K)) = 0 is not established (currently " + vars_[h0].value.str() + ")");
        prym_.insert(s.reduce(c.cls));
        history_.push_back("prym " + curve);
        for (const auto& [key, idx] : restriction_vars_)
            if (key.first == s.reduce(c.cls)) apply_restriction(s, c, key.second, idx);
        propagate();
    }

    bool is_prym(const SurfaceModel& s, const DivisorClass& curve_class) const {
        return prym_.count(s.reduce(curve_class)) != 0;
    }

    /// Derivation lines supporting the current bounds of a variable, base facts first.
    std::vector<std::string> trace(std::size_t v) const {
        std::vector<std::string> out;
        std::set<std::pair<std::size_t, bool>> seen;
        trace_into(v, true, seen, out);
        trace_into(v, false, seen, out);
        return out;
    }

    /// Every exact triple satisfies h0 - h1 + h2 = chi.
    bool rr_consistent(const SurfaceModel& s) const {
        for (const auto& [cls, h] : class_vars_) {
            const auto& a = vars_[h[0]].value;
            const auto& b = vars_[h[1]].value;
            const auto& c = vars_[h[2]].value;
            if (a.exact() && b.exact() && c.exact() && a.lo - b.lo + c.lo != s.chi_rr(cls)) return false;
        }
        return true;
    }

    /// Runs constraint propagation to a fixpoint.
    void propagate() {
        for (int pass = 0; pass < kMaxPasses; ++pass) {
            bool changed = false;
            for (std::size_t ci = 0; ci < constraints_.size(); ++ci) changed |= apply(ci);
            if (!changed) return;
        }
        throw Error("ledger propagation did not converge");
    }

private:
    static constexpr int kMaxPasses = 500;

    static const char* cmp_str(Cmp c) { return c == Cmp::Eq ? "=" : c == Cmp::Ge ? ">=" : "<="; }

    std::array<std::size_t, 3> ensure_class(const SurfaceModel& s, const DivisorClass& d) {
        DivisorClass key = s.reduce(d);
        std::array<std::size_t, 3> h;
        auto it = class_vars_.find(key);
        if (it != class_vars_.end()) {
            h = it->second;
        } else {
            const std::string ks = key.str();
            for (int i = 0; i < 3; ++i) h[i] = new_var("h" + std::to_string(i) + "(" + ks + ")");
            class_vars_.emplace(key, h);
            add({{{h[0], 1}, {h[1], -1}, {h[2], 1}}, s.chi_rr(key), Cmp::Eq, Rule::RiemannRoch,
                 "chi(" + ks + ") = " + s.chi_rr(key).str()});
            auto_rules(s, key, h);
            for (const auto& n : nefs_) apply_nef(s, key, h, n);
        }
        link_serre(s, key, h);
        return h;
    }

    void link_serre(const SurfaceModel& s, const DivisorClass& key, const std::array<std::size_t, 3>& h) {
        DivisorClass kkey = s.reduce(s.canonical());
        if (serre_links_.count({key, kkey})) return;
        DivisorClass partner = s.reduce(s.canonical() - key);
        serre_links_.insert({key, kkey});
        serre_links_.insert({partner, kkey});
        auto p = ensure_class(s, partner);
        std::string note = "h^i(" + key.str() + ") = h^{2-i}(" + partner.str() + ")";
        for (int i = 0; i < 3; ++i) add({{{h[i], 1}, {p[2 - i], -1}}, 0, Cmp::Eq, Rule::SerreDualSurface, note});
    }

    void auto_rules(const SurfaceModel& s, const DivisorClass& key, const std::array<std::size_t, 3>& h) {
        if (key.is_zero()) {
            add({{{h[0], 1}}, 1, Cmp::Eq, Rule::Structure, "h0(O) = 1"});
            add({{{h[1], 1}}, s.base_genus(), Cmp::Eq, Rule::Structure, "h1(O) = q"});
            add({{{h[2], 1}}, 0, Cmp::Eq, Rule::Structure, "h2(O) = p_g = 0"});
            return;
        }
        bool has_exceptional = !s.is_pullback_from_minimal(key);
        if (!has_exceptional && s.kind() == SurfaceKind::ProjectivePlane) {
            Integer d = key.coeff("l");
            add({{{h[0], 1}}, d >= 0 ? binomial(d + 2, 2) : Integer(0), Cmp::Eq, Rule::PlaneCurves,
                 "plane curves of degree " + d.str()});
            add({{{h[1], 1}}, 0, Cmp::Eq, Rule::PlaneCurves, "h1(O(" + d.str() + ")) = 0 on the plane"});
        }
        if (!has_exceptional && s.kind() == SurfaceKind::Ruled && s.bundle() && s.decomposable()) {
            CurveH0 v = h0_ruled_class(RuledPresentation::of(s), key);
            if (resolved(v))
                add({{{h[0], 1}}, value_of(v), Cmp::Eq, Rule::RuledPushforward,
                     "sum of h0 over the pushforward summands"});
            else
                pending_.push_back(std::get<NeedsDeclaration>(v).reason);
        }
        if (has_exceptional) {
            DivisorClass base;
            bool all_nonneg = true;
            for (const auto& [g, c] : key.coeffs) {
                if (s.generator(g).role != GeneratorRole::Exceptional)
                    base.coeffs[g] = c;
                else if (c < 0)
                    all_nonneg = false;
            }
            base.tags = key.tags;
            if (all_nonneg) {
                std::size_t b0 = ensure_class(s, base)[0];
                add({{{h[0], 1}, {b0, -1}}, 0, Cmp::Eq, Rule::ExceptionalFixed,
                     "exceptional part is fixed: h0 equals h0(" + s.reduce(base).str() + ")"});
            }
        }
    }

    void apply_nef(const SurfaceModel& s, const DivisorClass& key, const std::array<std::size_t, 3>& h,
                   const std::pair<DivisorClass, std::string>& nef) {
        Integer v = s.intersect(key, nef.first);
        if (v < 0)
            add({{{h[0], 1}}, 0, Cmp::Eq, Rule::NefObstruction,
                 "(" + key.str() + ").(" + nef.first.str() + ") = " + v.str() + " < 0"});
    }

    std::array<std::size_t, 2> ensure_restriction(const SurfaceModel& s, const CurveRecord& b, const DivisorClass& a) {
        auto key = std::make_pair(s.reduce(b.cls), s.reduce(a));
        auto it = restriction_vars_.find(key);
        if (it != restriction_vars_.end()) return it->second;
        const std::string tag = "O_" + b.name + "(" + key.second.str() + ")";
        std::array<std::size_t, 2> r{new_var("h0(" + tag + ")"), new_var("h1(" + tag + ")")};
        restriction_vars_.emplace(key, r);
        Integer d = s.intersect(a, b.cls);
        Integer g = s.adjunction_pa(b.cls);
        add({{{r[0], 1}, {r[1], -1}}, d + 1 - g, Cmp::Eq, Rule::CurveRiemannRoch,
             "deg " + d.str() + ", p_a " + g.str()});
        apply_restriction(s, b, key.second, r);
        return r;
    }

    void apply_restriction(const SurfaceModel& s, const CurveRecord& b, const DivisorClass& a,
                           const std::array<std::size_t, 2>& r) {
        RestrictionResult res = restrict_coh(s, b, a, is_prym(s, b.cls));
        if (auto* v = std::get_if<Restriction>(&res)) {
            std::string note = "on " + b.name + ", degree " + s.intersect(a, b.cls).str();
            add({{{r[0], 1}}, v->h0, Cmp::Eq, v->rule, note});
            add({{{r[1], 1}}, v->h1, Cmp::Eq, v->rule, note});
        }
    }

    std::size_t new_var(std::string name) {
        vars_.push_back({std::move(name), Interval{}, {}, {}});
        return vars_.size() - 1;
    }

    void add(Constraint c) {
        constraints_.push_back(std::move(c));
        apply(constraints_.size() - 1);
    }

    /// One round of bound tightening from a single constraint.
    bool apply(std::size_t ci) {
        const Constraint& c = constraints_[ci];
        bool changed = false;
        if (c.cmp != Cmp::Le) changed |= tighten(ci, c.terms, c.rhs, 1);
        if (c.cmp != Cmp::Ge) changed |= tighten(ci, c.terms, c.rhs, -1);
        return changed;
    }

    /// Handles sign * (sum c x) >= sign * rhs.
    bool tighten(std::size_t ci, const std::vector<std::pair<std::size_t, Integer>>& terms, const Integer& rhs, int sign) {
        bool changed = false;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            Integer cj = sign * terms[j].second;
            if (cj == 0) continue;
            Integer rest_max = 0;
            bool bounded = true;
            std::vector<std::size_t> deps;
            for (std::size_t i = 0; i < terms.size() && bounded; ++i) {
                if (i == j) continue;
                Integer ci2 = sign * terms[i].second;
                if (ci2 == 0) continue;
                const Interval& iv = vars_[terms[i].first].value;
                if (ci2 > 0) {
                    if (!iv.hi) bounded = false;
                    else rest_max += ci2 * *iv.hi;
                } else {
                    rest_max += ci2 * iv.lo;
                }
                deps.push_back(terms[i].first);
            }
            if (!bounded) continue;
            Integer r = sign * rhs - rest_max;
            Var& x = vars_[terms[j].first];
            if (cj > 0) {
                Integer lo = ceil_div(r, cj);
                if (lo > x.value.lo) {
                    x.value.lo = lo;
                    x.lo_from = {ci, deps};
                    changed = true;
                }
            } else {
                Integer hi = floor_div(r, cj);
                if (!x.value.hi || hi < *x.value.hi) {
                    x.value.hi = hi;
                    x.hi_from = {ci, deps};
                    changed = true;
                }
            }
            if (x.value.hi && x.value.lo > *x.value.hi) {
                std::vector<std::string> t = trace(terms[j].first);
                throw LedgerContradiction("ledger contradiction on " + x.name + ": " + x.value.lo.str() + " > " +
                                              x.value.hi->str(),
                                          std::move(t));
            }
        }
        return changed;
    }

    void trace_into(std::size_t v, bool lower, std::set<std::pair<std::size_t, bool>>& seen,
                    std::vector<std::string>& out) const {
        if (!seen.insert({v, lower}).second) return;
        const Var& x = vars_[v];
        const Bound& b = lower ? x.lo_from : x.hi_from;
        if (!b.constraint) return;
        for (std::size_t d : b.deps) {
            trace_into(d, true, seen, out);
            trace_into(d, false, seen, out);
        }
        if (x.value.exact() && lower && x.hi_from.constraint == b.constraint) return;  // printed with the upper bound
        const Constraint& c = constraints_[*b.constraint];
        std::string bound = lower ? ">= " + x.value.lo.str() : (x.value.exact() ? "= " : "<= ") + x.value.hi->str();
        out.push_back(x.name + " " + bound + "  [" + to_string(c.rule) + "] " + c.note);
    }

    std::vector<Var> vars_;
    std::vector<Constraint> constraints_;
    std::map<DivisorClass, std::array<std::size_t, 3>> class_vars_;
    std::map<std::pair<DivisorClass, DivisorClass>, std::array<std::size_t, 2>> restriction_vars_;
    std::set<std::pair<DivisorClass, DivisorClass>> serre_links_;
    std::vector<std::pair<DivisorClass, std::string>> nefs_;
    std::set<DivisorClass> prym_;
    std::vector<std::string> history_;
    std::vector<std::string> pending_;
};

}  // namespace divforge

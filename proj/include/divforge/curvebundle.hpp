#pragma once

// Divisor classes on the base curve of a ruled surface (or on any smooth curve
// whose relevant classes are combinations of K, named points and torsion).

#include "divforge/format.hpp"
#include "divforge/integer.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace divforge {

/// k*K + sum(points) + sum(torsion symbols), all with integer coefficients.
struct CurveClassExpr {
    Integer k_coeff = 0;
    std::map<std::string, Integer> points;
    std::map<std::string, Integer> torsion;

    static CurveClassExpr canonical() {
        CurveClassExpr e;
        e.k_coeff = 1;
        return e;
    }
    static CurveClassExpr point(const std::string& name, Integer c = 1) {
        CurveClassExpr e;
        e.points[name] = c;
        return e;
    }
    static CurveClassExpr torsion_symbol(const std::string& name, Integer c = 1) {
        CurveClassExpr e;
        e.torsion[name] = c;
        return e;
    }

    bool empty() const { return k_coeff == 0 && points.empty() && torsion.empty(); }

    CurveClassExpr& operator+=(const CurveClassExpr& o) {
        k_coeff += o.k_coeff;
        for (const auto& [n, c] : o.points) add(points, n, c);
        for (const auto& [n, c] : o.torsion) add(torsion, n, c);
        return *this;
    }
    CurveClassExpr& operator*=(const Integer& s) {
        k_coeff *= s;
        for (auto& [n, c] : points) c *= s;
        for (auto& [n, c] : torsion) c *= s;
        prune(points);
        prune(torsion);
        return *this;
    }
    friend CurveClassExpr operator+(CurveClassExpr a, const CurveClassExpr& b) { return a += b; }
    friend CurveClassExpr operator*(const Integer& s, CurveClassExpr a) { return a *= s; }
    friend CurveClassExpr operator-(CurveClassExpr a) { return a *= Integer(-1); }
    friend CurveClassExpr operator-(CurveClassExpr a, const CurveClassExpr& b) { return a += -b; }
    bool operator==(const CurveClassExpr&) const = default;

    std::string str() const {
        std::vector<std::pair<std::string, Integer>> terms;
        if (k_coeff != 0) terms.emplace_back("K", k_coeff);
        for (const auto& [n, c] : points) terms.emplace_back(n, c);
        for (const auto& [n, c] : torsion) terms.emplace_back(n, c);
        return format_combination(terms);
    }

private:
    static void add(std::map<std::string, Integer>& m, const std::string& n, const Integer& c) {
        Integer& slot = m[n];
        slot += c;
        if (slot == 0) m.erase(n);
    }
    static void prune(std::map<std::string, Integer>& m) {
        std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
    }
};

/// A declared torsion class.  `expansion` is either empty (an abstract symbol
/// such as alpha) or a difference of two points p - q.
struct TorsionRelation {
    std::string name;
    std::map<std::string, Integer> expansion;
    Integer order = 2;
    bool nonzero = false;  ///< declared to have exact order `order`
};

struct DeclaredFact {
    CurveClassExpr expr;
    Integer h0;
    std::string justification;
};

struct Gonality {
    bool hyperelliptic = false;
    bool has_g14 = false;
};

/// Returned instead of a number when the rule cascade cannot decide h0.
struct NeedsDeclaration {
    CurveClassExpr expr;
    std::string reason;
    bool operator==(const NeedsDeclaration&) const = default;
};

using CurveH0 = std::variant<Integer, NeedsDeclaration>;

inline bool resolved(const CurveH0& v) { return std::holds_alternative<Integer>(v); }
inline const Integer& value_of(const CurveH0& v) { return std::get<Integer>(v); }

enum class Positivity { VeryAmple, BasePointFree, Unknown };

inline const char* to_string(Positivity p) {
    switch (p) {
        case Positivity::VeryAmple: return "VeryAmple";
        case Positivity::BasePointFree: return "BasePointFree";
        default: return "Unknown";
    }
}

class BaseCurve {
public:
    explicit BaseCurve(Integer genus = 0) : genus_(std::move(genus)) {
        if (genus_ < 0) throw Error("curve genus must be nonnegative");
    }

    const Integer& genus() const { return genus_; }
    const std::set<std::string>& point_symbols() const { return points_; }
    const std::vector<TorsionRelation>& torsion_relations() const { return torsion_; }
    const std::vector<DeclaredFact>& declared_facts() const { return facts_; }
    const std::optional<Gonality>& gonality() const { return gonality_; }

    void add_point(const std::string& name) { points_.insert(name); }
    bool has_point(const std::string& name) const { return points_.count(name) != 0; }
    bool has_torsion(const std::string& name) const { return find_torsion(name) != nullptr; }

    void set_gonality(Gonality g) { gonality_ = g; }

    void add_torsion(TorsionRelation rel) {
        if (rel.order < 2) throw Error("torsion order must be at least 2: " + rel.name);
        if (genus_ == 0) throw Error("a rational curve has no nonzero torsion: " + rel.name);
        if (has_torsion(rel.name) || has_point(rel.name))
            throw Error("duplicate curve symbol: " + rel.name);
        if (!rel.expansion.empty()) {
            Integer deg = 0;
            for (const auto& [p, c] : rel.expansion) {
                if (!has_point(p)) throw UnknownName("unknown point in torsion relation: " + p);
                deg += c;
            }
            if (deg != 0) throw Error("torsion relation " + rel.name + " must have degree 0");
            if (rel.expansion.size() != 2 || rel.expansion.begin()->second * rel.expansion.rbegin()->second != -1)
                throw Error("torsion relation " + rel.name + " must be a difference of two points");
        }
        torsion_.push_back(std::move(rel));
    }

    /// Registers an h0 value the rule cascade cannot derive (genericity input).
    void add_fact(DeclaredFact fact) {
        validate(fact.expr);
        CurveClassExpr r = reduce(fact.expr);
        Integer deg = degree(r);
        if (fact.h0 < 0) throw Error("declared h0 must be nonnegative");
        if (deg < 0 && fact.h0 != 0) throw Error("declared h0 of a negative-degree class must be 0");
        if (deg >= 0 && fact.h0 > deg + 1) throw Error("declared h0 exceeds degree + 1");
        CurveH0 by_rules = rule_cascade(r);
        if (resolved(by_rules) && value_of(by_rules) != fact.h0)
            throw Error("declared fact h0(" + r.str() + ") = " + fact.h0.str() +
                        " contradicts the rule value " + value_of(by_rules).str());
        fact.expr = r;
        facts_.push_back(std::move(fact));
    }

    void validate(const CurveClassExpr& e) const {
        for (const auto& [p, c] : e.points)
            if (!has_point(p)) throw UnknownName("unknown point on base curve: " + p);
        for (const auto& [t, c] : e.torsion)
            if (!has_torsion(t)) throw UnknownName("undeclared torsion symbol: " + t);
    }

    Integer degree(const CurveClassExpr& e) const {
        Integer d = e.k_coeff * (2 * genus_ - 2);
        for (const auto& [p, c] : e.points) d += c;
        return d;
    }

    /// Normal form modulo the declared torsion relations; degree preserving.
    CurveClassExpr reduce(const CurveClassExpr& e) const {
        CurveClassExpr r = e;
        if (genus_ == 1) r.k_coeff = 0;  // K ~ 0 on an elliptic curve
        for (const auto& rel : torsion_) {
            if (rel.expansion.empty()) continue;
            // rel = p - q  (or q - p): trade the coefficient of p for the symbol.
            auto it = rel.expansion.begin();
            std::string plus = it->second > 0 ? it->first : std::next(it)->first;
            std::string minus = it->second > 0 ? std::next(it)->first : it->first;
            auto found = r.points.find(plus);
            if (found == r.points.end()) continue;
            Integer c = found->second;
            r.points.erase(found);
            r += CurveClassExpr::point(minus, c);
            r += CurveClassExpr::torsion_symbol(rel.name, c);
        }
        for (auto it = r.torsion.begin(); it != r.torsion.end();) {
            const TorsionRelation* rel = find_torsion(it->first);
            if (rel) it->second = mod_positive(it->second, rel->order);
            if (it->second == 0)
                it = r.torsion.erase(it);
            else
                ++it;
        }
        return r;
    }

    bool is_trivial(const CurveClassExpr& reduced) const { return reduced.empty(); }

    /// True when the reduced class is a single declared-nonzero torsion multiple.
    bool is_nonzero_torsion(const CurveClassExpr& reduced) const {
        if (reduced.k_coeff != 0 || !reduced.points.empty() || reduced.torsion.size() != 1) return false;
        const TorsionRelation* rel = find_torsion(reduced.torsion.begin()->first);
        return rel && rel->nonzero;
    }

    /// h0 by the rule cascade, then declared facts.
    CurveH0 h0(const CurveClassExpr& e) const {
        validate(e);
        CurveClassExpr r = reduce(e);
        CurveH0 v = rule_cascade(r);
        if (resolved(v)) return v;
        for (const auto& f : facts_)
            if (f.expr == r) return f.h0;
        return v;
    }

    /// Serre duality on the curve: h1(e) = h0(K - e).
    CurveH0 h1(const CurveClassExpr& e) const { return h0(CurveClassExpr::canonical() - e); }

    /// deg + 1 - g; throws if h0 and h1 are both known and disagree with it.
    Integer rr(const CurveClassExpr& e) const {
        Integer chi = degree(e) + 1 - genus_;
        CurveH0 a = h0(e), b = h1(e);
        if (resolved(a) && resolved(b) && value_of(a) - value_of(b) != chi)
            throw Error("Riemann-Roch inconsistency for " + e.str() + ": h0 - h1 = " +
                        Integer(value_of(a) - value_of(b)).str() + " but deg + 1 - g = " + chi.str());
        return chi;
    }

    Positivity positivity(const CurveClassExpr& e) const {
        Integer d = degree(e);
        if (d >= 2 * genus_ + 1) return Positivity::VeryAmple;
        if (d >= 2 * genus_) return Positivity::BasePointFree;
        return Positivity::Unknown;
    }

private:
    const TorsionRelation* find_torsion(const std::string& name) const {
        for (const auto& t : torsion_)
            if (t.name == name) return &t;
        return nullptr;
    }

    CurveH0 rule_cascade(const CurveClassExpr& r) const {
        const Integer deg = degree(r);
        const Integer two_g_minus_two = 2 * genus_ - 2;
        if (deg < 0) return Integer(0);
        if (deg > two_g_minus_two) return deg + 1 - genus_;
        if (deg == 0) {
            if (is_trivial(r)) return Integer(1);
            if (is_nonzero_torsion(r)) return Integer(0);
        }
        if (deg == two_g_minus_two && genus_ >= 2) {
            CurveClassExpr rest = r - CurveClassExpr::canonical();
            if (rest.empty()) return genus_;
            if (is_nonzero_torsion(rest)) return genus_ - 1;
        }
        return NeedsDeclaration{r, "h0(" + r.str() + ") of degree " + deg.str() +
                                       " is not decided by degree or torsion rules"};
    }

    Integer genus_;
    std::set<std::string> points_;
    std::vector<TorsionRelation> torsion_;
    std::vector<DeclaredFact> facts_;
    std::optional<Gonality> gonality_;
};

/// Riemann-Roch on a curve of genus g: h0 - h1 = deg + 1 - g.
inline Integer rr_curve(const Integer& degree, const Integer& genus) { return degree + 1 - genus; }

}  // namespace divforge

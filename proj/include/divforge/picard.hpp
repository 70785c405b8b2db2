#pragma once

// Picard lattices of the plane, of ruled surfaces and of their iterated blow-ups.
//
// Classes are kept in the total-transform basis: the generators of the minimal
// model plus one generator e[x] per blown-up point (the total transform of the
// exceptional curve over x).  Pullback is therefore the identity on coordinates
// and the Gram form never changes.  Strict transforms of curves (including the
// exceptional curves E[x] themselves) are stored as curve records.

#include "divforge/curvebundle.hpp"
#include "divforge/format.hpp"
#include "divforge/integer.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace divforge {

enum class SurfaceKind { ProjectivePlane, Ruled };

enum class GeneratorRole { Line, Section, Fiber, Exceptional };

struct GeneratorRecord {
    std::string name;
    GeneratorRole role;
    std::string point;    ///< base point of a fiber ("pt" for the generic one, "K" for K_Gamma), or the blown-up point
    Integer weight = 1;   ///< degree on the base curve of the fiber generator
    int depth = 0;        ///< 0 for minimal-model generators, parent depth + 1 for exceptionals
};

inline std::string fiber_generator(const std::string& point) { return point == "pt" ? "f" : "f[" + point + "]"; }
inline std::string exceptional_generator(const std::string& point) { return "e[" + point + "]"; }
inline std::string exceptional_curve(const std::string& point) { return "E[" + point + "]"; }

/// Sparse integer vector over generators plus torsion tags.
struct DivisorClass {
    std::map<std::string, Integer> coeffs;
    std::map<std::string, Integer> tags;

    static DivisorClass generator(const std::string& name, Integer c = 1) {
        DivisorClass d;
        if (c != 0) d.coeffs[name] = std::move(c);
        return d;
    }
    static DivisorClass tag(const std::string& name, Integer c = 1) {
        DivisorClass d;
        if (c != 0) d.tags[name] = std::move(c);
        return d;
    }

    bool is_zero() const { return coeffs.empty() && tags.empty(); }

    Integer coeff(const std::string& g) const {
        auto it = coeffs.find(g);
        return it == coeffs.end() ? Integer(0) : it->second;
    }

    DivisorClass& operator+=(const DivisorClass& o) {
        for (const auto& [g, c] : o.coeffs) add(coeffs, g, c);
        for (const auto& [t, c] : o.tags) add(tags, t, c);
        return *this;
    }
    DivisorClass& operator-=(const DivisorClass& o) { return *this += Integer(-1) * o; }
    DivisorClass& operator*=(const Integer& s) {
        if (s == 0) {
            coeffs.clear();
            tags.clear();
            return *this;
        }
        for (auto& [g, c] : coeffs) c *= s;
        for (auto& [t, c] : tags) c *= s;
        return *this;
    }
    friend DivisorClass operator+(DivisorClass a, const DivisorClass& b) { return a += b; }
    friend DivisorClass operator*(const Integer& s, DivisorClass a) { return a *= s; }
    friend DivisorClass operator-(DivisorClass a) { return a *= Integer(-1); }
    friend DivisorClass operator-(DivisorClass a, const DivisorClass& b) { return a += -b; }
    bool operator==(const DivisorClass&) const = default;
    auto operator<=>(const DivisorClass&) const = default;

    std::string str() const {
        std::vector<std::pair<std::string, Integer>> terms(coeffs.begin(), coeffs.end());
        for (const auto& [t, c] : tags) terms.emplace_back("t[" + t + "]", c);
        std::stable_sort(terms.begin(), terms.end(),
                         [](const auto& x, const auto& y) { return generator_display_less(x.first, y.first); });
        return format_combination(terms);
    }

private:
    static void add(std::map<std::string, Integer>& m, const std::string& k, const Integer& c) {
        Integer& slot = m[k];
        slot += c;
        if (slot == 0) m.erase(k);
    }
};

struct CurveRecord {
    std::string name;
    DivisorClass cls;
    std::optional<Integer> declared_pa;
    bool irreducible = false;
    bool smooth = false;
    bool rational = false;
    std::vector<std::pair<Integer, Integer>> gonality_pencils;  ///< (degree, target genus)
};

struct BlowUpSpec {
    std::string name;
    std::vector<std::pair<std::string, Integer>> hosts;  ///< curve name, multiplicity
    std::optional<std::string> parent;                   ///< infinitely-near: lies on E[parent]
};

class SurfaceModel {
public:
    static SurfaceModel plane() {
        SurfaceModel s;
        s.kind_ = SurfaceKind::ProjectivePlane;
        s.add_generator({"l", GeneratorRole::Line, "", 1, 0});
        s.canonical_ = DivisorClass::generator("l", -3);
        return s;
    }

    /// Ruled surface over a curve of genus q with invariant e.  Without a bundle
    /// the canonical class is -2C0 + (2q-2-e)f.
    static SurfaceModel ruled(Integer q, Integer e, const std::vector<std::string>& fibers, bool decomposable = true) {
        if (q < 0) throw Error("base genus must be nonnegative");
        SurfaceModel s;
        s.kind_ = SurfaceKind::Ruled;
        s.q_ = q;
        s.e_ = e;
        s.decomposable_ = decomposable;
        s.base_ = BaseCurve(q);
        s.base_.add_point("pt");
        s.add_generator({"C0", GeneratorRole::Section, "", 1, 0});
        s.add_generator({"f", GeneratorRole::Fiber, "pt", 1, 0});
        for (const auto& p : fibers) {
            if (p == "pt" || p == "K") throw Error("reserved fiber name: " + p);
            if (s.base_.has_point(p)) throw Error("duplicate fiber name: " + p);
            s.base_.add_point(p);
            s.add_generator({fiber_generator(p), GeneratorRole::Fiber, p, 1, 0});
        }
        if (q >= 2) s.add_generator({"f[K]", GeneratorRole::Fiber, "K", 2 * q - 2, 0});
        s.canonical_ = DivisorClass::generator("C0", -2) + DivisorClass::generator("f", 2 * q - 2 - e);
        return s;
    }

    SurfaceKind kind() const { return kind_; }
    const Integer& base_genus() const { return q_; }
    const Integer& e_invariant() const { return e_; }
    bool decomposable() const { return decomposable_; }
    Integer chi_structure() const { return 1 - q_; }
    const std::vector<GeneratorRecord>& generators() const { return generators_; }
    const DivisorClass& canonical() const { return canonical_; }
    const std::vector<BlowUpSpec>& blowup_log() const { return log_; }
    const std::vector<CurveRecord>& curves() const { return curves_; }
    const BaseCurve& base() const { return base_; }
    BaseCurve& base() { return base_; }
    const std::optional<CurveClassExpr>& bundle() const { return bundle_; }

    bool has_generator(const std::string& g) const { return index_.count(g) != 0; }
    const GeneratorRecord& generator(const std::string& g) const {
        auto it = index_.find(g);
        if (it == index_.end()) throw UnknownName("unknown generator: " + g);
        return generators_[it->second];
    }

    /// Gram matrix over the generators, in generator order.
    std::vector<std::vector<Integer>> gram() const {
        std::vector<std::vector<Integer>> g(generators_.size(), std::vector<Integer>(generators_.size()));
        for (std::size_t i = 0; i < generators_.size(); ++i)
            for (std::size_t j = 0; j < generators_.size(); ++j) g[i][j] = pair(generators_[i], generators_[j]);
        return g;
    }

    Integer intersect(const DivisorClass& a, const DivisorClass& b) const {
        Integer sum = 0;
        for (const auto& [ga, ca] : a.coeffs) {
            const GeneratorRecord& ra = generator(ga);
            for (const auto& [gb, cb] : b.coeffs) sum += ca * cb * pair(ra, generator(gb));
        }
        return sum;
    }
    Integer self_intersection(const DivisorClass& a) const { return intersect(a, a); }

    Integer adjunction_pa(const DivisorClass& d) const {
        Integer twice = self_intersection(d) + intersect(d, canonical_);
        if (twice % 2 != 0) throw ParityError("non-integral arithmetic genus for " + d.str());
        return 1 + twice / 2;
    }

    Integer chi_rr(const DivisorClass& d) const {
        Integer twice = intersect(d, d - canonical_);
        if (twice % 2 != 0) throw ParityError("non-integral Euler characteristic for " + d.str());
        return chi_structure() + twice / 2;
    }

    /// Base-curve class as a fiber combination: f[P] per point, f[K] (or its
    /// fold-down when q <= 1) for K_Gamma, tags for torsion.
    DivisorClass fiber_class(const CurveClassExpr& e) const {
        require_ruled();
        base_.validate(e);
        DivisorClass d;
        for (const auto& [p, c] : e.points) d += DivisorClass::generator(fiber_generator(p), c);
        if (e.k_coeff != 0) {
            if (q_ >= 2)
                d += DivisorClass::generator("f[K]", e.k_coeff);
            else if (q_ == 0)
                d += DivisorClass::generator("f", -2 * e.k_coeff);
        }
        for (const auto& [t, c] : e.torsion) d += DivisorClass::tag(t, c);
        return d;
    }

    /// Inverse of fiber_class on the fiber-and-tag part of a class.
    CurveClassExpr base_class(const DivisorClass& d) const {
        require_ruled();
        CurveClassExpr e;
        for (const auto& [g, c] : d.coeffs) {
            const GeneratorRecord& r = generator(g);
            if (r.role != GeneratorRole::Fiber) continue;
            if (r.point == "K")
                e += Integer(c) * CurveClassExpr::canonical();
            else
                e += CurveClassExpr::point(r.point, c);
        }
        for (const auto& [t, c] : d.tags) e += CurveClassExpr::torsion_symbol(t, c);
        return e;
    }

    void add_torsion(TorsionRelation rel) {
        require_ruled();
        base_.add_torsion(std::move(rel));
    }

    /// Fixes O(D) of the presentation P(O + O(D)); K becomes -2C0 + (K_Gamma + D)f.
    void set_bundle(const CurveClassExpr& d) {
        require_ruled();
        base_.validate(d);
        if (base_.degree(d) != -e_)
            throw Error("bundle degree " + base_.degree(d).str() + " does not match e = " + e_.str());
        if (!log_.empty()) throw Error("the bundle must be set before any blow-up");
        bundle_ = d;
        canonical_ = DivisorClass::generator("C0", -2) + fiber_class(CurveClassExpr::canonical() + d);
    }

    /// Replaces the canonical vector by a linearly equivalent representative.
    void set_canonical(const DivisorClass& k) {
        validate(k);
        if (!linearly_equivalent(k, canonical_))
            throw Error("declared canonical class " + k.str() + " is not equivalent to " + canonical_.str());
        canonical_ = k;
    }

    void validate(const DivisorClass& d) const {
        for (const auto& [g, c] : d.coeffs) generator(g);
        for (const auto& [t, c] : d.tags)
            if (kind_ != SurfaceKind::Ruled || !base_.has_torsion(t)) throw UnknownName("undeclared torsion symbol: " + t);
    }

    /// Normal form modulo linear equivalence as far as the declared relations know it.
    DivisorClass reduce(const DivisorClass& d) const {
        validate(d);
        if (kind_ != SurfaceKind::Ruled) return d;
        DivisorClass out;
        for (const auto& [g, c] : d.coeffs)
            if (generator(g).role != GeneratorRole::Fiber) out.coeffs[g] = c;
        CurveClassExpr fib = base_.reduce(base_class(d));
        if (q_ == 0) {
            Integer deg = base_.degree(fib);
            if (deg != 0) out.coeffs["f"] = deg;
            return out;
        }
        return out + fiber_class(fib);
    }

    bool linearly_equivalent(const DivisorClass& a, const DivisorClass& b) const { return reduce(a - b).is_zero(); }

    /// Coordinates with every fiber generator replaced by weight * f and tags dropped.
    DivisorClass numeric_form(const DivisorClass& d) const {
        DivisorClass out;
        for (const auto& [g, c] : d.coeffs) {
            const GeneratorRecord& r = generator(g);
            if (r.role == GeneratorRole::Fiber)
                out += DivisorClass::generator("f", c * r.weight);
            else
                out += DivisorClass::generator(g, c);
        }
        return out;
    }

    bool numerically_equal(const DivisorClass& a, const DivisorClass& b) const {
        return numeric_form(a) == numeric_form(b);
    }

    // Curves

    bool has_curve(const std::string& name) const { return find_curve(name) != nullptr; }
    const CurveRecord& curve(const std::string& name) const {
        const CurveRecord* c = find_curve(name);
        if (!c) throw UnknownName("unknown curve: " + name);
        return *c;
    }

    void add_curve(CurveRecord c) {
        if (has_curve(c.name)) throw Error("duplicate curve name: " + c.name);
        validate(c.cls);
        Integer pa = adjunction_pa(c.cls);
        if (c.declared_pa && *c.declared_pa != pa)
            throw Error("declared p_a of " + c.name + " is " + c.declared_pa->str() + " but adjunction gives " + pa.str());
        if (c.rational && c.irreducible && c.smooth && pa != 0)
            throw Error("smooth rational curve " + c.name + " has p_a " + pa.str());
        c.declared_pa = pa;
        curves_.push_back(std::move(c));
    }

    /// Blows up one point; returns the new model (this one is unchanged).
    SurfaceModel blow_up(const BlowUpSpec& spec) const {
        SurfaceModel s = *this;
        const std::string gen = exceptional_generator(spec.name);
        const std::string exc = exceptional_curve(spec.name);
        if (s.has_generator(gen) || s.has_curve(exc)) throw Error("point already blown up: " + spec.name);
        std::vector<std::pair<std::string, Integer>> hosts = spec.hosts;
        int depth = 0;
        if (spec.parent) {
            const std::string pexc = exceptional_curve(*spec.parent);
            if (!s.has_generator(exceptional_generator(*spec.parent)))
                throw UnknownName("unknown parent point: " + *spec.parent);
            depth = s.generator(exceptional_generator(*spec.parent)).depth + 1;
            bool listed = std::any_of(hosts.begin(), hosts.end(), [&](const auto& h) { return h.first == pexc; });
            if (!listed) hosts.emplace_back(pexc, 1);
        }
        for (std::size_t i = 0; i < hosts.size(); ++i) {
            const auto& [name, m] = hosts[i];
            if (m <= 0) throw Error("multiplicity must be positive at " + spec.name + " on " + name);
            if (!s.has_curve(name)) throw UnknownName("unknown host curve: " + name);
            for (std::size_t j = 0; j < i; ++j)
                if (hosts[j].first == name) throw Error("host listed twice: " + name);
        }
        s.add_generator({gen, GeneratorRole::Exceptional, spec.name, 1, depth});
        s.canonical_ += DivisorClass::generator(gen);
        for (const auto& [name, m] : hosts) {
            CurveRecord& c = *s.find_curve(name);
            c.cls += DivisorClass::generator(gen, -m);
            c.declared_pa = s.adjunction_pa(c.cls);
        }
        s.curves_.push_back({exc, DivisorClass::generator(gen), Integer(0), true, true, true, {}});
        BlowUpSpec logged = spec;
        logged.hosts = hosts;
        s.log_.push_back(std::move(logged));
        return s;
    }

    /// Total transform of a class from an earlier model in this model's history.
    DivisorClass pullback(const DivisorClass& d) const {
        for (const auto& [g, c] : d.coeffs)
            if (!has_generator(g)) throw Error("stale class: generator " + g + " is not part of this model");
        validate(d);
        return d;
    }

    /// Pullback minus sum m_i e[x_i].  With `curve` given, the multiplicities
    /// must match those recorded in the blow-up log for that curve.
    DivisorClass strict_transform(const DivisorClass& total, const std::map<std::string, Integer>& mults,
                                  const std::optional<std::string>& curve = std::nullopt) const {
        DivisorClass d = pullback(total);
        for (const auto& [p, m] : mults) {
            if (m < 0) throw Error("negative multiplicity at " + p);
            d += DivisorClass::generator(exceptional_generator(p), -m);
        }
        validate(d);
        if (curve) {
            std::map<std::string, Integer> logged;
            for (const auto& b : log_)
                for (const auto& [h, m] : b.hosts)
                    if (h == *curve) logged[b.name] = m;
            std::map<std::string, Integer> given;
            for (const auto& [p, m] : mults)
                if (m != 0) given[p] = m;
            if (logged != given) throw Error("multiplicities do not match the blow-up log for " + *curve);
        }
        return d;
    }

    /// Class of a curve before any logged blow-up touched it.
    DivisorClass original_class(const std::string& name) const {
        DivisorClass d = curve(name).cls;
        for (const auto& b : log_)
            for (const auto& [h, m] : b.hosts)
                if (h == name) d += DivisorClass::generator(exceptional_generator(b.name), m);
        return d;
    }

    /// True when no exceptional generator appears.
    bool is_pullback_from_minimal(const DivisorClass& d) const {
        return std::none_of(d.coeffs.begin(), d.coeffs.end(), [&](const auto& kv) {
            return generator(kv.first).role == GeneratorRole::Exceptional;
        });
    }

private:
    void require_ruled() const {
        if (kind_ != SurfaceKind::Ruled) throw Error("operation requires a ruled surface");
    }

    void add_generator(GeneratorRecord r) {
        index_[r.name] = generators_.size();
        generators_.push_back(std::move(r));
    }

    Integer pair(const GeneratorRecord& a, const GeneratorRecord& b) const {
        using R = GeneratorRole;
        if (a.role == R::Exceptional || b.role == R::Exceptional) return a.name == b.name ? Integer(-1) : Integer(0);
        if (a.role == R::Line) return 1;  // only generator of the plane
        if (a.role == R::Section && b.role == R::Section) return -e_;
        if (a.role == R::Section) return b.weight;
        if (b.role == R::Section) return a.weight;
        return 0;  // two fibers
    }

    CurveRecord* find_curve(const std::string& name) {
        for (auto& c : curves_)
            if (c.name == name) return &c;
        return nullptr;
    }
    const CurveRecord* find_curve(const std::string& name) const {
        for (const auto& c : curves_)
            if (c.name == name) return &c;
        return nullptr;
    }

    SurfaceKind kind_ = SurfaceKind::ProjectivePlane;
    Integer q_ = 0;
    Integer e_ = 0;
    bool decomposable_ = true;
    std::vector<GeneratorRecord> generators_;
    std::map<std::string, std::size_t> index_;
    DivisorClass canonical_;
    std::vector<BlowUpSpec> log_;
    std::vector<CurveRecord> curves_;
    BaseCurve base_;
    std::optional<CurveClassExpr> bundle_;
};

inline SurfaceModel new_plane() { return SurfaceModel::plane(); }
inline SurfaceModel new_ruled(Integer q, Integer e, const std::vector<std::string>& fibers, bool decomposable = true) {
    return SurfaceModel::ruled(std::move(q), std::move(e), fibers, decomposable);
}

}  // namespace divforge

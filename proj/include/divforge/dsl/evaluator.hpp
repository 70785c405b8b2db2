#pragma once

// Executes a parsed script statement by statement.  Each surface name owns a
// model, a cohomology ledger, its let-bindings and its certificates; `use`
// switches between them and `copy` forks one.

#include "divforge/curvebundle.hpp"
#include "divforge/dsl/ast.hpp"
#include "divforge/dsl/parser.hpp"
#include "divforge/dsl/printer.hpp"
#include "divforge/linsys.hpp"
#include "divforge/picard.hpp"
#include "divforge/ruled.hpp"
#include "divforge/singularities.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace divforge::dsl {

inline constexpr const char* kEngineVersion = "divforge 1.0.0";

using Json = nlohmann::ordered_json;

/// JSON number when it fits, decimal string otherwise.
inline Json json_int(const Integer& v) {
    if (v >= Integer(std::numeric_limits<long long>::min()) && v <= Integer(std::numeric_limits<long long>::max()))
        return static_cast<long long>(v);
    return v.str();
}

struct Value {
    enum class Kind { None, Int, Bool, Tag, Class, Interval, Cycle, Object };
    Kind kind = Kind::None;
    Integer i = 0;
    bool b = false;
    std::string tag;
    std::optional<Integer> tag_arg;
    DivisorClass cls;
    Interval interval;
    std::vector<std::pair<std::string, Integer>> cycle;
    Json object;

    static Value integer(Integer v) {
        Value x;
        x.kind = Kind::Int;
        x.i = std::move(v);
        return x;
    }
    static Value boolean(bool v) {
        Value x;
        x.kind = Kind::Bool;
        x.b = v;
        return x;
    }
    static Value tagged(std::string t, std::optional<Integer> arg = std::nullopt) {
        Value x;
        x.kind = Kind::Tag;
        x.tag = std::move(t);
        x.tag_arg = std::move(arg);
        return x;
    }
    static Value divisor(DivisorClass d) {
        Value x;
        x.kind = Kind::Class;
        x.cls = std::move(d);
        return x;
    }
    static Value range(Interval iv) {
        if (iv.exact()) return integer(iv.lo);
        Value x;
        x.kind = Kind::Interval;
        x.interval = std::move(iv);
        return x;
    }
    static Value obj(Json j) {
        Value x;
        x.kind = Kind::Object;
        x.object = std::move(j);
        return x;
    }

    std::string tag_text() const { return tag + (tag_arg ? "(" + tag_arg->str() + ")" : ""); }

    Json to_json() const {
        switch (kind) {
            case Kind::None: return Json::object();
            case Kind::Int: return json_int(i);
            case Kind::Bool: return Json{{"bool", b}};
            case Kind::Tag: return Json{{"tag", tag_text()}};
            case Kind::Class: return Json{{"class", cls.str()}};
            case Kind::Interval:
                return Json{{"interval", Json::array({json_int(interval.lo),
                                                      interval.hi ? json_int(*interval.hi) : Json(nullptr)})}};
            case Kind::Cycle: {
                Json c = Json::object();
                for (const auto& [n, m] : cycle) c[n] = json_int(m);
                Json out{{"cycle", c}};
                for (const auto& [k, v] : object.items()) out[k] = v;
                return out;
            }
            case Kind::Object: return object;
        }
        return nullptr;
    }
};

enum class Status { Ok, Fail, Error };

inline const char* to_string(Status s) { return s == Status::Ok ? "ok" : s == Status::Fail ? "fail" : "error"; }

struct StatementResult {
    int stmt = 0;
    int line = 0;
    std::string kind;
    std::string source;
    Json value;
    Status status = Status::Ok;
    bool counted = false;  ///< asserts count toward pass/fail; expect_paper never does
    std::vector<std::string> trace;
};

struct Report {
    std::string script;
    std::string engine = kEngineVersion;
    std::vector<StatementResult> results;
    int pass = 0;
    int fail = 0;
    int errors = 0;

    bool success() const { return fail == 0 && errors == 0; }
};

struct EvalOptions {
    bool full_trace = false;
};

class Evaluator {
public:
    explicit Evaluator(EvalOptions opts = {}) : opts_(opts) {}

    Report run(const Script& script, const std::string& name) {
        Report rep;
        rep.script = name;
        for (std::size_t k = 0; k < script.statements.size(); ++k) {
            const Statement& st = script.statements[k];
            StatementResult r;
            r.stmt = static_cast<int>(k) + 1;
            r.line = st.line;
            r.source = print(st);
            r.kind = kind_of(st.body);
            trace_.clear();
            try {
                execute(st.body, r);
            } catch (const LedgerContradiction& e) {
                r.status = Status::Error;
                r.value = Json{{"error", e.what()}};
                trace_.insert(trace_.end(), e.trace().begin(), e.trace().end());
            } catch (const std::exception& e) {
                r.status = Status::Error;
                r.value = Json{{"error", e.what()}};
            }
            r.trace = std::move(trace_);
            if (r.status == Status::Error) ++rep.errors;
            if (r.counted && r.status == Status::Ok) ++rep.pass;
            if (r.counted && r.status == Status::Fail) ++rep.fail;
            rep.results.push_back(std::move(r));
        }
        return rep;
    }

    /// Final models after `run`, by surface name.
    std::map<std::string, const SurfaceModel*> surfaces() const {
        std::map<std::string, const SurfaceModel*> out;
        for (const auto& [n, st] : surfaces_) out[n] = &st.model;
        return out;
    }
    std::map<std::string, const Ledger*> ledgers() const {
        std::map<std::string, const Ledger*> out;
        for (const auto& [n, st] : surfaces_) out[n] = &st.ledger;
        return out;
    }

private:
    struct SurfaceState {
        SurfaceModel model;
        Ledger ledger;
        std::map<std::string, DivisorClass> lets;
        std::map<std::string, Certificate> certs;
    };

    static std::string kind_of(const StmtBody& b) {
        struct V {
            std::string operator()(const SurfaceDecl&) const { return "surface"; }
            std::string operator()(const UseStmt&) const { return "use"; }
            std::string operator()(const TorsionDecl&) const { return "torsion"; }
            std::string operator()(const BundleStmt&) const { return "bundle"; }
            std::string operator()(const CanonicalStmt&) const { return "canonical"; }
            std::string operator()(const CurveFactStmt&) const { return "fact"; }
            std::string operator()(const CurveDecl&) const { return "curve"; }
            std::string operator()(const NefStmt&) const { return "nef"; }
            std::string operator()(const BlowUpStmt&) const { return "blowup"; }
            std::string operator()(const LetStmt&) const { return "let"; }
            std::string operator()(const QueryStmt&) const { return "query"; }
            std::string operator()(const AssertStmt& a) const { return a.informational ? "expect_paper" : "assert"; }
            std::string operator()(const CertStmt&) const { return "cert"; }
            std::string operator()(const LedgerStmt&) const { return "ledger"; }
        };
        return std::visit(V{}, b);
    }

    SurfaceState& cur() {
        if (current_.empty()) throw Error("no surface declared");
        return surfaces_.at(current_);
    }
    SurfaceModel& model() { return cur().model; }

    // ---- statements -------------------------------------------------------

    void execute(const StmtBody& body, StatementResult& r) {
        std::visit([&](const auto& s) { exec(s, r); }, body);
    }

    void exec(const SurfaceDecl& d, StatementResult& r) {
        SurfaceState st;
        switch (d.kind) {
            case SurfaceDecl::Kind::Plane: st.model = SurfaceModel::plane(); break;
            case SurfaceDecl::Kind::Ruled: st.model = SurfaceModel::ruled(d.q, d.e, d.fibers, !d.nondecomposable); break;
            case SurfaceDecl::Kind::Copy: st = surfaces_.at(d.source); break;
        }
        surfaces_[d.name] = std::move(st);
        current_ = d.name;
        const SurfaceModel& s = model();
        Json gens = Json::array();
        for (const auto& g : s.generators()) gens.push_back(g.name);
        r.value = Json{{"surface", d.name}, {"generators", gens}, {"K", s.canonical().str()}};
    }

    void exec(const UseStmt& u, StatementResult& r) {
        if (!surfaces_.count(u.name)) throw UnknownName("unknown surface: " + u.name);
        current_ = u.name;
        r.value = Json{{"surface", u.name}};
    }

    void exec(const TorsionDecl& t, StatementResult& r) {
        TorsionRelation rel{t.name, {}, t.order, t.nonzero};
        if (t.expansion) {
            CurveClassExpr e = curve_expr(*t.expansion);
            if (e.k_coeff != 0 || !e.torsion.empty()) throw Error("torsion relation must be a difference of points");
            rel.expansion = e.points;
        }
        model().add_torsion(rel);
        r.value = Json{{"torsion", t.name}, {"order", json_int(t.order)}, {"nonzero", t.nonzero}};
    }

    void exec(const BundleStmt& b, StatementResult& r) {
        model().set_bundle(curve_expr(b.expr));
        r.value = Json{{"D", model().bundle()->str()}, {"K", model().canonical().str()}};
    }

    void exec(const CanonicalStmt& c, StatementResult& r) {
        model().set_canonical(divisor(c.expr));
        r.value = Json{{"K", model().canonical().str()}};
    }

    void exec(const CurveFactStmt& f, StatementResult& r) {
        CurveClassExpr e = curve_expr(f.expr);
        model().base().add_fact({e, f.value, f.why});
        r.value = Json{{"fact", "h0(" + model().base().reduce(e).str() + ")"}, {"value", json_int(f.value)}};
    }

    void exec(const CurveDecl& c, StatementResult& r) {
        CurveRecord rec;
        rec.name = c.name;
        rec.cls = divisor(c.expr);
        rec.declared_pa = c.pa;
        rec.irreducible = c.irreducible || c.smooth;
        rec.smooth = c.smooth;
        rec.rational = c.rational;
        if (cur().lets.count(c.name)) throw Error("name already bound by let: " + c.name);
        model().add_curve(rec);
        const CurveRecord& added = model().curve(c.name);
        r.value = Json{{"class", added.cls.str()},
                       {"self_intersection", json_int(model().self_intersection(added.cls))},
                       {"pa", json_int(*added.declared_pa)}};
    }

    void exec(const NefStmt& n, StatementResult& r) {
        DivisorClass d = divisor(n.expr);
        cur().ledger.declare_nef(model(), d, n.why);
        r.value = Json{{"nef", model().reduce(d).str()}};
    }

    void exec(const BlowUpStmt& b, StatementResult& r) {
        BlowUpSpec spec;
        spec.name = b.name;
        for (const auto& [m, host] : b.hosts) spec.hosts.emplace_back(host, m);
        spec.parent = b.parent;
        cur().model = model().blow_up(spec);
        const BlowUpSpec& logged = model().blowup_log().back();
        Json hosts = Json::array();
        for (const auto& [h, m] : logged.hosts) hosts.push_back(m == 1 ? h : m.str() + "*" + h);
        r.value = Json{{"point", b.name}, {"hosts", hosts}, {"K", model().canonical().str()}};
    }

    void exec(const LetStmt& l, StatementResult& r) {
        if (model().has_curve(l.name)) throw Error("name already declared as a curve: " + l.name);
        DivisorClass d = divisor(l.expr);
        cur().lets[l.name] = d;
        r.value = Json{{"class", d.str()}};
    }

    void exec(const QueryStmt& q, StatementResult& r) { r.value = query(q.query).to_json(); }

    void exec(const AssertStmt& a, StatementResult& r) {
        Value got = query(a.query);
        Json expected;
        bool ok = false;
        switch (a.expected.kind) {
            case Expected::Kind::Bool:
                expected = Json{{"bool", a.expected.flag}};
                ok = got.kind == Value::Kind::Bool && got.b == a.expected.flag;
                break;
            case Expected::Kind::Tag:
                expected = Json{{"tag", print(a.expected)}};
                ok = got.kind == Value::Kind::Tag && got.tag == a.expected.tag &&
                     (!a.expected.tag_arg || got.tag_arg == a.expected.tag_arg);
                break;
            case Expected::Kind::Expr:
                if (got.kind == Value::Kind::Class) {
                    DivisorClass want = divisor(a.expected.expr);
                    expected = Json{{"class", want.str()}};
                    ok = model().linearly_equivalent(got.cls, want);
                } else if (got.kind == Value::Kind::Cycle) {
                    auto want = formal_combination(a.expected.expr);
                    Json c = Json::object();
                    for (const auto& [n, m] : want) c[n] = json_int(m);
                    expected = Json{{"cycle", c}};
                    std::map<std::string, Integer> have;
                    for (const auto& [n, m] : got.cycle)
                        if (m != 0) have[n] = m;
                    ok = have == want;
                } else {
                    Integer want = integer(a.expected.expr);
                    expected = json_int(want);
                    ok = got.kind == Value::Kind::Int && got.i == want;
                }
                break;
        }
        r.value = Json{{"query", print(a.query)}, {"expected", expected}, {"computed", got.to_json()}};
        if (a.informational) {
            r.value["agrees"] = ok;
            r.value["note"] = a.note;
            r.status = Status::Ok;
        } else {
            r.counted = true;
            r.status = ok ? Status::Ok : Status::Fail;
        }
    }

    void exec(const CertStmt& c, StatementResult& r) {
        DivisorClass target = divisor(c.target);
        Certificate cert = nef_on_effective(model(), target, decomposition(c.decomposition));
        if (c.big) cert = big_check(model(), cert);
        Json items = Json::array();
        for (const auto& it : cert.items) {
            items.push_back(Json{{"component", it.component},
                                 {"multiplicity", json_int(it.multiplicity)},
                                 {"intersection", json_int(it.value)}});
            trace_.push_back("(" + target.str() + ")." + it.component + " = " + it.value.str());
        }
        r.value = Json{{"kind", to_string(cert.kind)},
                       {"target", target.str()},
                       {"nef", cert.nef},
                       {"self_intersection", json_int(cert.self_intersection)},
                       {"conclusion", cert.conclusion},
                       {"items", items}};
        cur().certs[c.name] = std::move(cert);
    }

    void exec(const LedgerStmt& l, StatementResult& r) {
        Ledger& led = cur().ledger;
        std::size_t before = led.history().size();
        int done = 0;
        for (const auto& step : l.steps) {
            try {
                ledger_step(step);
            } catch (const LedgerContradiction&) {
                throw;
            } catch (const std::exception& e) {
                throw Error("ledger step at line " + std::to_string(step.line) + " (" + print(step) + "): " + e.what());
            }
            ++done;
        }
        for (std::size_t k = before; k < led.history().size(); ++k) trace_.push_back(led.history()[k]);
        r.value = Json{{"steps", done}};
    }

    void ledger_step(const LedgerStep& s) {
        using K = LedgerStep::Kind;
        SurfaceModel& m = model();
        Ledger& led = cur().ledger;
        switch (s.kind) {
            case K::Fact: {
                Ledger::Cmp cmp = s.rel == Relation::Eq ? Ledger::Cmp::Eq
                                  : s.rel == Relation::Ge ? Ledger::Cmp::Ge
                                                          : Ledger::Cmp::Le;
                led.fact(m, s.degree, divisor(s.a), cmp, s.value, s.why);
                break;
            }
            case K::Conditions: led.conditions(m, divisor(s.a), divisor(s.b)); break;
            case K::Serre: led.serre(m, divisor(s.a)); break;
            case K::VanishNef: led.vanish_by_nef(m, divisor(s.a), divisor(s.b)); break;
            case K::VanishAntieffective: led.vanish_by_antieffective(m, divisor(s.a), decomposition(s.b)); break;
            case K::VanishKV: led.vanish_by_kv(m, divisor(s.a), certificate(s.name)); break;
            case K::Effective: led.effective(m, divisor(s.a), decomposition(s.b)); break;
            case K::Ses: led.ses(m, divisor(s.a), s.name); break;
            case K::Peel: led.peel(m, divisor(s.a), s.names, s.bound.value_or(Integer(64))); break;
            case K::Prym: led.prym(m, s.name, decomposition(s.b)); break;
        }
    }

    // ---- expressions ------------------------------------------------------

    DivisorClass divisor(const LinearExpr& e) {
        DivisorClass d;
        for (const auto& t : e.terms) {
            if (!t.atom) {
                if (t.coeff != 0) throw Error("integer constant " + t.coeff.str() + " in a divisor expression");
                continue;
            }
            d += t.coeff * divisor_atom(*t.atom);
        }
        return d;
    }

    DivisorClass divisor_atom(const Atom& a) {
        if (a.kind == Atom::Kind::Paren) return divisor(a.inner.at(0));
        if (a.kind == Atom::Kind::Call) {
            if (a.name == "c1") {
                if (!a.inner.empty()) throw Error("c1() takes no arguments");
                return c1_class(RuledPresentation::of(model()));
            }
            if (a.name == "orig") return model().original_class(single_name(a.inner.at(0)));
            if (a.name == "fiber") return model().fiber_class(curve_expr(a.inner.at(0)));
            throw UnknownName("unknown divisor function: " + a.name);
        }
        const std::string& n = a.name;
        if (auto it = cur().lets.find(n); it != cur().lets.end()) return it->second;
        if (model().has_curve(n)) return model().curve(n).cls;
        if (n == "K") return model().canonical();
        if (model().has_generator(n)) return DivisorClass::generator(n);
        if (n.rfind("t[", 0) == 0 && n.back() == ']') return DivisorClass::tag(n.substr(2, n.size() - 3));
        if (model().kind() == SurfaceKind::Ruled && model().base().has_torsion(n)) return DivisorClass::tag(n);
        throw UnknownName("unknown name in divisor expression: " + n);
    }

    CurveClassExpr curve_expr(const LinearExpr& e) {
        if (model().kind() != SurfaceKind::Ruled) throw Error("base-curve expressions need a ruled surface");
        const BaseCurve& base = model().base();
        CurveClassExpr out;
        for (const auto& t : e.terms) {
            if (!t.atom) {
                if (t.coeff != 0) throw Error("integer constant in a base-curve expression");
                continue;
            }
            const Atom& a = *t.atom;
            CurveClassExpr part;
            if (a.kind == Atom::Kind::Paren)
                part = curve_expr(a.inner.at(0));
            else if (a.kind == Atom::Kind::Call)
                throw Error("function call in a base-curve expression: " + a.name);
            else if (a.name == "K")
                part = CurveClassExpr::canonical();
            else if (base.has_point(a.name))
                part = CurveClassExpr::point(a.name);
            else if (base.has_torsion(a.name))
                part = CurveClassExpr::torsion_symbol(a.name);
            else if (a.name.rfind("t[", 0) == 0 && base.has_torsion(a.name.substr(2, a.name.size() - 3)))
                part = CurveClassExpr::torsion_symbol(a.name.substr(2, a.name.size() - 3));
            else
                throw UnknownName("unknown base-curve symbol: " + a.name);
            out += t.coeff * part;
        }
        base.validate(out);
        return out;
    }

    Integer integer(const LinearExpr& e) {
        Integer v = 0;
        for (const auto& t : e.terms) {
            if (!t.atom) {
                v += t.coeff;
                continue;
            }
            const Atom& a = *t.atom;
            if (a.kind == Atom::Kind::Paren) {
                v += t.coeff * integer(a.inner.at(0));
            } else if (a.kind == Atom::Kind::Call && query_arity().count(a.name)) {
                Call c{a.name, {}};
                for (const auto& in : a.inner) c.args.push_back(Arg{Arg::Kind::Expr, in, {}, {}, 0});
                check_arity(c);
                Value q = query(c);
                if (q.kind != Value::Kind::Int) throw Error(print(c) + " does not evaluate to an integer");
                v += t.coeff * q.i;
            } else {
                throw Error("'" + print(a) + "' is not an integer");
            }
        }
        return v;
    }

    static std::string single_name(const LinearExpr& e) {
        if (e.terms.size() != 1 || e.terms[0].coeff != 1 || !e.terms[0].atom ||
            e.terms[0].atom->kind != Atom::Kind::Ref)
            throw Error("expected a single name, got '" + print(e) + "'");
        return e.terms[0].atom->name;
    }

    std::map<std::string, Integer> formal_combination(const LinearExpr& e) {
        std::map<std::string, Integer> out;
        for (const auto& t : e.terms) {
            if (!t.atom || t.atom->kind != Atom::Kind::Ref) throw Error("expected a combination of names: " + print(e));
            out[t.atom->name] += t.coeff;
            if (out[t.atom->name] == 0) out.erase(t.atom->name);
        }
        return out;
    }

    Decomposition decomposition(const LinearExpr& e) {
        Decomposition parts;
        for (const auto& [n, m] : formal_combination(e)) {
            model().curve(n);
            parts.emplace_back(n, m);
        }
        return parts;
    }

    const Certificate& certificate(const std::string& name) {
        auto it = cur().certs.find(name);
        if (it == cur().certs.end()) throw UnknownName("unknown certificate: " + name);
        return it->second;
    }

    // ---- queries ----------------------------------------------------------

    static void check_arity(const Call& c) {
        auto it = query_arity().find(c.fn);
        if (it == query_arity().end()) throw UnknownName("unknown query function: " + c.fn);
        int n = static_cast<int>(c.args.size());
        if (n < it->second.first || (it->second.second >= 0 && n > it->second.second))
            throw Error("wrong number of arguments to " + c.fn);
    }

    const LinearExpr& expr_arg(const Call& c, std::size_t i) {
        if (c.args.at(i).kind != Arg::Kind::Expr) throw Error(c.fn + ": argument " + std::to_string(i + 1) + " must be an expression");
        return c.args[i].expr;
    }
    DivisorClass div_arg(const Call& c, std::size_t i) { return divisor(expr_arg(c, i)); }
    Integer int_arg(const Call& c, std::size_t i) { return integer(expr_arg(c, i)); }
    std::string name_arg(const Call& c, std::size_t i) { return single_name(expr_arg(c, i)); }

    std::vector<Integer> multiset_arg(const Call& c, std::size_t i) {
        const Arg& a = c.args.at(i);
        if (a.kind != Arg::Kind::Multiset) throw Error(c.fn + ": argument " + std::to_string(i + 1) + " must be a {multiset}");
        std::vector<Integer> out;
        for (const auto& [v, n] : a.multiset)
            for (Integer k = 0; k < n; ++k) out.push_back(v);
        return out;
    }

    std::vector<std::string> names_from(const Call& c, std::size_t first) {
        std::vector<std::string> out;
        for (std::size_t i = first; i < c.args.size(); ++i) out.push_back(name_arg(c, i));
        return out;
    }

    ExceptionalConfig config(const Call& c) { return ExceptionalConfig::from_model(model(), names_from(c, 0)); }

    Value curve_h0_value(const CurveH0& v) {
        if (resolved(v)) return Value::integer(value_of(v));
        trace_.push_back(std::get<NeedsDeclaration>(v).reason);
        return Value::tagged("NeedsDeclaration");
    }

    void ledger_trace(std::size_t var) {
        const Ledger& led = cur().ledger;
        std::vector<std::string> lines = led.trace(var);
        if (!opts_.full_trace) {
            // Direct provenance only: the lines that bound this variable.
            const std::string& vname = led.variables()[var].name;
            std::erase_if(lines, [&](const std::string& l) { return l.rfind(vname + " ", 0) != 0; });
        }
        trace_.insert(trace_.end(), lines.begin(), lines.end());
    }

    Value ledger_value(int i, const DivisorClass& d) {
        Ledger& led = cur().ledger;
        Interval iv = led.h(model(), i, d);
        ledger_trace(led.var_index(model(), i, d));
        return Value::range(iv);
    }

    Value query(const Call& c) {
        check_arity(c);
        const std::string& fn = c.fn;
        SurfaceModel& s = model();
        if (fn == "intersect") return Value::integer(s.intersect(div_arg(c, 0), div_arg(c, 1)));
        if (fn == "sq") return Value::integer(s.self_intersection(div_arg(c, 0)));
        if (fn == "pa") return Value::integer(s.adjunction_pa(div_arg(c, 0)));
        if (fn == "chi") return Value::integer(s.chi_rr(div_arg(c, 0)));
        if (fn == "class") return Value::divisor(s.reduce(div_arg(c, 0)));
        if (fn == "canonical") return Value::divisor(s.canonical());
        if (fn == "degree") return Value::integer(s.base().degree(curve_expr(expr_arg(c, 0))));
        if (fn == "h0curve") return curve_h0_value(s.base().h0(curve_expr(expr_arg(c, 0))));
        if (fn == "h1curve") return curve_h0_value(s.base().h1(curve_expr(expr_arg(c, 0))));
        if (fn == "rrcurve") return Value::integer(s.base().rr(curve_expr(expr_arg(c, 0))));
        if (fn == "positivity") return Value::tagged(to_string(s.base().positivity(curve_expr(expr_arg(c, 0)))));
        if (fn == "h0ruled") {
            RuledPresentation p = RuledPresentation::of(s);
            if (c.args.size() == 1) return curve_h0_value(h0_ruled_class(p, div_arg(c, 0)));
            return curve_h0_value(h0_ruled(p, int_arg(c, 0), curve_expr(expr_arg(c, 1))));
        }
        if (fn == "h0" || fn == "h1" || fn == "h2") return ledger_value(fn[1] - '0', div_arg(c, 0));
        if (fn == "dim") {
            Value v = ledger_value(0, div_arg(c, 0));
            if (v.kind == Value::Kind::Int) return Value::integer(v.i - 1);
            v.interval.lo -= 1;
            if (v.interval.hi) *v.interval.hi -= 1;
            return v;
        }
        if (fn == "h0r" || fn == "h1r") {
            std::string curve = name_arg(c, 0);
            DivisorClass a = div_arg(c, 1);
            Ledger& led = cur().ledger;
            int i = fn[1] - '0';
            Interval iv = led.restriction(s, i, curve, a);
            ledger_trace(led.restriction_index(s, i, curve, a));
            return Value::range(iv);
        }
        if (fn == "negdef") {
            DefinitenessResult d = is_negative_definite(config(c));
            if (!d.negative_definite) {
                std::vector<std::pair<std::string, Integer>> w;
                auto names = names_from(c, 0);
                for (std::size_t k = 0; k < names.size(); ++k) w.emplace_back(names[k], d.witness.at(k));
                trace_.push_back("witness " + format_combination(w) + " has nonnegative square");
            }
            return Value::boolean(d.negative_definite);
        }
        if (fn == "fundcycle" || fn == "pacycle" || fn == "z2") {
            ExceptionalConfig cfg = config(c);
            FundamentalCycleResult z = fundamental_cycle(cfg);
            trace_.push_back("Laufer sequence: " + std::to_string(z.steps) + " augmentation steps");
            if (fn == "pacycle") return Value::integer(pa_cycle(cfg, z.cycle));
            if (fn == "z2") return Value::integer(cfg.pair(z.cycle, z.cycle));
            Value v;
            v.kind = Value::Kind::Cycle;
            for (std::size_t k = 0; k < cfg.size(); ++k) v.cycle.emplace_back(cfg.names()[k], z.cycle[k]);
            v.object = Json{{"steps", z.steps}};
            return v;
        }
        if (fn == "classify") {
            SingularityClass k = classify_singularity(config(c));
            return std::visit(
                [&](const auto& x) -> Value {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, RationalDoublePoint>) return Value::tagged("RDP");
                    else if constexpr (std::is_same_v<T, RationalSingularity>) return Value::tagged("Rational", x.multiplicity);
                    else if constexpr (std::is_same_v<T, NonRationalSingularity>)
                        return Value::tagged("NonRational", x.pa_lower_bound);
                    else {
                        trace_.push_back(x.reason);
                        return Value::tagged("Unknown");
                    }
                },
                k);
        }
        if (fn == "budget") {
            std::vector<Integer> genera;
            for (std::size_t k = 1; k < c.args.size(); ++k) genera.push_back(int_arg(c, k));
            return Value::boolean(genus_budget_check(int_arg(c, 0), genera));
        }
        if (fn == "mobile" || fn == "fixedpart") {
            PeelResult p = fixed_part_peel(s, div_arg(c, 0), names_from(c, 1));
            trace_.insert(trace_.end(), p.trace.begin(), p.trace.end());
            return Value::divisor(fn == "mobile" ? p.mobile : s.reduce(p.fixed));
        }
        if (fn == "nef") return Value::boolean(certificate(name_arg(c, 0)).nef);
        if (fn == "big") {
            const Certificate& cert = certificate(name_arg(c, 0));
            return Value::boolean(cert.kind == CertKind::Big ? cert.conclusion : big_check(s, cert).conclusion);
        }
        if (fn == "recheck") return Value::boolean(recheck(s, certificate(name_arg(c, 0))));
        if (fn == "isprym") return Value::boolean(cur().ledger.is_prym(s, s.curve(name_arg(c, 0)).cls));
        if (fn == "expdim") return Value::integer(expected_dim_plane(int_arg(c, 0), multiset_arg(c, 1)));
        if (fn == "plucker") return Value::integer(plucker_genus(int_arg(c, 0), multiset_arg(c, 1)));
        if (fn == "cs")
            return Value::integer(castelnuovo_severi_bound(int_arg(c, 0), int_arg(c, 1), int_arg(c, 2), int_arg(c, 3)));
        if (fn == "productgenus") return Value::integer(product_curve_genus(int_arg(c, 0), int_arg(c, 1)));
        if (fn == "bpf") return Value::boolean(bpf_drop_test(int_arg(c, 0), int_arg(c, 1)));
        if (fn == "sep") return Value::boolean(separation_drop_test(int_arg(c, 0), int_arg(c, 1)));
        if (fn == "plurigenus") return Value::integer(plurigenus_parity_bound(int_arg(c, 0)));
        if (fn == "equiv") return Value::boolean(s.linearly_equivalent(div_arg(c, 0), div_arg(c, 1)));
        if (fn == "numeq") return Value::boolean(s.numerically_equal(div_arg(c, 0), div_arg(c, 1)));
        if (fn == "reider") return reider(c);
        throw UnknownName("unknown query function: " + fn);
    }

    /// reider(C, threshold, NAME:BOUND, ...).  Nonnegative combinations of
    /// declared curves are effective, so the oracle accepts every candidate.
    Value reider(const Call& c) {
        SurfaceModel& s = model();
        DivisorClass target = div_arg(c, 0);
        Integer threshold = int_arg(c, 1);
        std::vector<std::pair<std::string, Integer>> box;
        for (std::size_t k = 2; k < c.args.size(); ++k) {
            const Arg& a = c.args[k];
            if (a.kind != Arg::Kind::Box) throw Error("reider: box entries are written NAME:BOUND");
            s.curve(a.name);
            box.emplace_back(a.name, a.bound);
        }
        ReiderResult res = reider_search(s, target, box, threshold);
        std::string box_text;
        for (const auto& [n, b] : box) box_text += (box_text.empty() ? "" : ", ") + n + " <= " + b.str();
        if (auto* none = std::get_if<NoObstruction>(&res)) {
            trace_.push_back("examined " + std::to_string(none->examined) + " classes in box {" + box_text + "}");
            return Value::tagged("NoObstruction");
        }
        const auto& w = std::get<ReiderWitness>(res);
        trace_.push_back("witness E = " + w.E.str() + " with C.E = " + w.value.str() + " < " + threshold.str());
        return Value::tagged("Witness");
    }

    EvalOptions opts_;
    std::map<std::string, SurfaceState> surfaces_;
    std::string current_;
    std::vector<std::string> trace_;
};

inline Report evaluate(const Script& script, const std::string& name, EvalOptions opts = {}) {
    return Evaluator(opts).run(script, name);
}

}  // namespace divforge::dsl

#pragma once

// Canonical source form of a parsed script; parse(print(s)) == s.

#include "divforge/dsl/ast.hpp"

#include <sstream>
#include <string>

namespace divforge::dsl {

inline std::string print(const LinearExpr& e);

inline std::string print(const Atom& a) {
    switch (a.kind) {
        case Atom::Kind::Ref: return a.name;
        case Atom::Kind::Paren: return "(" + print(a.inner.at(0)) + ")";
        case Atom::Kind::Call: {
            std::string s = a.name + "(";
            for (std::size_t i = 0; i < a.inner.size(); ++i) s += (i ? ", " : "") + print(a.inner[i]);
            return s + ")";
        }
    }
    return {};
}

inline std::string print(const LinearExpr& e) {
    if (e.terms.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
        const Term& t = e.terms[i];
        bool neg = t.coeff < 0;
        Integer mag = neg ? Integer(-t.coeff) : t.coeff;
        if (i == 0)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        if (!t.atom)
            out += mag.str();
        else if (mag == 1)
            out += print(*t.atom);
        else
            out += mag.str() + "*" + print(*t.atom);
    }
    return out;
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline std::string print(const Arg& a) {
    switch (a.kind) {
        case Arg::Kind::Expr: return print(a.expr);
        case Arg::Kind::String: return quoted(a.name);
        case Arg::Kind::Box: return a.name + ":" + a.bound.str();
        case Arg::Kind::Multiset: {
            std::string s = "{";
            for (std::size_t i = 0; i < a.multiset.size(); ++i) {
                const auto& [v, n] = a.multiset[i];
                s += (i ? ", " : "") + v.str();
                if (n != 1) s += "*" + n.str();
            }
            return s + "}";
        }
    }
    return {};
}

inline std::string print(const Call& c) {
    std::string s = c.fn + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) s += (i ? ", " : "") + print(c.args[i]);
    return s + ")";
}

inline std::string print(const Expected& e) {
    switch (e.kind) {
        case Expected::Kind::Bool: return e.flag ? "true" : "false";
        case Expected::Kind::Tag: return e.tag + (e.tag_arg ? "(" + e.tag_arg->str() + ")" : "");
        case Expected::Kind::Expr: return print(e.expr);
    }
    return {};
}

inline const char* print(Relation r) { return r == Relation::Eq ? "=" : r == Relation::Ge ? ">=" : "<="; }

inline std::string print(const LedgerStep& s) {
    using K = LedgerStep::Kind;
    const std::string h = "h" + std::to_string(s.degree);
    auto why = [&] { return s.why.empty() ? std::string() : " " + quoted(s.why); };
    switch (s.kind) {
        case K::Fact: return "fact " + h + "(" + print(s.a) + ") " + print(s.rel) + " " + s.value.str() + why();
        case K::Conditions: return "conditions " + print(s.a) + " from " + print(s.b);
        case K::Serre: return "serre " + print(s.a);
        case K::VanishNef: return "vanish h0(" + print(s.a) + ") by nef " + print(s.b);
        case K::VanishAntieffective: return "vanish h0(" + print(s.a) + ") by antieffective " + print(s.b);
        case K::VanishKV: return "vanish h1(" + print(s.a) + ") by kv " + s.name;
        case K::Effective: return "effective " + print(s.a) + " as " + print(s.b);
        case K::Ses: return "ses " + print(s.a) + " by " + s.name;
        case K::Peel: {
            std::string out = "peel " + print(s.a) + " using ";
            for (std::size_t i = 0; i < s.names.size(); ++i) out += (i ? ", " : "") + s.names[i];
            if (s.bound) out += " bound " + s.bound->str();
            return out;
        }
        case K::Prym: return "prym " + s.name + " with " + print(s.b);
    }
    return {};
}

struct StatementPrinter {
    std::string operator()(const SurfaceDecl& s) const {
        std::string out = "surface " + s.name + " = ";
        switch (s.kind) {
            case SurfaceDecl::Kind::Plane: return out + "plane";
            case SurfaceDecl::Kind::Copy: return out + "copy " + s.source;
            case SurfaceDecl::Kind::Ruled: break;
        }
        out += "ruled q=" + s.q.str() + " e=" + s.e.str();
        if (!s.fibers.empty()) {
            out += " fibers";
            for (const auto& f : s.fibers) out += " " + f;
        }
        if (s.nondecomposable) out += " nondecomposable";
        return out;
    }
    std::string operator()(const UseStmt& u) const { return "use " + u.name; }
    std::string operator()(const TorsionDecl& t) const {
        std::string out = "torsion " + t.name;
        if (t.expansion) out += " = " + print(*t.expansion);
        out += " order " + t.order.str();
        if (t.nonzero) out += " nonzero";
        return out;
    }
    std::string operator()(const BundleStmt& b) const { return "bundle " + print(b.expr); }
    std::string operator()(const CanonicalStmt& c) const { return "canonical " + print(c.expr); }
    std::string operator()(const CurveFactStmt& f) const {
        return "fact h0(" + print(f.expr) + ") = " + f.value.str() + (f.why.empty() ? "" : " " + quoted(f.why));
    }
    std::string operator()(const CurveDecl& c) const {
        std::string out = "curve " + c.name + " = " + print(c.expr);
        if (c.irreducible) out += " irreducible";
        if (c.smooth) out += " smooth";
        if (c.rational) out += " rational";
        if (c.pa) out += " pa=" + c.pa->str();
        return out;
    }
    std::string operator()(const NefStmt& n) const {
        return "nef " + print(n.expr) + (n.why.empty() ? "" : " " + quoted(n.why));
    }
    std::string operator()(const BlowUpStmt& b) const {
        std::string out = "blowup " + b.name;
        if (!b.hosts.empty()) {
            out += " on ";
            for (std::size_t i = 0; i < b.hosts.size(); ++i) {
                if (i) out += ", ";
                if (b.hosts[i].first != 1) out += b.hosts[i].first.str() + "*";
                out += b.hosts[i].second;
            }
        }
        if (b.parent) out += " over " + *b.parent;
        return out;
    }
    std::string operator()(const LetStmt& l) const { return "let " + l.name + " = " + print(l.expr); }
    std::string operator()(const QueryStmt& q) const { return "query " + print(q.query); }
    std::string operator()(const AssertStmt& a) const {
        std::string out = (a.informational ? "expect_paper " : "assert ") + print(a.query) + " == " + print(a.expected);
        if (a.informational) out += " " + quoted(a.note);
        return out;
    }
    std::string operator()(const CertStmt& c) const {
        return "cert " + c.name + " = " + (c.big ? "nefbig(" : "nef(") + print(c.target) + "; " +
               print(c.decomposition) + ")";
    }
    std::string operator()(const LedgerStmt& l) const {
        std::string out = "ledger {\n";
        for (const auto& s : l.steps) out += "    " + print(s) + "\n";
        return out + "}";
    }
};

inline std::string print(const Statement& s) { return std::visit(StatementPrinter{}, s.body); }

inline std::string print(const Script& script) {
    std::string out;
    for (const auto& s : script.statements) out += print(s) + "\n";
    return out;
}

}  // namespace divforge::dsl

#pragma once

#include "divforge/integer.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace divforge::dsl {

struct LinearExpr;

/// A named reference (`C0`, `f[Q1]`, `E[x]`, `t[a]`, `K`), a zero-or-more
/// argument function atom (`c1()`), or a parenthesised expression.
struct Atom {
    enum class Kind { Ref, Call, Paren };
    Kind kind = Kind::Ref;
    std::string name;
    std::vector<LinearExpr> inner;
    bool operator==(const Atom&) const;
};

struct Term {
    Integer coeff = 1;
    std::optional<Atom> atom;  ///< empty: integer constant
    bool operator==(const Term&) const;
};

struct LinearExpr {
    std::vector<Term> terms;
    bool operator==(const LinearExpr&) const = default;
};

inline bool Atom::operator==(const Atom& o) const { return kind == o.kind && name == o.name && inner == o.inner; }
inline bool Term::operator==(const Term& o) const { return coeff == o.coeff && atom == o.atom; }

struct Arg {
    enum class Kind { Expr, Multiset, Box, String };
    Kind kind = Kind::Expr;
    LinearExpr expr;
    std::vector<std::pair<Integer, Integer>> multiset;  ///< (value, count)
    std::string name;                                    ///< box curve or string literal
    Integer bound = 0;
    bool operator==(const Arg&) const = default;
};

struct Call {
    std::string fn;
    std::vector<Arg> args;
    bool operator==(const Call&) const = default;
};

struct Expected {
    enum class Kind { Expr, Bool, Tag };
    Kind kind = Kind::Expr;
    LinearExpr expr;
    bool flag = false;
    std::string tag;
    std::optional<Integer> tag_arg;
    bool operator==(const Expected&) const = default;
};

enum class Relation { Eq, Ge, Le };

struct SurfaceDecl {
    enum class Kind { Plane, Ruled, Copy };
    std::string name;
    Kind kind = Kind::Plane;
    Integer q = 0, e = 0;
    std::vector<std::string> fibers;
    bool nondecomposable = false;
    std::string source;
    bool operator==(const SurfaceDecl&) const = default;
};
struct UseStmt {
    std::string name;
    bool operator==(const UseStmt&) const = default;
};
struct TorsionDecl {
    std::string name;
    std::optional<LinearExpr> expansion;
    Integer order = 2;
    bool nonzero = false;
    bool operator==(const TorsionDecl&) const = default;
};
struct BundleStmt {
    LinearExpr expr;
    bool operator==(const BundleStmt&) const = default;
};
struct CanonicalStmt {
    LinearExpr expr;
    bool operator==(const CanonicalStmt&) const = default;
};
struct CurveFactStmt {
    LinearExpr expr;
    Integer value = 0;
    std::string why;
    bool operator==(const CurveFactStmt&) const = default;
};
struct CurveDecl {
    std::string name;
    LinearExpr expr;
    bool irreducible = false, smooth = false, rational = false;
    std::optional<Integer> pa;
    bool operator==(const CurveDecl&) const = default;
};
struct NefStmt {
    LinearExpr expr;
    std::string why;
    bool operator==(const NefStmt&) const = default;
};
struct BlowUpStmt {
    std::string name;
    std::vector<std::pair<Integer, std::string>> hosts;
    std::optional<std::string> parent;
    bool operator==(const BlowUpStmt&) const = default;
};
struct LetStmt {
    std::string name;
    LinearExpr expr;
    bool operator==(const LetStmt&) const = default;
};
struct QueryStmt {
    Call query;
    bool operator==(const QueryStmt&) const = default;
};
struct AssertStmt {
    Call query;
    Expected expected;
    bool informational = false;  ///< expect_paper: informational, never fails
    std::string note;
    bool operator==(const AssertStmt&) const = default;
};
struct CertStmt {
    std::string name;
    bool big = false;
    LinearExpr target;
    LinearExpr decomposition;
    bool operator==(const CertStmt&) const = default;
};

struct LedgerStep {
    enum class Kind { Fact, Conditions, Serre, VanishNef, VanishAntieffective, VanishKV, Effective, Ses, Peel, Prym };
    Kind kind = Kind::Fact;
    int degree = 0;
    Relation rel = Relation::Eq;
    Integer value = 0;
    std::string why;
    LinearExpr a, b;
    std::string name;
    std::vector<std::string> names;
    std::optional<Integer> bound;
    int line = 0;
    bool operator==(const LedgerStep& o) const {
        return kind == o.kind && degree == o.degree && rel == o.rel && value == o.value && why == o.why && a == o.a &&
               b == o.b && name == o.name && names == o.names && bound == o.bound;
    }
};
struct LedgerStmt {
    std::vector<LedgerStep> steps;
    bool operator==(const LedgerStmt&) const = default;
};

using StmtBody = std::variant<SurfaceDecl, UseStmt, TorsionDecl, BundleStmt, CanonicalStmt, CurveFactStmt, CurveDecl,
                              NefStmt, BlowUpStmt, LetStmt, QueryStmt, AssertStmt, CertStmt, LedgerStmt>;

struct Statement {
    StmtBody body;
    int line = 0;  ///< source position, not part of equality
    bool operator==(const Statement& o) const { return body == o.body; }
};

struct Script {
    std::vector<Statement> statements;
    bool operator==(const Script&) const = default;
};

}  // namespace divforge::dsl

#pragma once

#include "divforge/dsl/ast.hpp"

#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace divforge::dsl {

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& msg)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column),
          message_(msg) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_, column_;
    std::string message_;
};

struct Token {
    enum class Kind { Ident, Int, String, Sym, Newline, End };
    Kind kind;
    std::string text;
    int line, column;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1, depth = 0;
    std::pair<int, int> first_open{0, 0};  // outermost unclosed bracket
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::string t, int l, int c) { out.push_back({k, std::move(t), l, c}); };
    auto continues = [&] {
        // A newline after a binary operator or comma continues the statement.
        if (out.empty() || out.back().kind != Token::Kind::Sym) return false;
        const std::string& t = out.back().text;
        return t == "+" || t == "-" || t == "*" || t == "," || t == "=" || t == "==";
    };
    while (i < src.size()) {
        char ch = src[i];
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') ++i, ++col;
            continue;
        }
        if (ch == '\n') {
            if (depth == 0 && !continues() && !out.empty() && out.back().kind != Token::Kind::Newline)
                push(Token::Kind::Newline, "\\n", line, col);
            ++i, ++line, col = 1;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i, ++col;
            continue;
        }
        int l = line, c = col;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            push(Token::Kind::Ident, src.substr(i, j - i), l, c);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Token::Kind::Int, src.substr(i, j - i), l, c);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (ch == '"') {
            std::size_t j = i + 1;
            std::string s;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') s += src[j++];
            if (j >= src.size() || src[j] != '"') throw ParseError(l, c, "unterminated string");
            push(Token::Kind::String, s, l, c);
            col += static_cast<int>(j + 1 - i);
            i = j + 1;
            continue;
        }
        std::string two = src.substr(i, 2);
        if (two == "==" || two == ">=" || two == "<=") {
            push(Token::Kind::Sym, two, l, c);
            i += 2, col += 2;
            continue;
        }
        static const std::string singles = "=+-*(){}[],;:";
        if (singles.find(ch) == std::string::npos) throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
        if (ch == '(' || ch == '[') {
            if (depth++ == 0) first_open = {l, c};
        }
        if (ch == ')' || ch == ']') {
            if (depth == 0) throw ParseError(l, c, std::string("unbalanced '") + ch + "'");
            --depth;
        }
        push(Token::Kind::Sym, std::string(1, ch), l, c);
        ++i, ++col;
    }
    if (depth != 0) throw ParseError(first_open.first, first_open.second, "bracket is never closed");
    if (!out.empty() && out.back().kind != Token::Kind::Newline) push(Token::Kind::Newline, "\\n", line, col);
    push(Token::Kind::End, "", line, col);
    return out;
}

/// Query functions with their (min, max) argument counts; max -1 = unbounded.
inline const std::map<std::string, std::pair<int, int>>& query_arity() {
    static const std::map<std::string, std::pair<int, int>> table = {
        {"intersect", {2, 2}},  {"sq", {1, 1}},          {"pa", {1, 1}},          {"chi", {1, 1}},
        {"class", {1, 1}},      {"canonical", {0, 0}},   {"degree", {1, 1}},      {"h0curve", {1, 1}},
        {"h1curve", {1, 1}},    {"rrcurve", {1, 1}},     {"positivity", {1, 1}},  {"h0ruled", {1, 2}},
        {"h0", {1, 1}},         {"h1", {1, 1}},          {"h2", {1, 1}},          {"dim", {1, 1}},
        {"h0r", {2, 2}},        {"h1r", {2, 2}},         {"negdef", {1, -1}},     {"fundcycle", {1, -1}},
        {"pacycle", {1, -1}},   {"z2", {1, -1}},         {"classify", {1, -1}},   {"budget", {1, -1}},
        {"mobile", {2, -1}},    {"fixedpart", {2, -1}},  {"nef", {1, 1}},         {"big", {1, 1}},
        {"expdim", {2, 2}},     {"plucker", {2, 2}},     {"cs", {4, 4}},          {"productgenus", {2, 2}},
        {"bpf", {2, 2}},        {"sep", {2, 2}},         {"reider", {2, -1}},     {"plurigenus", {1, 1}},
        {"equiv", {2, 2}},      {"numeq", {2, 2}},       {"recheck", {1, 1}},     {"isprym", {1, 1}},
    };
    return table;
}

inline const std::set<std::string>& expected_tags() {
    static const std::set<std::string> tags = {"RDP",           "Rational",      "NonRational", "Unknown",
                                               "NoObstruction", "Witness",       "VeryAmple",   "BasePointFree",
                                               "NeedsDeclaration"};
    return tags;
}

inline constexpr const char* kDefaultSurface = "X";

class Parser {
public:
    explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

    Script parse() {
        Script s;
        skip_newlines();
        while (!at_end()) {
            int line = peek().line;
            s.statements.push_back({statement(), line});
            end_of_statement();
            skip_newlines();
        }
        return s;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const Token* t = nullptr) const {
        const Token& at = t ? *t : peek();
        throw ParseError(at.line, at.column, msg);
    }

    bool is_sym(const std::string& s, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Sym && peek(k).text == s;
    }
    bool is_word(const std::string& s, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Ident && peek(k).text == s;
    }
    void expect_sym(const std::string& s) {
        if (!is_sym(s)) fail("expected '" + s + "'" + found());
        advance();
    }
    void expect_word(const std::string& s) {
        if (!is_word(s)) fail("expected '" + s + "'" + found());
        advance();
    }
    std::string found() const {
        const Token& t = peek();
        if (t.kind == Token::Kind::End) return " but reached end of input";
        if (t.kind == Token::Kind::Newline) return " but reached end of line";
        return " but found '" + t.text + "'";
    }
    std::string ident(const std::string& what = "a name") {
        if (peek().kind != Token::Kind::Ident) fail("expected " + what + found());
        return advance().text;
    }
    Integer integer() {
        bool neg = false;
        if (is_sym("-")) {
            advance();
            neg = true;
        }
        if (peek().kind != Token::Kind::Int) fail("expected an integer" + found());
        Integer v(advance().text);
        return neg ? Integer(-v) : v;
    }
    std::string string_lit() {
        if (peek().kind != Token::Kind::String) fail("expected a quoted string" + found());
        return advance().text;
    }
    std::string optional_string() { return peek().kind == Token::Kind::String ? advance().text : std::string(); }

    void skip_newlines() {
        while (peek().kind == Token::Kind::Newline) advance();
    }
    void end_of_statement() {
        if (peek().kind != Token::Kind::Newline && !at_end()) fail("unexpected token '" + peek().text + "'");
    }

    /// NAME or NAME[ARG] as one reference string.
    std::string ref_name() {
        std::string n = ident();
        if (is_sym("[")) {
            advance();
            std::string arg = ident("a point name");
            expect_sym("]");
            n += "[" + arg + "]";
        }
        return n;
    }

    LinearExpr expr() {
        LinearExpr e;
        bool first = true;
        for (;;) {
            int sign = 1;
            if (is_sym("+") || is_sym("-")) {
                sign = is_sym("-") ? -1 : 1;
                advance();
            } else if (!first) {
                break;
            }
            Term t = term();
            t.coeff *= sign;
            e.terms.push_back(std::move(t));
            first = false;
        }
        return e;
    }

    Term term() {
        Term t;
        if (peek().kind == Token::Kind::Int) {
            t.coeff = Integer(advance().text);
            if (!is_sym("*")) return t;  // constant
            advance();
        }
        t.atom = atom();
        return t;
    }

    Atom atom() {
        Atom a;
        if (is_sym("(")) {
            advance();
            a.kind = Atom::Kind::Paren;
            a.inner.push_back(expr());
            expect_sym(")");
            return a;
        }
        if (peek().kind != Token::Kind::Ident) fail("expected a divisor term" + found());
        if (is_sym("(", 1)) {
            a.kind = Atom::Kind::Call;
            a.name = advance().text;
            advance();
            if (!is_sym(")")) {
                a.inner.push_back(expr());
                while (is_sym(",")) {
                    advance();
                    a.inner.push_back(expr());
                }
            }
            expect_sym(")");
            return a;
        }
        a.kind = Atom::Kind::Ref;
        a.name = ref_name();
        return a;
    }

    Arg arg() {
        Arg a;
        if (is_sym("{")) {
            advance();
            a.kind = Arg::Kind::Multiset;
            while (!is_sym("}")) {
                Integer v = integer();
                Integer count = 1;
                if (is_sym("*")) {
                    advance();
                    count = integer();
                    if (count < 0) fail("negative repeat count");
                }
                a.multiset.emplace_back(v, count);
                if (!is_sym(",")) break;
                advance();
            }
            expect_sym("}");
            return a;
        }
        if (peek().kind == Token::Kind::String) {
            a.kind = Arg::Kind::String;
            a.name = advance().text;
            return a;
        }
        if (peek().kind == Token::Kind::Ident && (is_sym(":", 1) || (is_sym("[", 1) && is_sym(":", 4)))) {
            a.kind = Arg::Kind::Box;
            a.name = ref_name();
            expect_sym(":");
            a.bound = integer();
            return a;
        }
        a.kind = Arg::Kind::Expr;
        a.expr = expr();
        return a;
    }

    Call call() {
        const Token& at = peek();
        Call c;
        c.fn = ident("a query function");
        auto it = query_arity().find(c.fn);
        if (it == query_arity().end()) fail("unknown query function '" + c.fn + "'", &at);
        expect_sym("(");
        if (!is_sym(")")) {
            c.args.push_back(arg());
            while (is_sym(",")) {
                advance();
                c.args.push_back(arg());
            }
        }
        expect_sym(")");
        auto [lo, hi] = it->second;
        int n = static_cast<int>(c.args.size());
        if (n < lo || (hi >= 0 && n > hi))
            fail(c.fn + " takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + (hi < 0 ? "+" : "-" + std::to_string(hi))) +
                     " arguments, got " + std::to_string(n),
                 &at);
        return c;
    }

    Expected expected() {
        Expected e;
        if (is_word("true") || is_word("false")) {
            e.kind = Expected::Kind::Bool;
            e.flag = advance().text == "true";
            return e;
        }
        if (peek().kind == Token::Kind::Ident && expected_tags().count(peek().text) && !is_sym("[", 1)) {
            e.kind = Expected::Kind::Tag;
            e.tag = advance().text;
            if (is_sym("(")) {
                advance();
                e.tag_arg = integer();
                expect_sym(")");
            }
            return e;
        }
        e.kind = Expected::Kind::Expr;
        e.expr = expr();
        return e;
    }

    Relation relation() {
        if (is_sym("=")) {
            advance();
            return Relation::Eq;
        }
        if (is_sym(">=")) {
            advance();
            return Relation::Ge;
        }
        if (is_sym("<=")) {
            advance();
            return Relation::Le;
        }
        fail("expected '=', '>=' or '<='" + found());
    }

    int cohomology_index() {
        const Token& at = peek();
        std::string h = ident("h0, h1 or h2");
        if (h != "h0" && h != "h1" && h != "h2") fail("expected h0, h1 or h2", &at);
        return h[1] - '0';
    }

    StmtBody statement() {
        const Token& at = peek();
        if (at.kind != Token::Kind::Ident) fail("expected a statement" + found());
        const std::string kw = at.text;
        advance();
        if (kw == "surface") return surface_decl();
        if (kw == "use") {
            UseStmt u{ident("a surface name")};
            if (!surfaces_.count(u.name)) fail("undeclared surface '" + u.name + "'", &toks_[pos_ - 1]);
            return u;
        }
        if (kw == "torsion") {
            TorsionDecl t;
            t.name = ident("a torsion name");
            if (is_sym("=")) {
                advance();
                t.expansion = expr();
            }
            expect_word("order");
            t.order = integer();
            if (is_word("nonzero")) {
                advance();
                t.nonzero = true;
            }
            return t;
        }
        if (kw == "bundle") return BundleStmt{expr()};
        if (kw == "canonical") return CanonicalStmt{expr()};
        if (kw == "fact") {
            CurveFactStmt f;
            expect_word("h0");
            expect_sym("(");
            f.expr = expr();
            expect_sym(")");
            expect_sym("=");
            f.value = integer();
            f.why = optional_string();
            return f;
        }
        if (kw == "curve") {
            CurveDecl c;
            c.name = ident("a curve name");
            expect_sym("=");
            c.expr = expr();
            while (peek().kind == Token::Kind::Ident) {
                const Token& ft = peek();
                std::string flag = advance().text;
                if (flag == "irreducible") c.irreducible = true;
                else if (flag == "smooth") c.smooth = true;
                else if (flag == "rational") c.rational = true;
                else if (flag == "pa") {
                    expect_sym("=");
                    c.pa = integer();
                } else
                    fail("unknown curve flag '" + flag + "'", &ft);
            }
            return c;
        }
        if (kw == "nef") {
            NefStmt n;
            n.expr = expr();
            n.why = optional_string();
            return n;
        }
        if (kw == "blowup") {
            BlowUpStmt b;
            b.name = ident("a point name");
            if (is_word("on")) {
                advance();
                do {
                    if (is_sym(",")) advance();
                    Integer m = 1;
                    if (peek().kind == Token::Kind::Int) {
                        m = integer();
                        expect_sym("*");
                    }
                    b.hosts.emplace_back(m, ref_name());
                } while (is_sym(","));
            }
            if (is_word("over")) {
                advance();
                b.parent = ident("a parent point");
            }
            return b;
        }
        if (kw == "let") {
            LetStmt l;
            l.name = ident();
            expect_sym("=");
            l.expr = expr();
            return l;
        }
        if (kw == "query") return QueryStmt{call()};
        if (kw == "assert" || kw == "expect_paper") {
            AssertStmt a;
            a.informational = kw == "expect_paper";
            a.query = call();
            expect_sym("==");
            a.expected = expected();
            if (a.informational) a.note = string_lit();
            return a;
        }
        if (kw == "cert") {
            CertStmt c;
            c.name = ident("a certificate name");
            expect_sym("=");
            const Token& kt = peek();
            std::string kind = ident("nef or nefbig");
            if (kind != "nef" && kind != "nefbig") fail("expected nef or nefbig", &kt);
            c.big = kind == "nefbig";
            expect_sym("(");
            c.target = expr();
            expect_sym(";");
            c.decomposition = expr();
            expect_sym(")");
            certs_.insert(c.name);
            return c;
        }
        if (kw == "ledger") return ledger();
        fail("unknown statement '" + kw + "'", &at);
    }

    SurfaceDecl surface_decl() {
        SurfaceDecl s;
        // `surface ruled ...` without a name declares the default surface.
        if ((is_word("plane") || is_word("ruled")) && !is_sym("=", 1)) {
            s.name = kDefaultSurface;
        } else {
            s.name = ident("a surface name");
            expect_sym("=");
        }
        const Token& kt = peek();
        std::string kind = ident("plane, ruled or copy");
        if (kind == "plane") {
            s.kind = SurfaceDecl::Kind::Plane;
        } else if (kind == "ruled") {
            s.kind = SurfaceDecl::Kind::Ruled;
            expect_word("q");
            expect_sym("=");
            s.q = integer();
            expect_word("e");
            expect_sym("=");
            s.e = integer();
            if (is_word("fibers")) {
                advance();
                while (peek().kind == Token::Kind::Ident && !is_word("nondecomposable")) s.fibers.push_back(advance().text);
            }
            if (is_word("nondecomposable")) {
                advance();
                s.nondecomposable = true;
            }
        } else if (kind == "copy") {
            s.kind = SurfaceDecl::Kind::Copy;
            const Token& st = peek();
            s.source = ident("a surface name");
            if (!surfaces_.count(s.source)) fail("undeclared surface '" + s.source + "'", &st);
        } else {
            fail("expected plane, ruled or copy", &kt);
        }
        surfaces_.insert(s.name);
        return s;
    }

    LedgerStmt ledger() {
        LedgerStmt l;
        expect_sym("{");
        skip_newlines();
        while (!is_sym("}")) {
            if (at_end()) fail("unterminated ledger block");
            l.steps.push_back(ledger_step());
            if (!is_sym("}")) {
                if (peek().kind != Token::Kind::Newline) fail("unexpected token '" + peek().text + "' in ledger step");
                skip_newlines();
            }
        }
        advance();
        return l;
    }

    LedgerStep ledger_step() {
        using K = LedgerStep::Kind;
        LedgerStep s;
        const Token& at = peek();
        s.line = at.line;
        std::string kw = ident("a ledger step");
        if (kw == "fact") {
            s.kind = K::Fact;
            s.degree = cohomology_index();
            expect_sym("(");
            s.a = expr();
            expect_sym(")");
            s.rel = relation();
            s.value = integer();
            s.why = optional_string();
        } else if (kw == "conditions") {
            s.kind = K::Conditions;
            s.a = expr();
            expect_word("from");
            s.b = expr();
        } else if (kw == "serre") {
            s.kind = K::Serre;
            s.a = expr();
        } else if (kw == "vanish") {
            const Token& ht = peek();
            s.degree = cohomology_index();
            expect_sym("(");
            s.a = expr();
            expect_sym(")");
            expect_word("by");
            const Token& how_t = peek();
            std::string how = ident("nef, antieffective or kv");
            if (how == "nef" || how == "antieffective") {
                if (s.degree != 0) fail("only h0 vanishes by " + how, &ht);
                s.kind = how == "nef" ? K::VanishNef : K::VanishAntieffective;
                s.b = expr();
            } else if (how == "kv") {
                if (s.degree != 1) fail("kv vanishing is for h1", &ht);
                s.kind = K::VanishKV;
                const Token& ct = peek();
                s.name = ident("a certificate name");
                if (!certs_.count(s.name)) fail("undeclared certificate '" + s.name + "'", &ct);
            } else {
                fail("expected nef, antieffective or kv", &how_t);
            }
        } else if (kw == "effective") {
            s.kind = K::Effective;
            s.a = expr();
            expect_word("as");
            s.b = expr();
        } else if (kw == "ses") {
            s.kind = K::Ses;
            s.a = expr();
            expect_word("by");
            s.name = ref_name();
        } else if (kw == "peel") {
            s.kind = K::Peel;
            s.a = expr();
            expect_word("using");
            s.names.push_back(ref_name());
            while (is_sym(",")) {
                advance();
                s.names.push_back(ref_name());
            }
            if (is_word("bound")) {
                advance();
                s.bound = integer();
            }
        } else if (kw == "prym") {
            s.kind = K::Prym;
            s.name = ref_name();
            expect_word("with");
            s.b = expr();
        } else {
            fail("unknown ledger step '" + kw + "'", &at);
        }
        return s;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> surfaces_;
    std::set<std::string> certs_;
};

inline Script parse_script(const std::string& text) { return Parser(text).parse(); }

}  // namespace divforge::dsl

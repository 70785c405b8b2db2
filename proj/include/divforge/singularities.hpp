#pragma once

// Contractible configurations of curves: negative definiteness, Laufer's
// fundamental cycle, arithmetic genus of cycles and rationality.

#include "divforge/integer.hpp"
#include "divforge/picard.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace divforge {

class ExceptionalConfig {
public:
    ExceptionalConfig() = default;

    /// `canonical_degrees[i]` is E_i.K.
    ExceptionalConfig(std::vector<std::string> names, std::vector<std::vector<Integer>> gram,
                      std::vector<Integer> canonical_degrees)
        : names_(std::move(names)), gram_(std::move(gram)), k_(std::move(canonical_degrees)) {
        const std::size_t n = names_.size();
        if (n == 0) throw Error("empty configuration");
        if (gram_.size() != n || k_.size() != n) throw Error("configuration size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (gram_[i].size() != n) throw Error("gram matrix is not square");
            for (std::size_t j = 0; j < n; ++j) {
                if (gram_[i][j] != gram_[j][i]) throw Error("gram matrix is not symmetric");
                if (i != j && gram_[i][j] < 0) throw Error("distinct curves meet negatively");
            }
            if ((gram_[i][i] + k_[i]) % 2 != 0) throw ParityError("odd E^2 + E.K for " + names_[i]);
        }
    }

    /// Standalone form: self-intersections, p_a per curve, and edges.
    static ExceptionalConfig from_graph(std::vector<std::string> names, const std::vector<Integer>& self_int,
                                        const std::vector<Integer>& pa,
                                        const std::vector<std::tuple<std::size_t, std::size_t, Integer>>& edges) {
        const std::size_t n = names.size();
        std::vector<std::vector<Integer>> g(n, std::vector<Integer>(n, 0));
        std::vector<Integer> k(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (pa[i] < 0) throw Error("p_a must be nonnegative for " + names[i]);
            g[i][i] = self_int[i];
            k[i] = 2 * pa[i] - 2 - self_int[i];
        }
        for (const auto& [a, b, m] : edges) {
            if (a == b) throw Error("self-loop in dual graph at " + names[a]);
            if (m <= 0) throw Error("edge multiplicity must be positive");
            g[a][b] += m;
            g[b][a] += m;
        }
        return ExceptionalConfig(std::move(names), std::move(g), std::move(k));
    }

    /// Curves of a surface model, with E.K taken from its canonical class.
    static ExceptionalConfig from_model(const SurfaceModel& s, const std::vector<std::string>& curve_names) {
        std::vector<DivisorClass> cls;
        for (const auto& n : curve_names) cls.push_back(s.curve(n).cls);
        const std::size_t n = cls.size();
        std::vector<std::vector<Integer>> g(n, std::vector<Integer>(n));
        std::vector<Integer> k(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) g[i][j] = s.intersect(cls[i], cls[j]);
            k[i] = s.intersect(cls[i], s.canonical());
        }
        return ExceptionalConfig(curve_names, std::move(g), std::move(k));
    }

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::vector<Integer>>& gram() const { return gram_; }
    const std::vector<Integer>& canonical_degrees() const { return k_; }

    Integer component_pa(std::size_t i) const { return 1 + (gram_[i][i] + k_[i]) / 2; }

    bool connected() const {
        std::vector<bool> seen(size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < size(); ++j)
                if (!seen[j] && gram_[i][j] > 0) {
                    seen[j] = true;
                    stack.push_back(j);
                }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    }

    Integer pair(const std::vector<Integer>& a, const std::vector<Integer>& b) const {
        Integer s = 0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) s += a[i] * gram_[i][j] * b[j];
        return s;
    }
    Integer dot_unit(const std::vector<Integer>& z, std::size_t j) const {
        Integer s = 0;
        for (std::size_t i = 0; i < size(); ++i) s += z[i] * gram_[i][j];
        return s;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<Integer>> gram_;
    std::vector<Integer> k_;
};

/// Cycle = coefficient vector indexed like the configuration.
using Cycle = std::vector<Integer>;

struct DefinitenessResult {
    bool negative_definite = false;
    std::vector<Rational> pivots;  ///< LDL^T pivots computed before stopping
    Cycle witness;                 ///< v with v.Gv >= 0 when not negative definite
};

inline DefinitenessResult is_negative_definite(const ExceptionalConfig& cfg) {
    const std::size_t n = cfg.size();
    std::vector<std::vector<Rational>> L(n, std::vector<Rational>(n, 0));
    DefinitenessResult r;
    for (std::size_t j = 0; j < n; ++j) {
        L[j][j] = 1;
        Rational d = cfg.gram()[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j][k] * L[j][k] * r.pivots[k];
        r.pivots.push_back(d);
        if (d >= 0) {
            // w solves L^T w = e_j on the leading block; then w.Gw = d >= 0.
            std::vector<Rational> w(n, 0);
            w[j] = 1;
            for (std::size_t i = j; i-- > 0;) {
                Rational s = 0;
                for (std::size_t m = i + 1; m <= j; ++m) s += L[m][i] * w[m];
                w[i] = -s;
            }
            Integer den = 1;
            for (const auto& x : w) den = boost::multiprecision::lcm(den, Integer(denominator(x)));
            r.witness.resize(n);
            for (std::size_t i = 0; i < n; ++i) r.witness[i] = Integer(numerator(Rational(w[i] * den)));
            return r;
        }
        for (std::size_t i = j + 1; i < n; ++i) {
            Rational s = cfg.gram()[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k] * r.pivots[k];
            L[i][j] = s / d;
        }
    }
    r.negative_definite = true;
    return r;
}

/// A positive integer cycle Y with Y.E_i <= 0 for all i; bounds Z0 from above.
inline Cycle antinef_bound(const ExceptionalConfig& cfg) {
    const std::size_t n = cfg.size();
    // Solve G y = -1 exactly, then clear denominators.
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = cfg.gram()[i][j];
        a[i][n] = -1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw Error("singular intersection matrix");
        std::swap(a[p], a[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    std::vector<Rational> y(n);
    Integer den = 1;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = a[i][n] / a[i][i];
        den = boost::multiprecision::lcm(den, Integer(denominator(y[i])));
    }
    Cycle out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Integer(numerator(Rational(y[i] * den)));
    return out;
}

struct FundamentalCycleResult {
    Cycle cycle;
    std::size_t steps = 0;  ///< augmentation steps after the starting curve
};

/// Laufer's sequence: start at E_0, add E_j while Z.E_j > 0.
inline FundamentalCycleResult fundamental_cycle(const ExceptionalConfig& cfg) {
    if (!cfg.connected()) throw Error("configuration is not connected");
    if (!is_negative_definite(cfg).negative_definite) throw Error("configuration is not negative definite");
    Cycle bound = antinef_bound(cfg);
    Integer cap = std::accumulate(bound.begin(), bound.end(), Integer(0));
    FundamentalCycleResult r;
    r.cycle.assign(cfg.size(), 0);
    r.cycle[0] = 1;
    for (;;) {
        std::optional<std::size_t> next;
        for (std::size_t j = 0; j < cfg.size() && !next; ++j)
            if (cfg.dot_unit(r.cycle, j) > 0) next = j;
        if (!next) break;
        r.cycle[*next] += 1;
        if (++r.steps > cap) throw Error("Laufer sequence exceeded its termination bound");
    }
    return r;
}

inline Integer pa_cycle(const ExceptionalConfig& cfg, const Cycle& z) {
    if (z.size() != cfg.size()) throw Error("cycle does not match configuration");
    for (const auto& c : z)
        if (c < 0) throw Error("cycle coefficients must be nonnegative");
    Integer zk = 0;
    for (std::size_t i = 0; i < cfg.size(); ++i) zk += z[i] * cfg.canonical_degrees()[i];
    Integer twice = cfg.pair(z, z) + zk;
    if (twice % 2 != 0) throw ParityError("non-integral arithmetic genus of cycle");
    return 1 + twice / 2;
}

struct RationalDoublePoint {
    bool operator==(const RationalDoublePoint&) const = default;
};
struct RationalSingularity {
    Integer multiplicity;
    bool operator==(const RationalSingularity&) const = default;
};
struct NonRationalSingularity {
    Integer pa_lower_bound;
    bool operator==(const NonRationalSingularity&) const = default;
};
struct UnknownSingularity {
    std::string reason;
    bool operator==(const UnknownSingularity&) const = default;
};

using SingularityClass =
    std::variant<RationalDoublePoint, RationalSingularity, NonRationalSingularity, UnknownSingularity>;

inline std::string to_string(const SingularityClass& c) {
    struct V {
        std::string operator()(const RationalDoublePoint&) const { return "RDP"; }
        std::string operator()(const RationalSingularity& r) const { return "Rational(" + r.multiplicity.str() + ")"; }
        std::string operator()(const NonRationalSingularity& r) const {
            return "NonRational(" + r.pa_lower_bound.str() + ")";
        }
        std::string operator()(const UnknownSingularity&) const { return "Unknown"; }
    };
    return std::visit(V{}, c);
}

/// Largest p_a over nonzero cycles with coefficients <= bound, by brute force.
inline Integer max_subcycle_pa(const ExceptionalConfig& cfg, const Integer& bound) {
    const std::size_t n = cfg.size();
    Cycle y(n, 0);
    std::optional<Integer> best;
    for (;;) {
        std::size_t i = 0;
        while (i < n && y[i] == bound) y[i++] = 0;
        if (i == n) break;
        y[i] += 1;
        Integer p = pa_cycle(cfg, y);
        if (!best || p > *best) best = p;
    }
    return best.value_or(Integer(0));
}

inline SingularityClass classify_singularity(const ExceptionalConfig& cfg) {
    Cycle z = fundamental_cycle(cfg).cycle;
    Integer pa = pa_cycle(cfg, z);
    Integer z2 = cfg.pair(z, z);
    if (pa > 0) return NonRationalSingularity{pa};
    bool all_rational = true;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        if (cfg.component_pa(i) != 0) all_rational = false;
    if (!all_rational) {
        Integer top = *std::max_element(z.begin(), z.end());
        if (max_subcycle_pa(cfg, 2 * top) > 0)
            return UnknownSingularity{"a subcycle has positive arithmetic genus"};
    }
    if (z2 == -2) return RationalDoublePoint{};
    return RationalSingularity{-z2};
}

inline bool genus_budget_check(const Integer& q, const std::vector<Integer>& geometric_genera) {
    return std::accumulate(geometric_genera.begin(), geometric_genera.end(), Integer(0)) == q;
}

/// Dual graph text: `name self_int p_a` per curve, `name name mult` per edge,
/// blank lines and `#` comments ignored.
inline ExceptionalConfig parse_dual_graph(std::istream& in) {
    std::vector<std::string> names;
    std::vector<Integer> self, pa;
    std::vector<std::tuple<std::string, std::string, Integer, int>> raw_edges;
    std::map<std::string, std::size_t> index;
    std::string line;
    int lineno = 0;
    auto is_int = [](const std::string& s) {
        std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        return i < s.size() && std::all_of(s.begin() + i, s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() != 3) throw Error("line " + std::to_string(lineno) + ": expected three fields");
        if (!is_int(tok[2])) throw Error("line " + std::to_string(lineno) + ": third field must be an integer");
        if (is_int(tok[1])) {
            if (index.count(tok[0])) throw Error("line " + std::to_string(lineno) + ": duplicate curve " + tok[0]);
            index[tok[0]] = names.size();
            names.push_back(tok[0]);
            self.emplace_back(tok[1]);
            pa.emplace_back(tok[2]);
        } else {
            raw_edges.emplace_back(tok[0], tok[1], Integer(tok[2]), lineno);
        }
    }
    std::vector<std::tuple<std::size_t, std::size_t, Integer>> edges;
    for (const auto& [a, b, m, ln] : raw_edges) {
        if (!index.count(a) || !index.count(b))
            throw UnknownName("line " + std::to_string(ln) + ": edge names an undeclared curve");
        edges.emplace_back(index[a], index[b], m);
    }
    return ExceptionalConfig::from_graph(std::move(names), self, pa, edges);
}

}  // namespace divforge

#pragma once

// Property checks shared by the property suite and the acceptance binary.
// Each returns an empty string on success, otherwise a description of the
// first counterexample.

#include "divforge/divforge.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace propcheck {

using namespace divforge;
namespace fs = std::filesystem;

inline DivisorClass gen(const std::string& n, long c = 1) { return DivisorClass::generator(n, c); }

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<fs::path> corpus_scripts(const fs::path& dir = DIVFORGE_CORPUS_DIR) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".srf") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline SurfaceModel elliptic_base() {
    using E = CurveClassExpr;
    SurfaceModel s = SurfaceModel::ruled(1, 3, {"Q1", "Q2", "Q3", "a", "b"});
    s.add_torsion({"t", {{"a", 1}, {"b", -1}}, 2, true});
    s.set_bundle(-E::point("Q1") - E::point("Q2") - E::point("Q3") - E::point("a") + E::point("b"));
    s.add_curve({"C0", gen("C0"), {}, true, true});
    s.add_curve({"F1", gen("f[Q1]"), {}, true, true, true});
    return s;
}

inline DivisorClass random_class(const SurfaceModel& s, std::mt19937& rng) {
    std::uniform_int_distribution<int> coeff(-6, 6);
    DivisorClass d;
    for (const auto& r : s.generators()) d += gen(r.name, coeff(rng));
    return d;
}

/// Pulled-back classes keep their intersection numbers and meet the new
/// exceptional classes trivially.
inline std::string blowup_isometry(int samples, unsigned seed) {
    SurfaceModel base = elliptic_base();
    SurfaceModel up = base.blow_up({"x", {{"F1", 1}}, {}}).blow_up({"y", {}, "x"});
    std::mt19937 rng(seed);
    for (int k = 0; k < samples; ++k) {
        DivisorClass a = random_class(base, rng), b = random_class(base, rng);
        if (up.intersect(a, b) != base.intersect(a, b)) return "pairing changed for " + a.str() + " . " + b.str();
        if (up.intersect(a, gen("e[x]")) != 0 || up.intersect(a, gen("e[y]")) != 0)
            return "pullback meets an exceptional class: " + a.str();
    }
    return {};
}

// Smallest antinef cycle with all coefficients in 1..bound.
inline std::vector<long> brute_minimal(const std::vector<std::vector<long>>& gram, long bound) {
    const std::size_t n = gram.size();
    std::vector<long> y(n, 1), best;
    long best_sum = -1;
    for (;;) {
        bool antinef = true;
        for (std::size_t j = 0; j < n && antinef; ++j) {
            long v = 0;
            for (std::size_t i = 0; i < n; ++i) v += y[i] * gram[i][j];
            antinef = v <= 0;
        }
        long sum = 0;
        for (long c : y) sum += c;
        if (antinef && (best_sum < 0 || sum < best_sum)) best = y, best_sum = sum;
        std::size_t i = 0;
        while (i < n && y[i] == bound) y[i++] = 1;
        if (i == n) break;
        ++y[i];
    }
    return best;
}

// -G positive definite iff every leading minor of -G is positive.
inline bool sylvester_negative_definite(const std::vector<std::vector<long>>& gram) {
    const std::size_t n = gram.size();
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m[i][j] = -gram[i][j];
        Rational det = 1;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t p = c;
            while (p < k && m[p][c] == 0) ++p;
            if (p == k) return false;
            if (p != c) std::swap(m[p], m[c]), det = -det;
            det *= m[c][c];
            for (std::size_t r = c + 1; r < k; ++r) {
                Rational f = m[r][c] / m[c][c];
                for (std::size_t j = c; j < k; ++j) m[r][j] -= f * m[c][j];
            }
        }
        if (det <= 0) return false;
    }
    return true;
}

inline bool connected(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (auto [a, b] : edges) comp[find(a)] = find(b);
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != find(0)) return false;
    return true;
}

// No relabelling gives a lexicographically smaller matrix.
inline bool canonical_labelling(const std::vector<std::vector<long>>& gram) {
    const std::size_t n = gram.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    while (std::next_permutation(perm.begin(), perm.end())) {
        for (std::size_t i = 0; i < n * n; ++i) {
            long a = gram[perm[i / n]][perm[i % n]], b = gram[i / n][i % n];
            if (a < b) return false;
            if (a > b) break;
        }
    }
    return true;
}

struct CycleSweep {
    std::string failure;
    std::size_t configs = 0, definite = 0;
};

/// Every connected graph on up to max_n rational curves with self-intersection
/// in -4..-1 and simple intersections, up to relabelling.
inline CycleSweep fundamental_cycle_sweep(std::size_t max_n = 5) {
    CycleSweep out;
    for (std::size_t n = 1; n <= max_n; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) slots.emplace_back(i, j);
        std::size_t diag_cases = 1;
        for (std::size_t i = 0; i < n; ++i) diag_cases *= 4;
        for (unsigned mask = 0; mask < (1u << slots.size()); ++mask) {
            std::vector<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t k = 0; k < slots.size(); ++k)
                if (mask >> k & 1) edges.push_back(slots[k]);
            if (!connected(n, edges)) continue;
            for (std::size_t dc = 0; dc < diag_cases; ++dc) {
                std::vector<std::vector<long>> gram(n, std::vector<long>(n, 0));
                std::vector<Integer> self(n);
                std::size_t rest = dc;
                for (std::size_t i = 0; i < n; ++i, rest /= 4) self[i] = gram[i][i] = -1 - static_cast<long>(rest % 4);
                std::vector<std::tuple<std::size_t, std::size_t, Integer>> lib_edges;
                for (auto [a, b] : edges) gram[a][b] = gram[b][a] = 1, lib_edges.emplace_back(a, b, 1);
                if (!canonical_labelling(gram)) continue;
                std::vector<std::string> names;
                for (std::size_t i = 0; i < n; ++i) names.push_back("E" + std::to_string(i));
                ExceptionalConfig cfg = ExceptionalConfig::from_graph(names, self, std::vector<Integer>(n, 0), lib_edges);
                std::string where = "n=" + std::to_string(n) + " edges=" + std::to_string(mask) + " diag=" + std::to_string(dc);
                ++out.configs;
                bool nd = sylvester_negative_definite(gram);
                if (is_negative_definite(cfg).negative_definite != nd) return {"definiteness disagrees at " + where, out.configs, out.definite};
                if (!nd) continue;
                ++out.definite;
                Cycle z = fundamental_cycle(cfg).cycle;
                long top = 1;
                for (const auto& c : z) top = std::max(top, static_cast<long>(c));
                // any smaller antinef cycle lies below z, so this box is enough
                std::vector<long> best = brute_minimal(gram, top);
                for (std::size_t i = 0; i < n; ++i)
                    if (best.size() != n || z[i] != best[i]) return {"cycle differs from brute force at " + where, out.configs, out.definite};
            }
        }
    }
    return out;
}

/// h0 - h1 + h2 = chi(O) + D.(D - K)/2 wherever the ledger pins all three.
inline std::string ledger_rr_consistency(std::size_t* checked = nullptr) {
    std::size_t count = 0;
    for (const auto& p : corpus_scripts()) {
        dsl::Evaluator ev;
        ev.run(dsl::parse_script(slurp(p)), p.filename().string());
        auto models = ev.surfaces();
        for (const auto& [name, led] : ev.ledgers()) {
            const SurfaceModel& s = *models.at(name);
            for (const auto& [cls, h] : led->classes()) {
                const Interval& a = led->variables()[h[0]].value;
                const Interval& b = led->variables()[h[1]].value;
                const Interval& c = led->variables()[h[2]].value;
                if (!(a.exact() && b.exact() && c.exact())) continue;
                Integer expect = s.chi_structure() + s.intersect(cls, cls - s.canonical()) / 2;
                if (a.lo - b.lo + c.lo != expect)
                    return p.filename().string() + " " + name + ": chi mismatch for " + cls.str();
                ++count;
            }
            if (!led->rr_consistent(s)) return p.filename().string() + " " + name + ": ledger reports inconsistency";
        }
    }
    if (checked) *checked = count;
    return {};
}

inline SurfaceModel f4_towers(bool with_f) {
    using E = CurveClassExpr;
    SurfaceModel s = SurfaceModel::ruled(0, 4, {"P", "P1", "P2", "P3"});
    s.set_bundle(Integer(-4) * E::point("pt"));
    s.add_curve({"C0", gen("C0"), {}, true, true, true});
    s.add_curve({"F", gen("f[P]"), {}, true, true, true});
    for (int i = 1; i <= 3; ++i) s.add_curve({"F" + std::to_string(i), gen("f[P" + std::to_string(i) + "]"), {}, true, true, true});
    std::vector<std::string> fibers{"F1", "F2", "F3"};
    if (with_f) fibers.push_back("F");
    for (const auto& f : fibers)
        for (int j = 1; j <= 2; ++j) {
            std::string t = f.substr(1) + std::to_string(j);
            s = s.blow_up({"x" + t, {{f, 1}}, {}});
            s = s.blow_up({"y" + t, {{f, 1}}, "x" + t});
            s = s.blow_up({"z" + t, {}, "y" + t});
        }
    return s;
}

/// Peeling -K and -2K on the F4 tower models gives the same split for every
/// ordering of the candidates.
inline std::string peel_order_independence(int permutations, unsigned seed) {
    struct Case {
        SurfaceModel s;
        DivisorClass m;
    };
    SurfaceModel y = f4_towers(false), x = f4_towers(true);
    std::vector<Case> cases{{y, -y.canonical()}, {y, Integer(-2) * y.canonical()}, {x, Integer(-2) * x.canonical()}};
    std::mt19937 rng(seed);
    for (const auto& c : cases) {
        std::vector<std::string> cands;
        for (const auto& r : c.s.curves()) cands.push_back(r.name);
        PeelResult ref = fixed_part_peel(c.s, c.m, cands);
        for (int k = 0; k < permutations; ++k) {
            std::shuffle(cands.begin(), cands.end(), rng);
            PeelResult r = fixed_part_peel(c.s, c.m, cands);
            if (r.fixed != ref.fixed || r.mobile != ref.mobile || r.multiplicities != ref.multiplicities)
                return "peel of " + c.m.str() + " depends on candidate order";
        }
    }
    return {};
}

}  // namespace propcheck

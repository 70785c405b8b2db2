#pragma once

#include "divforge/integer.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

namespace divforge {

/// Compares names with embedded numbers numerically: x2 < x10.
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            std::string na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
            nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

/// Display order for class generators: l, C0, fibers, exceptionals, tags.
inline bool generator_display_less(const std::string& a, const std::string& b) {
    auto rank = [](const std::string& n) {
        if (n == "l") return 0;
        if (n == "C0") return 1;
        if (n.rfind("f", 0) == 0) return 2;
        if (n.rfind("e[", 0) == 0) return 3;
        return 4;
    };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    return natural_less(a, b);
}

/// Renders an integer linear combination as "2*a - b + c"; "0" when empty.
inline std::string format_combination(const std::vector<std::pair<std::string, Integer>>& terms) {
    std::string out;
    for (const auto& [name, c] : terms) {
        if (c == 0) continue;
        Integer mag = c < 0 ? Integer(-c) : c;
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (mag != 1) out += mag.str() + "*";
        out += name;
    }
    return out.empty() ? "0" : out;
}

}  // namespace divforge

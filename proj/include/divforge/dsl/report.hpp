#pragma once

#include "divforge/dsl/evaluator.hpp"

#include <sstream>
#include <string>

namespace divforge::dsl {

inline Json report_json(const Report& r) {
    Json results = Json::array();
    for (const auto& s : r.results) {
        results.push_back(Json{{"stmt", s.stmt},
                               {"line", s.line},
                               {"kind", s.kind},
                               {"source", s.source},
                               {"value", s.value},
                               {"status", to_string(s.status)},
                               {"trace", s.trace}});
    }
    return Json{{"script", r.script},
                {"engine", r.engine},
                {"results", results},
                {"summary", Json{{"pass", r.pass}, {"fail", r.fail}}}};
}

inline std::string emit_json(const Report& r) { return report_json(r).dump(2) + "\n"; }

inline std::string emit_text(const Report& r) {
    std::ostringstream out;
    out << "script " << r.script << " (" << r.engine << ")\n";
    for (const auto& s : r.results) {
        out << "[" << s.stmt << "] line " << s.line << " " << to_string(s.status) << "  " << s.source << "\n";
        out << "    -> " << s.value.dump() << "\n";
        for (const auto& t : s.trace) out << "       | " << t << "\n";
    }
    out << "summary: " << r.pass << " passed, " << r.fail << " failed";
    if (r.errors) out << ", " << r.errors << " errored";
    out << "\n";
    return out.str();
}

}  // namespace divforge::dsl

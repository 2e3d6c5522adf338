#pragma once

#include <string>

#include "json.hpp"

#include "btj/convergence.hpp"
#include "btj/field.hpp"
#include "btj/jorgensen.hpp"
#include "btj/literal.hpp"
#include "btj/matrix.hpp"
#include "btj/tree.hpp"

namespace btj {

// Stable key order keeps CLI output byte-for-byte deterministic.
using json = nlohmann::ordered_json;

inline json valuation_json(const Valuation& v) {
    return json{{"tag", v.exact ? "exact" : "at_least"}, {"n", v.n}};
}

inline json element_json(const Element& x) { return serialize_element(x); }

inline json matrix_json(const Mat2& m) {
    return json::array({json::array({element_json(m.a()), element_json(m.b())}),
                        json::array({element_json(m.c()), element_json(m.d())})});
}

inline Mat2 matrix_from_json(const Field& f, const json& j,
                             std::optional<long long> n = std::nullopt) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
        !j[1].is_array() || j[1].size() != 2)
        throw ParseError("matrix literal must be a 2x2 array of element strings", 0);
    auto entry = [&](int r, int c) {
        const json& cell = j[static_cast<size_t>(r)][static_cast<size_t>(c)];
        if (!cell.is_string())
            throw ParseError("matrix entries must be element literal strings", 0);
        return parse_element(f, cell.get<std::string>(), n);
    };
    return Mat2(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
}

inline Mat2 matrix_from_string(const Field& f, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("bad matrix literal '" + text + "': " + e.what(),
                         static_cast<size_t>(e.byte));
    }
    return matrix_from_json(f, j);
}

inline json end_json(const End& e) {
    if (e.infinity) return "inf";
    return element_json(e.c);
}

inline End end_from_string(const Field& f, const std::string& s) {
    if (s == "inf") return End::inf(f);
    return End::finite(parse_element(f, s));
}

inline json vertex_json(const Vertex& v) {
    return json{{"level", v.level()}, {"offset", element_json(v.offset())}};
}

inline Vertex vertex_from_json(const Field& f, const json& j) {
    if (!j.is_object() || !j.contains("level") || !j.contains("offset"))
        throw ParseError("vertex literal must be {\"level\": m, \"offset\": \"...\"}", 0);
    return Vertex::make(f, j["level"].get<long long>(),
                        parse_element(f, j["offset"].get<std::string>()));
}

inline json lhs_json(const JorgensenLhs& l) {
    return json{{"trace_sq_minus_4", valuation_json(l.trace_sq_minus_4)},
                {"comm_trace_minus_2", valuation_json(l.comm_trace_minus_2)},
                {"min", valuation_json(l.min)}};
}

inline json common_end_json(const CommonEnd& ce) {
    json j;
    switch (ce.kind) {
        case CommonEnd::Kind::none: j["kind"] = "none"; break;
        case CommonEnd::Kind::some: j["kind"] = "some"; break;
        case CommonEnd::Kind::indeterminate: j["kind"] = "indeterminate"; break;
    }
    if (ce.kind == CommonEnd::Kind::some) j["end"] = end_json(ce.end);
    j["exact"] = ce.exact;
    return j;
}

inline json equality_case_json(const EqualityCase& eq) {
    json j;
    switch (eq.kind) {
        case EqualityCase::Kind::verified: j["kind"] = "verified"; break;
        case EqualityCase::Kind::refuted: j["kind"] = "refuted"; break;
        case EqualityCase::Kind::indeterminate: j["kind"] = "indeterminate"; break;
    }
    j["reason"] = eq.reason;
    if (eq.suggested_radius > 0) j["suggested_radius"] = eq.suggested_radius;
    return j;
}

inline json report_json(const JorgensenReport& rep, const Mat2& A, const Mat2& B) {
    json j;
    j["field"] = rep.field.to_string();
    j["precision"] = rep.field.precision;
    j["inputs"] = json{{"A", matrix_json(A)}, {"B", matrix_json(B)}};
    j["lhs"] = lhs_json(rep.lhs);
    j["M_K"] = rep.M_K;
    j["common_end"] = common_end_json(rep.common_end);
    j["verdict"] = to_string(rep.verdict);
    if (rep.sharp != Sharpness::not_applicable || rep.equality.has_value())
        j["sharp"] = to_string(rep.sharp);
    if (rep.equality) j["equality_case"] = equality_case_json(*rep.equality);
    j["caveats"] = rep.caveats;
    return j;
}

inline json order_json(const OrderResult& o) {
    json j;
    switch (o.kind) {
        case OrderResult::Kind::finite:
            j["kind"] = "finite";
            j["order"] = o.order;
            j["verified_precision"] = o.verified_precision;
            break;
        case OrderResult::Kind::infinite: j["kind"] = "infinite"; break;
        case OrderResult::Kind::indeterminate: j["kind"] = "indeterminate"; break;
    }
    if (!o.note.empty()) j["note"] = o.note;
    return j;
}

inline json catalog_json(const TraceCatalog& cat) {
    json arr = json::array();
    for (const auto& e : cat.entries) {
        json entry;
        entry["order"] = e.order;
        entry["trace"] = element_json(e.trace);
        entry["trace_is_two"] = e.trace_is_two;
        if (!e.trace_is_two) entry["v_trace_minus_2"] = e.v_t_minus_2;
        arr.push_back(entry);
    }
    return arr;
}

inline json class_json(const ElementClass& c) {
    json j;
    j["type"] = c.hyperbolic ? "hyperbolic" : "elliptic";
    j["translation_length"] = c.length;
    j["trace_valuation"] = valuation_json(c.trace_val);
    return j;
}

inline json fixed_ends_json(const FixedEnds& fe) {
    json j;
    switch (fe.kind) {
        case FixedEnds::Kind::none: j["kind"] = "none"; break;
        case FixedEnds::Kind::one: j["kind"] = "one"; break;
        case FixedEnds::Kind::two: j["kind"] = "two"; break;
        case FixedEnds::Kind::all: j["kind"] = "all"; break;
        case FixedEnds::Kind::indeterminate: j["kind"] = "indeterminate"; break;
    }
    json ends = json::array();
    for (const End& e : fe.ends()) ends.push_back(end_json(e));
    if (!ends.empty()) j["ends"] = ends;
    j["exact"] = fe.exact;
    return j;
}

inline MatrixSequence sequence_from_json(const Field& f, const json& j) {
    if (!j.is_object() || !j.contains("entries") || !j.contains("limit"))
        throw ParseError("sequence literal must contain \"entries\" and \"limit\"", 0);
    auto grab = [&](const json& m) -> std::array<std::string, 4> {
        if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
            throw ParseError("sequence matrices must be 2x2 arrays of strings", 0);
        return {m[0][0].get<std::string>(), m[0][1].get<std::string>(),
                m[1][0].get<std::string>(), m[1][1].get<std::string>()};
    };
    return MatrixSequence(f, grab(j["entries"]), grab(j["limit"]));
}

inline json sequence_json(const MatrixSequence& s) {
    auto g = s.generator_texts();
    auto l = s.limit_texts();
    return json{{"entries", json::array({json::array({g[0], g[1]}),
                                         json::array({g[2], g[3]})})},
                {"limit", json::array({json::array({l[0], l[1]}),
                                       json::array({l[2], l[3]})})}};
}

inline json probe_json(const PowerProbe& p) {
    json j;
    j["exponents"] = p.exponents;
    json mins = json::array();
    for (const auto& v : p.min_entry_valuation) mins.push_back(valuation_json(v));
    j["min_entry_valuation"] = mins;
    json entries = json::array();
    for (const auto& evs : p.entry_valuations)
        entries.push_back(json::array({valuation_json(evs[0]), valuation_json(evs[1]),
                                       valuation_json(evs[2]), valuation_json(evs[3])}));
    j["entry_valuations"] = entries;
    j["strictly_increasing"] = p.strictly_increasing;
    if (!p.note.empty()) j["note"] = p.note;
    return j;
}

inline json examples_json(const ExampleSuiteReport& rep) {
    json j;
    j["field"] = rep.field.to_string();
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json cj;
        cj["name"] = c.name;
        cj["status"] = c.status == CheckResult::Status::pass        ? "pass"
                       : c.status == CheckResult::Status::fail      ? "fail"
                                                                    : "indeterminate";
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    if (rep.discreteness_discrepancy_flag) {
        j["discreteness_discrepancy"] = true;
        j["discrepancy_note"] = rep.discrepancy_note;
    }
    j["verdict"] = rep.all_pass() ? "all-pass" : "failures-present";
    return j;
}

} // namespace btj

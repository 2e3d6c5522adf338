#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "btj/json_io.hpp"

namespace btj::cli {

/*
 * btj <command> [options] [inputs]
 *
 * Exit codes: 0 definite result, 1 input error, 2 indeterminate (precision);
 * scripts retry indeterminate runs with --precision doubled.
 */

struct Options {
    std::string field_spec;
    int precision = 0; // 0: take BTJ_PRECISION or 64
    int radius = 8;
    int word_length = 4;
    bool json_out = false;
    std::string input_file;
    long long range_lo = 1, range_hi = 12;
    std::string exponents = "";
    std::string vertex_text;
    std::vector<std::string> literals;

    Field field() const {
        int prec = precision;
        if (prec == 0) {
            if (const char* env = std::getenv("BTJ_PRECISION")) prec = std::atoi(env);
            if (prec == 0) prec = 64;
        }
        if (prec < 8) throw ParseError("precision must be at least 8", 0);
        if (prec > (1 << 20)) throw ParseError("precision is unreasonably large", 0);
        return parse_field(field_spec, prec);
    }
};

namespace detail_cli {

inline json load_input(const Options& opt) {
    std::ifstream in(opt.input_file);
    if (!in) throw ParseError("cannot open input file '" + opt.input_file + "'", 0);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("bad JSON in '" + opt.input_file + "': " + e.what(),
                         static_cast<size_t>(e.byte));
    }
}

inline Mat2 nth_matrix(const Field& f, const Options& opt, size_t i,
                       const std::string& role) {
    if (opt.input_file.empty()) {
        if (i >= opt.literals.size())
            throw ParseError("missing matrix literal for " + role, 0);
        return matrix_from_string(f, opt.literals[i]);
    }
    json j = load_input(opt);
    if (j.is_array()) return matrix_from_json(f, j);
    if (!j.contains(role)) throw ParseError("input file has no entry \"" + role + "\"", 0);
    return matrix_from_json(f, j[role]);
}

inline std::vector<long long> parse_exponents(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoll(tok));
    }
    if (out.empty()) throw ParseError("no exponents given", 0);
    return out;
}

inline void emit(std::ostream& out, const Options& opt, const json& j,
                 const std::function<void(std::ostream&)>& text) {
    if (opt.json_out) {
        out << j.dump(2) << "\n";
    } else {
        text(out);
    }
}

} // namespace detail_cli

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using detail_cli::emit;
    CLI::App app{"SL2 over Q_p and F_p((t)): Bruhat-Tits tree geometry, the "
                 "valuation form of the Jorgensen inequality, discreteness "
                 "certificates, and convergence probes"};
    app.require_subcommand(1);

    Options opt;
    int exit_code = 0;
    std::function<void()> action;

    auto add_common = [&](CLI::App* sub, bool needs_field = true) {
        auto* f = sub->add_option("--field", opt.field_spec,
                                  "field spec, e.g. padic:7 or laurent:5");
        if (needs_field) f->required();
        sub->add_option("--precision", opt.precision,
                        "significant digits (>= 8; default BTJ_PRECISION or 64)");
        sub->add_option("--radius", opt.radius, "search radius (>= 2)")
            ->check(CLI::Range(2, 1 << 20));
        sub->add_flag("--json", opt.json_out, "emit a JSON report");
        sub->add_option("--input", opt.input_file, "read inputs from a JSON file");
    };

    // ---- classify ----
    {
        auto* sub = app.add_subcommand("classify", "elliptic/hyperbolic type of a matrix");
        add_common(sub);
        sub->allow_extras(); // positional matrix literals pass through verbatim
        sub->callback([&, sub]() {
            action = [&, sub]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                Mat2 A = detail_cli::nth_matrix(f, opt, 0, "A");
                ElementClass c = classify(A);
                OrderResult ord = finite_order(A, f);
                FixedEnds fe = fixed_ends(A);
                json j;
                j["field"] = f.to_string();
                j["class"] = class_json(c);
                j["order"] = order_json(ord);
                j["fixed_ends"] = fixed_ends_json(fe);
                j["verdict"] = c.hyperbolic ? "hyperbolic" : "elliptic";
                emit(out, opt, j, [&](std::ostream& os) {
                    os << c.to_string() << ", trace " << c.trace_val.to_string() << "\n";
                    os << "order: " << order_json(ord).dump() << "\n";
                    os << "fixed ends: " << fixed_ends_json(fe).dump() << "\n";
                });
                if (ord.kind == OrderResult::Kind::indeterminate ||
                    fe.kind == FixedEnds::Kind::indeterminate)
                    exit_code = 2;
            };
        });
    }

    // ---- jorgensen / sharp ----
    for (bool sharp_mode : {false, true}) {
        auto* sub = app.add_subcommand(sharp_mode ? "sharp" : "jorgensen",
                                       sharp_mode
                                           ? "threshold-0 test with equality analysis"
                                           : "valuation inequality test and certificate");
        add_common(sub);
        sub->allow_extras();
        sub->callback([&, sub, sharp_mode]() {
            action = [&, sub, sharp_mode]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                Mat2 A = detail_cli::nth_matrix(f, opt, 0, "A");
                Mat2 B = detail_cli::nth_matrix(f, opt, 1, "B");
                JorgensenReport rep =
                    sharp_mode ? sharp_test(A, B, opt.radius) : jorgensen_test(A, B);
                json j = report_json(rep, A, B);
                emit(out, opt, j, [&](std::ostream& os) {
                    os << "v(tr^2 A - 4) " << rep.lhs.trace_sq_minus_4.to_string() << "\n";
                    os << "v(tr[A,B] - 2) " << rep.lhs.comm_trace_minus_2.to_string()
                       << "\n";
                    os << "min " << rep.lhs.min.to_string() << ", M_K = " << rep.M_K
                       << "\n";
                    if (sharp_mode) os << "sharp: " << to_string(rep.sharp) << "\n";
                    if (rep.equality)
                        os << "equality case: " << equality_case_json(*rep.equality).dump()
                           << "\n";
                    for (const auto& c : rep.caveats) os << "caveat: " << c << "\n";
                    os << "verdict: " << to_string(rep.verdict) << "\n";
                });
                if (rep.verdict == Verdict::indeterminate) exit_code = 2;
            };
        });
    }

    // ---- certify ----
    {
        auto* sub = app.add_subcommand(
            "certify", "non-elementarity certificate and elementary evidence");
        add_common(sub);
        sub->add_option("--word-length", opt.word_length, "word length bound")
            ->check(CLI::Range(1, 8));
        sub->allow_extras();
        sub->callback([&, sub]() {
            action = [&, sub]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                std::vector<Mat2> gens;
                for (size_t i = 0; i < std::max<size_t>(opt.literals.size(), 1); ++i)
                    gens.push_back(detail_cli::nth_matrix(f, opt, i, "A"));
                NonElementaryCertificate cert =
                    nonelementary_certificate(gens, opt.word_length);
                json j;
                j["field"] = f.to_string();
                j["certified_nonelementary"] = cert.certified;
                if (cert.certified) {
                    j["witness_words"] = json::array({cert.word1, cert.word2});
                }
                if (gens.size() == 2) {
                    ElementaryEvidence ev = elementary_evidence(gens[0], gens[1], opt.radius);
                    json e;
                    e["common_fixed_vertex"] = ev.common_fixed_vertex;
                    if (ev.vertex) e["vertex"] = vertex_json(*ev.vertex);
                    e["common_fixed_end"] = ev.common_fixed_end;
                    if (ev.end) e["end"] = end_json(*ev.end);
                    e["stabilized_end_pair"] = ev.stabilized_end_pair;
                    e["notes"] = ev.notes;
                    j["elementary_evidence"] = e;
                }
                j["verdict"] = cert.certified ? "nonelementary" : "inconclusive";
                emit(out, opt, j, [&](std::ostream& os) {
                    os << (cert.certified
                               ? "non-elementary: witnesses " + cert.word1 + " , " +
                                     cert.word2
                               : "inconclusive at word length " +
                                     std::to_string(opt.word_length))
                       << "\n";
                });
            };
        });
    }

    // ---- tree ----
    {
        auto* sub = app.add_subcommand("tree", "displacement, fixed ends, axis data");
        add_common(sub);
        sub->add_option("--vertex", opt.vertex_text,
                        "vertex literal {\"level\":m,\"offset\":\"...\"}");
        sub->allow_extras();
        sub->callback([&, sub]() {
            action = [&, sub]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                Mat2 g = detail_cli::nth_matrix(f, opt, 0, "A");
                Vertex v = opt.vertex_text.empty()
                               ? Vertex::base(f)
                               : vertex_from_json(f, json::parse(opt.vertex_text));
                json j;
                j["field"] = f.to_string();
                j["class"] = class_json(classify(g));
                j["vertex"] = vertex_json(v);
                j["displacement"] = displacement(g, v);
                j["fixes_vertex"] = fixes_vertex(g, v);
                j["fixed_ends"] = fixed_ends_json(fixed_ends(g));
                if (classify(g).hyperbolic) {
                    Axis ax = hyperbolic_axis(g);
                    j["axis"] = json{{"attracting", end_json(ax.attracting)},
                                     {"repelling", end_json(ax.repelling)},
                                     {"base_point", vertex_json(ax.base_point)},
                                     {"length", ax.length}};
                }
                j["verdict"] = "ok";
                emit(out, opt, j, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
            };
        });
    }

    // ---- mk ----
    {
        auto* sub = app.add_subcommand("mk", "the sharp constant M_K and its catalog");
        add_common(sub);
        sub->callback([&]() {
            action = [&]() {
                Field f = opt.field();
                TraceCatalog cat = finite_order_traces(f);
                json j;
                j["field"] = f.to_string();
                j["M_K"] = cat.max_v_t_minus_2();
                j["orders"] = candidate_orders(f);
                j["catalog"] = catalog_json(cat);
                j["verdict"] = "ok";
                emit(out, opt, j, [&](std::ostream& os) {
                    os << "M_K = " << cat.max_v_t_minus_2() << "\n";
                });
            };
        });
    }

    // ---- order ----
    {
        auto* sub = app.add_subcommand("order", "finite-order detection for a matrix");
        add_common(sub);
        sub->allow_extras();
        sub->callback([&, sub]() {
            action = [&, sub]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                Mat2 A = detail_cli::nth_matrix(f, opt, 0, "A");
                OrderResult ord = finite_order(A, f);
                json j;
                j["field"] = f.to_string();
                j["order"] = order_json(ord);
                j["candidate_orders"] = candidate_orders(f);
                j["verdict"] = ord.kind == OrderResult::Kind::finite      ? "finite"
                               : ord.kind == OrderResult::Kind::infinite  ? "infinite"
                                                                          : "indeterminate";
                emit(out, opt, j, [&](std::ostream& os) {
                    os << order_json(ord).dump() << "\n";
                });
                if (ord.kind == OrderResult::Kind::indeterminate) exit_code = 2;
            };
        });
    }

    // ---- examples ----
    {
        auto* sub = app.add_subcommand("examples", "run the worked-example suite");
        add_common(sub);
        sub->callback([&]() {
            action = [&]() {
                Field f = opt.field();
                ExampleSuiteReport rep = run_worked_examples(f);
                json j = examples_json(rep);
                emit(out, opt, j, [&](std::ostream& os) {
                    for (const auto& c : rep.checks)
                        os << (c.status == CheckResult::Status::pass ? "pass" : "FAIL")
                           << "  " << c.name
                           << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
                    if (rep.discreteness_discrepancy_flag)
                        os << "flag: " << rep.discrepancy_note << "\n";
                    os << (rep.all_pass() ? "all checks passed" : "failures present")
                       << "\n";
                });
                if (rep.any_indeterminate()) exit_code = 2;
            };
        });
    }

    // ---- converge ----
    {
        auto* sub = app.add_subcommand(
            "converge", "tail classification / trace / common-end reports for sequences");
        add_common(sub);
        sub->add_option("--range", opt.range_lo, "first index")->expected(1);
        sub->add_option("--range-hi", opt.range_hi, "last index");
        sub->callback([&]() {
            action = [&]() {
                Field f = opt.field();
                json in = detail_cli::load_input(opt);
                json j;
                j["field"] = f.to_string();
                if (in.contains("A") && in.contains("B")) {
                    MatrixSequence sa = sequence_from_json(f, in["A"]);
                    MatrixSequence sb = sequence_from_json(f, in["B"]);
                    CommonEndTail tail = common_end_tail(sa, sb, opt.range_lo, opt.range_hi);
                    json t;
                    t["precondition_ok"] = tail.precondition_ok;
                    json per = json::array();
                    for (const auto& [n, kind] : tail.per_index)
                        per.push_back(json{{"n", n},
                                           {"common_end",
                                            kind == CommonEnd::Kind::some   ? "some"
                                            : kind == CommonEnd::Kind::none ? "none"
                                                                            : "indeterminate"}});
                    t["per_index"] = per;
                    t["tail_has_common_end"] = tail.tail_has_common_end;
                    t["limit_fixes_axis_end"] = tail.limit_fixes_axis_end;
                    if (!tail.note.empty()) t["note"] = tail.note;
                    j["common_end_tail"] = t;
                } else {
                    MatrixSequence s = sequence_from_json(f, in);
                    j["sequence"] = sequence_json(s);
                    TailClassification tc = tail_classification(s, opt.range_lo, opt.range_hi);
                    json cls;
                    cls["limit"] = class_json(tc.limit_class);
                    json terms = json::array();
                    for (const auto& [n, c] : tc.terms)
                        terms.push_back(json{{"n", n}, {"class", class_json(c)}});
                    cls["terms"] = terms;
                    cls["settles_at"] = tc.settles_at;
                    cls["note"] = tc.note;
                    j["tail_classification"] = cls;
                    TraceTail tt = trace_tail(s, opt.range_lo, opt.range_hi);
                    json tr;
                    json traces = json::array();
                    for (size_t i = 0; i < tt.indices.size(); ++i)
                        traces.push_back(json{{"n", tt.indices[i]},
                                              {"trace", element_json(tt.traces[i])},
                                              {"order", order_json(tt.orders[i])}});
                    tr["per_index"] = traces;
                    tr["eventually_constant"] = tt.eventually_constant;
                    tr["notes"] = tt.notes;
                    j["trace_tail"] = tr;
                }
                j["verdict"] = "ok";
                emit(out, opt, j, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
            };
        });
    }

    // ---- probe ----
    {
        auto* sub = app.add_subcommand("probe", "powers of g against the identity");
        add_common(sub);
        sub->add_option("--exponents", opt.exponents, "comma-separated exponent list")
            ->required();
        sub->allow_extras();
        sub->callback([&, sub]() {
            action = [&, sub]() {
                opt.literals = sub->remaining();
                Field f = opt.field();
                Mat2 g = detail_cli::nth_matrix(f, opt, 0, "A");
                PowerProbe probe =
                    power_convergence_probe(g, detail_cli::parse_exponents(opt.exponents));
                json j;
                j["field"] = f.to_string();
                j["probe"] = probe_json(probe);
                j["verdict"] = probe.strictly_increasing ? "converging-tail" : "no-trend";
                emit(out, opt, j, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
            };
        });
    }

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
        if (action) action();
        return exit_code;
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return 1;
    } catch (const PrecisionExhausted& e) {
        err << "indeterminate: " << e.what() << " (retry with a larger --precision)\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

} // namespace btj::cli

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btj/field.hpp"
#include "btj/finite_order.hpp"
#include "btj/matrix.hpp"
#include "btj/tree.hpp"

namespace btj {

/*
 * The valuation inequality for two-generator subgroups of SL2(K):
 * a discrete group <A, B> fixing no end of the tree satisfies
 *
 *     min{ v(tr^2 A - 4), v(tr [A,B] - 2) }  <=  M_K,
 *
 * so a pair violating the bound with provably no common fixed end cannot
 * generate a discrete group. Certificates are emitted only from exact
 * comparisons: a bound that merely straddles the threshold yields
 * Indeterminate, never a verdict.
 */

struct JorgensenLhs {
    Valuation trace_sq_minus_4;
    Valuation comm_trace_minus_2;
    Valuation min;
};

inline JorgensenLhs jorgensen_lhs(const Mat2& A, const Mat2& B) {
    const Field& f = A.field();
    Element t = A.trace();
    Element four = Element::from_int(f, 4);
    Element two = Element::from_int(f, 2);
    JorgensenLhs r;
    r.trace_sq_minus_4 = (t * t - four).valuation();
    r.comm_trace_minus_2 = (commutator(A, B).trace() - two).valuation();
    r.min = vmin(r.trace_sq_minus_4, r.comm_trace_minus_2);
    return r;
}

enum class Verdict { inequality_holds, not_discrete_certificate, fixed_end_detected,
                     indeterminate };

enum class Sharpness { not_applicable, strict, equality };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::inequality_holds: return "InequalityHolds";
        case Verdict::not_discrete_certificate: return "NotDiscreteCertificate";
        case Verdict::fixed_end_detected: return "FixedEndDetected";
        case Verdict::indeterminate: return "Indeterminate";
    }
    return "?";
}

inline std::string to_string(Sharpness s) {
    switch (s) {
        case Sharpness::not_applicable: return "not-applicable";
        case Sharpness::strict: return "strict";
        case Sharpness::equality: return "equality";
    }
    return "?";
}

struct EqualityCase {
    enum class Kind { verified, refuted, indeterminate };
    Kind kind = Kind::indeterminate;
    std::string reason;
    int suggested_radius = 0;
};

struct JorgensenReport {
    Field field;
    JorgensenLhs lhs;
    long long M_K = 0;
    CommonEnd common_end;
    Verdict verdict = Verdict::indeterminate;
    Sharpness sharp = Sharpness::not_applicable;
    std::optional<EqualityCase> equality;
    std::vector<std::string> caveats;
};

inline JorgensenReport jorgensen_test(const Mat2& A, const Mat2& B) {
    const Field& f = A.field();
    JorgensenReport rep;
    rep.field = f;
    rep.lhs = jorgensen_lhs(A, B);
    rep.M_K = compute_M_K(f);
    rep.common_end = common_fixed_end(A, B);

    if (rep.lhs.min.definitely_greater(rep.M_K)) {
        switch (rep.common_end.kind) {
            case CommonEnd::Kind::some:
                rep.verdict = Verdict::fixed_end_detected;
                if (!rep.common_end.exact)
                    rep.caveats.push_back("common end equality holds at precision " +
                                          std::to_string(rep.common_end.agreement_bound));
                break;
            case CommonEnd::Kind::none:
                if (rep.common_end.exact) {
                    rep.verdict = Verdict::not_discrete_certificate;
                } else {
                    rep.verdict = Verdict::indeterminate;
                    rep.caveats.push_back(
                        "no common end found, but the comparison was not exact");
                }
                break;
            case CommonEnd::Kind::indeterminate:
                rep.verdict = Verdict::indeterminate;
                rep.caveats.push_back("fixed-end computation was indeterminate");
                break;
        }
    } else if (rep.lhs.min.definitely_leq(rep.M_K)) {
        rep.verdict = Verdict::inequality_holds;
        if (rep.common_end.kind == CommonEnd::Kind::some)
            rep.caveats.push_back("a common fixed end exists as well");
    } else {
        rep.verdict = Verdict::indeterminate;
        rep.caveats.push_back("left side only bounded near the threshold M_K = " +
                              std::to_string(rep.M_K));
    }
    return rep;
}

// Full characterization of the boundary case min = 0: A elliptic of finite
// order, B hyperbolic, and Fix(A) meets Ax(B) in a path of exactly l(B)
// edges.
inline EqualityCase equality_case_check(const Mat2& A, const Mat2& B, int radius) {
    EqualityCase res;
    ElementClass clsA = classify(A);
    if (clsA.hyperbolic) {
        res.kind = EqualityCase::Kind::refuted;
        res.reason = "A is hyperbolic";
        return res;
    }
    const Field& f = A.field();
    if (agrees(A, Mat2::identity(f)) || agrees(A, -Mat2::identity(f))) {
        res.kind = EqualityCase::Kind::refuted;
        res.reason = "A is central: its fixed set is the whole tree, not a finite path";
        return res;
    }
    OrderResult ord = finite_order(A, f);
    if (ord.kind == OrderResult::Kind::infinite) {
        res.kind = EqualityCase::Kind::refuted;
        res.reason = "A is elliptic of infinite order";
        return res;
    }
    if (ord.kind == OrderResult::Kind::indeterminate) {
        res.kind = EqualityCase::Kind::indeterminate;
        res.reason = "order of A undecided: " + ord.note;
        return res;
    }
    ElementClass clsB = classify(B);
    if (!clsB.hyperbolic) {
        res.kind = EqualityCase::Kind::refuted;
        res.reason = "B is not hyperbolic";
        return res;
    }
    AxisOverlap ov = fixed_overlap_on_axis(A, B, radius);
    switch (ov.kind) {
        case AxisOverlap::Kind::exceeds_radius:
            res.kind = EqualityCase::Kind::indeterminate;
            res.reason = "fixed set reaches the enumeration boundary";
            res.suggested_radius = 2 * radius;
            return res;
        case AxisOverlap::Kind::empty:
            res.kind = EqualityCase::Kind::refuted;
            res.reason = "Fix(A) misses Ax(B) within radius " + std::to_string(radius);
            return res;
        case AxisOverlap::Kind::segment:
            if (ov.edge_length == clsB.length) {
                res.kind = EqualityCase::Kind::verified;
                res.reason = "overlap of length " + std::to_string(ov.edge_length) +
                             " equals l(B)";
            } else {
                res.kind = EqualityCase::Kind::refuted;
                res.reason = "overlap length " + std::to_string(ov.edge_length) +
                             " differs from l(B) = " + std::to_string(clsB.length);
            }
            return res;
    }
    return res;
}

// Sharp form of the test over Q_p (or over F_p((t)) under the caller's
// promise that the group has no order-p elements): threshold 0, with the
// equality-case geometry checked when the minimum lands exactly on 0.
inline JorgensenReport sharp_test(const Mat2& A, const Mat2& B, int radius = 8) {
    JorgensenReport rep = jorgensen_test(A, B);
    if (rep.field.kind == FieldKind::laurent)
        rep.caveats.push_back(
            "sharp threshold assumes the group contains no elements of order p; "
            "this is recorded, not verified");
    if (rep.lhs.min.definitely_leq(-1)) {
        rep.sharp = Sharpness::strict;
    } else if (rep.lhs.min.exact && rep.lhs.min.n == 0) {
        rep.sharp = Sharpness::equality;
        rep.equality = equality_case_check(A, B, radius);
    } else {
        rep.sharp = Sharpness::not_applicable; // min > 0: the sharp bound is violated
    }
    return rep;
}

// Grid search for a pair realizing equality in the sharp bound: A runs over
// conjugated exact root-of-unity diagonals, B over trace-valuation -1
// companions and triangular hyperbolics with small entries.
inline std::optional<std::pair<Mat2, Mat2>> search_equality_case(const Field& f,
                                                                 int bound,
                                                                 int radius = 8) {
    if (f.kind != FieldKind::padic || f.p == 2) throw Error("search needs padic, p odd");
    if (bound <= 0) return std::nullopt;

    std::vector<Mat2> As;
    const TraceCatalog& cat = finite_order_traces(f);
    for (const auto& e : cat.entries) {
        if (e.trace_is_two || e.order < 3) continue;
        QuadRoots qr = quadratic_roots(e.trace);
        if (qr.kind != QuadRoots::Kind::split) continue; // needs eigenvalues in K
        Mat2 D = Mat2::unchecked(qr.lambda, Element::exact_zero(f), Element::exact_zero(f),
                                 qr.lambda_inv);
        std::vector<Element> grid{Element::exact_zero(f)};
        for (int k = 1; k <= bound; ++k) {
            grid.push_back(Element::from_int(f, k));
            grid.push_back(Element::from_int(f, -k));
        }
        grid.push_back(Element::uniformiser(f));
        for (const Element& x : grid)
            for (const Element& y : grid) {
                Mat2 M = Mat2::unchecked(Element::one(f), x, Element::exact_zero(f),
                                         Element::one(f)) *
                         Mat2::unchecked(Element::one(f), Element::exact_zero(f), y,
                                         Element::one(f));
                As.push_back(M * D * M.inverse());
            }
    }

    std::vector<Mat2> Bs;
    for (int u = 1; u <= bound; ++u) {
        if (u % f.p == 0) continue;
        for (int w = -bound; w <= bound; ++w) {
            // companion of trace u/p + w
            Element tr = Element::from_rational(f, u, f.p) + Element::from_int(f, w);
            Bs.push_back(Mat2::unchecked(Element::exact_zero(f), -Element::one(f),
                                         Element::one(f), tr));
        }
    }
    for (int s = -bound; s <= bound; ++s)
        Bs.push_back(Mat2::unchecked(Element::uniformiser(f), Element::exact_zero(f),
                                     Element::from_int(f, s),
                                     Element::uniformiser(f, -1)));

    for (const Mat2& A : As)
        for (const Mat2& B : Bs) {
            JorgensenLhs lhs = jorgensen_lhs(A, B);
            if (!(lhs.min.exact && lhs.min.n == 0)) continue;
            if (!classify(B).hyperbolic) continue;
            EqualityCase eq = equality_case_check(A, B, radius);
            if (eq.kind == EqualityCase::Kind::verified) return std::make_pair(A, B);
        }
    return std::nullopt;
}

/*
 * Non-elementarity certificate: two hyperbolic words whose four axis ends
 * are pairwise distinct leave no invariant vertex, end, or end pair, so the
 * group is non-elementary. Words are enumerated in the generators and their
 * inverses up to the given length.
 */
struct NonElementaryCertificate {
    bool certified = false;
    std::string word1, word2;
};

namespace detail_words {
struct Word {
    Mat2 m;
    std::string name;
};
inline std::vector<Word> enumerate_words(const std::vector<Mat2>& gens, int max_len) {
    const Field& f = gens.front().field();
    std::vector<Word> alphabet;
    for (size_t i = 0; i < gens.size(); ++i) {
        std::string base = "g" + std::to_string(i + 1);
        alphabet.push_back({gens[i], base});
        alphabet.push_back({gens[i].inverse(), base + "^-1"});
    }
    std::vector<Word> out{{Mat2::identity(f), "1"}};
    std::vector<std::pair<Word, int>> frontier{{out.front(), -1}}; // (word, last letter)
    for (int len = 0; len < max_len; ++len) {
        std::vector<std::pair<Word, int>> next;
        for (const auto& [w, last] : frontier)
            for (int a = 0; a < static_cast<int>(alphabet.size()); ++a) {
                if (last >= 0 && (a ^ 1) == last) continue; // no immediate backtrack
                Word nw{w.m * alphabet[static_cast<size_t>(a)].m,
                        w.name == "1" ? alphabet[static_cast<size_t>(a)].name
                                      : w.name + "*" + alphabet[static_cast<size_t>(a)].name};
                out.push_back(nw);
                next.push_back({nw, a});
            }
        frontier = std::move(next);
    }
    return out;
}
} // namespace detail_words

inline NonElementaryCertificate nonelementary_certificate(const std::vector<Mat2>& gens,
                                                          int word_length = 4) {
    NonElementaryCertificate res;
    if (gens.empty()) return res;
    const Field& f = gens.front().field();
    struct Hyp {
        std::string name;
        End e1, e2;
    };
    std::vector<Hyp> hyps;
    for (const auto& w : detail_words::enumerate_words(gens, word_length)) {
        if (!classify(w.m).hyperbolic) continue;
        FixedEnds fe = fixed_ends(w.m);
        if (fe.kind != FixedEnds::Kind::two) continue;
        hyps.push_back({w.name, fe.e1, fe.e2});
    }
    for (size_t i = 0; i < hyps.size(); ++i)
        for (size_t j = i + 1; j < hyps.size(); ++j) {
            bool distinct = true;
            std::vector<End> es{hyps[i].e1, hyps[i].e2, hyps[j].e1, hyps[j].e2};
            for (size_t a = 0; a < es.size() && distinct; ++a)
                for (size_t b = a + 1; b < es.size() && distinct; ++b)
                    if (compare_ends(es[a], es[b], f).equal) distinct = false;
            if (distinct) {
                res.certified = true;
                res.word1 = hyps[i].name;
                res.word2 = hyps[j].name;
                return res;
            }
        }
    return res;
}

// Observational scan for elementary behavior; absence of evidence here is
// not a proof (nonelementary_certificate is).
struct ElementaryEvidence {
    bool common_fixed_vertex = false;
    std::optional<Vertex> vertex;
    bool common_fixed_end = false;
    std::optional<End> end;
    bool stabilized_end_pair = false;
    std::optional<std::pair<End, End>> end_pair;
    std::vector<std::string> notes;
};

inline ElementaryEvidence elementary_evidence(const Mat2& A, const Mat2& B, int radius = 6) {
    const Field& f = A.field();
    ElementaryEvidence ev;
    for (const Vertex& v : ball(Vertex::base(f), radius)) {
        try {
            if (fixes_vertex(A, v) && fixes_vertex(B, v)) {
                ev.common_fixed_vertex = true;
                ev.vertex = v;
                break;
            }
        } catch (const PrecisionExhausted&) {
            ev.notes.push_back("vertex test hit precision limits at " + v.to_string());
        }
    }
    CommonEnd ce = common_fixed_end(A, B);
    if (ce.kind == CommonEnd::Kind::some) {
        ev.common_fixed_end = true;
        ev.end = ce.end;
    } else if (ce.kind == CommonEnd::Kind::indeterminate) {
        ev.notes.push_back("common-end computation indeterminate");
    }
    // candidate end pairs: axis ends of the first hyperbolic word found
    std::vector<Mat2> cands{A, B, A * B, B * A};
    for (const Mat2& h : cands) {
        if (!classify(h).hyperbolic) continue;
        FixedEnds fe = fixed_ends(h);
        if (fe.kind != FixedEnds::Kind::two) continue;
        if (stabilizes_end_pair(A, fe.e1, fe.e2) && stabilizes_end_pair(B, fe.e1, fe.e2)) {
            ev.stabilized_end_pair = true;
            ev.end_pair = std::make_pair(fe.e1, fe.e2);
            break;
        }
    }
    if (!ev.common_fixed_vertex)
        ev.notes.push_back("no common fixed vertex within radius " + std::to_string(radius) +
                           " (bounded search; not conclusive)");
    return ev;
}

} // namespace btj

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "btj/field.hpp"
#include "btj/finite_order.hpp"
#include "btj/jorgensen.hpp"
#include "btj/literal.hpp"
#include "btj/matrix.hpp"
#include "btj/tree.hpp"

namespace btj {

/*
 * Finite-horizon experiments on sequences g_n -> g: eventual classification,
 * trace stabilisation, common-end tails, and the convergence-to-identity
 * probe for cyclic groups. Sequences are closed-form in the index n (entry
 * grammar extended with p^n), so every report reproduces from its input.
 */

class MatrixSequence {
public:
    MatrixSequence() = default;

    MatrixSequence(const Field& f, const std::array<std::string, 4>& gen,
                   const std::array<std::string, 4>& limit)
        : field_(f) {
        for (int i = 0; i < 4; ++i) {
            gen_[static_cast<size_t>(i)] = ElementExpr::parse(gen[static_cast<size_t>(i)]);
            lim_[static_cast<size_t>(i)] = ElementExpr::parse(limit[static_cast<size_t>(i)]);
            if (lim_[static_cast<size_t>(i)].uses_index())
                throw Error("the declared limit may not depend on n");
        }
    }

    const Field& field() const { return field_; }

    Mat2 generator(long long n) const {
        return Mat2(gen_[0].eval(field_, n), gen_[1].eval(field_, n), gen_[2].eval(field_, n),
                    gen_[3].eval(field_, n));
    }
    Mat2 limit() const {
        return Mat2(lim_[0].eval(field_), lim_[1].eval(field_), lim_[2].eval(field_),
                    lim_[3].eval(field_));
    }

    std::array<std::string, 4> generator_texts() const {
        return {gen_[0].text(), gen_[1].text(), gen_[2].text(), gen_[3].text()};
    }
    std::array<std::string, 4> limit_texts() const {
        return {lim_[0].text(), lim_[1].text(), lim_[2].text(), lim_[3].text()};
    }

    // Smallest entry valuation of generator(n) - limit; the convergence rate.
    Valuation deviation(long long n) const {
        Mat2 g = generator(n), l = limit();
        Valuation v = (g.a() - l.a()).valuation();
        v = vmin(v, (g.b() - l.b()).valuation());
        v = vmin(v, (g.c() - l.c()).valuation());
        v = vmin(v, (g.d() - l.d()).valuation());
        return v;
    }

private:
    Field field_;
    std::array<ElementExpr, 4> gen_, lim_;
};

struct TailClassification {
    ElementClass limit_class;
    std::vector<std::pair<long long, ElementClass>> terms;
    // first sampled index from which every later term matches the limit's
    // elliptic/hyperbolic type, or -1 when the tail never settles in range
    long long settles_at = -1;
    bool tail_matches_limit = false;
    std::string note;
};

inline TailClassification tail_classification(const MatrixSequence& seq, long long n0,
                                              long long n1) {
    TailClassification rep;
    rep.limit_class = classify(seq.limit());
    for (long long n = n0; n <= n1; ++n)
        rep.terms.push_back({n, classify(seq.generator(n))});
    for (size_t i = rep.terms.size(); i-- > 0;) {
        if (rep.terms[i].second.hyperbolic != rep.limit_class.hyperbolic) break;
        rep.settles_at = rep.terms[i].first;
    }
    rep.tail_matches_limit = rep.settles_at != -1;
    rep.note = rep.limit_class.hyperbolic
                   ? "hyperbolic limits force eventually hyperbolic sequences"
                   : "elliptic limits force eventually elliptic sequences when the "
                     "translation lengths in the sequence are bounded below (here by "
                     "the simplicial floor 2)";
    return rep;
}

struct TraceTail {
    std::vector<long long> indices;
    std::vector<Element> traces;
    std::vector<OrderResult> orders;
    bool eventually_constant = false;
    long long constant_from = -1;
    std::vector<std::string> notes;
};

inline TraceTail trace_tail(const MatrixSequence& seq, long long n0, long long n1) {
    TraceTail rep;
    const Field& f = seq.field();
    for (long long n = n0; n <= n1; ++n) {
        Mat2 g = seq.generator(n);
        rep.indices.push_back(n);
        rep.traces.push_back(g.trace());
        rep.orders.push_back(finite_order(g, f));
    }
    if (!rep.traces.empty()) {
        const Element& last = rep.traces.back();
        rep.constant_from = rep.indices.back();
        for (size_t i = rep.traces.size(); i-- > 0;) {
            if (!agrees(rep.traces[i], last)) break;
            rep.constant_from = rep.indices[i];
        }
        rep.eventually_constant =
            rep.constant_from != rep.indices.back() || rep.traces.size() == 1;
    }
    bool infinite_elliptic = false;
    for (const auto& o : rep.orders)
        if (o.kind == OrderResult::Kind::infinite && o.note != "hyperbolic")
            infinite_elliptic = true;
    if (infinite_elliptic)
        rep.notes.push_back(
            "some terms are elliptic of infinite order, so the cyclic groups they "
            "generate are not discrete; the eventual-constancy statement assumes "
            "discrete cyclic groups and does not apply");
    return rep;
}

struct CommonEndTail {
    bool precondition_ok = true;
    std::string note;
    std::vector<std::pair<long long, CommonEnd::Kind>> per_index;
    bool tail_has_common_end = false;
    bool limit_fixes_axis_end = false;
};

// Samples common_fixed_end(A_n, B_n) across the range and compares the tail
// with whether lim A fixes an end of Ax(lim B).
inline CommonEndTail common_end_tail(const MatrixSequence& seqA, const MatrixSequence& seqB,
                                     long long n0, long long n1) {
    CommonEndTail rep;
    const Field& f = seqA.field();
    Mat2 limB = seqB.limit();
    if (!classify(limB).hyperbolic) {
        rep.precondition_ok = false;
        rep.note = "declared limit of the second sequence must be hyperbolic";
        return rep;
    }
    for (long long n = n0; n <= n1; ++n)
        rep.per_index.push_back(
            {n, common_fixed_end(seqA.generator(n), seqB.generator(n)).kind});
    rep.tail_has_common_end =
        !rep.per_index.empty() && rep.per_index.back().second == CommonEnd::Kind::some;

    Axis ax = hyperbolic_axis(limB);
    FixedEnds fa = fixed_ends(seqA.limit());
    if (fa.kind == FixedEnds::Kind::all) {
        rep.limit_fixes_axis_end = true;
    } else {
        for (const End& e : fa.ends())
            for (const End& axe : {ax.attracting, ax.repelling})
                if (compare_ends(e, axe, f).equal) rep.limit_fixes_axis_end = true;
    }
    if (rep.limit_fixes_axis_end != rep.tail_has_common_end)
        rep.note = "tail disagrees with the limit: the equivalence requires the "
                   "sequence groups to be eventually discrete";
    return rep;
}

struct PowerProbe {
    std::vector<long long> exponents;
    std::vector<Valuation> min_entry_valuation;           // of g^k - I
    std::vector<std::array<Valuation, 4>> entry_valuations;
    bool strictly_increasing = false;
    std::string note;
};

// Reports how close g^k comes to the identity. A strictly increasing tail
// along k = p^m means the cyclic group has arbitrarily small nontrivial
// elements, so it is not discrete.
inline PowerProbe power_convergence_probe(const Mat2& g, const std::vector<long long>& exps) {
    PowerProbe rep;
    rep.exponents = exps;
    const Field& f = g.field();
    Mat2 I = Mat2::identity(f);
    for (long long k : exps) {
        Mat2 gk = g.pow(k);
        rep.min_entry_valuation.push_back(gk.distance_to_identity());
        rep.entry_valuations.push_back({(gk.a() - Element::one(f)).valuation(),
                                        gk.b().valuation(), gk.c().valuation(),
                                        (gk.d() - Element::one(f)).valuation()});
    }
    rep.strictly_increasing = rep.min_entry_valuation.size() >= 2;
    for (size_t i = 1; i < rep.min_entry_valuation.size(); ++i)
        if (rep.min_entry_valuation[i].n <= rep.min_entry_valuation[i - 1].n)
            rep.strictly_increasing = false;
    if (rep.strictly_increasing)
        rep.note = "powers approach the identity through distinct nontrivial elements: "
                   "the cyclic group is not discrete";
    return rep;
}

// Closure of a finite set of generators under multiplication, capped.
inline std::vector<Mat2> group_closure(const std::vector<Mat2>& gens, size_t cap = 4096) {
    std::vector<Mat2> elems{Mat2::identity(gens.front().field())};
    auto contains = [&](const Mat2& m) {
        for (const auto& e : elems)
            if (agrees(e, m)) return true;
        return false;
    };
    std::vector<Mat2> frontier = elems;
    while (!frontier.empty() && elems.size() <= cap) {
        std::vector<Mat2> next;
        for (const Mat2& w : frontier)
            for (const Mat2& g : gens) {
                Mat2 m = w * g;
                if (!contains(m)) {
                    elems.push_back(m);
                    next.push_back(m);
                }
            }
        frontier = std::move(next);
    }
    return elems;
}

/*
 * The worked examples: unitriangular groups over F_p((t)), the
 * A_n/B/C/D_n family, the commuting pair over Q_7 with no fixed ends, the
 * discrete order-4/order-6 pair, and the approximation family whose limit
 * fixes an axis end while no term does.
 */
struct CheckResult {
    enum class Status { pass, fail, indeterminate };
    std::string name;
    Status status = Status::indeterminate;
    std::string detail;
};

struct ExampleSuiteReport {
    Field field;
    std::vector<CheckResult> checks;
    bool discreteness_discrepancy_flag = false;
    std::string discrepancy_note;

    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status != CheckResult::Status::pass) return false;
        return true;
    }
    bool any_indeterminate() const {
        for (const auto& c : checks)
            if (c.status == CheckResult::Status::indeterminate) return true;
        return false;
    }
};

namespace detail_examples {
inline void check(ExampleSuiteReport& rep, const std::string& name, bool ok,
                  const std::string& detail = "") {
    rep.checks.push_back({name,
                          ok ? CheckResult::Status::pass : CheckResult::Status::fail,
                          detail});
}
} // namespace detail_examples

inline ExampleSuiteReport run_worked_examples(const Field& f) {
    using detail_examples::check;
    ExampleSuiteReport rep;
    rep.field = f;
    const long long p = f.p;

    if (f.kind == FieldKind::laurent) {
        // Unitriangular generators with entries 1 and t: each element has
        // order p, everything fixes the base vertex, and two generators span
        // an order-p^2 group.
        Mat2 U1 = Mat2(Element::one(f), Element::one(f), Element::exact_zero(f),
                       Element::one(f));
        Mat2 U2 = Mat2(Element::one(f), Element::uniformiser(f), Element::exact_zero(f),
                       Element::one(f));
        auto elems = group_closure({U1, U2});
        check(rep, "unitriangular pair generates order p^2",
              elems.size() == static_cast<size_t>(p * p),
              "order " + std::to_string(elems.size()));
        bool all_fix = true, all_order_p = true;
        Vertex base = Vertex::base(f);
        for (const auto& m : elems) {
            if (!fixes_vertex(m, base)) all_fix = false;
            if (!agrees(m, Mat2::identity(f)) && !finite_order(m, f).is_finite(p))
                all_order_p = false;
        }
        check(rep, "every element fixes the base vertex", all_fix);
        check(rep, "every nontrivial element has order p", all_order_p);
        return rep;
    }

    // ---- the A_n / B / C / D_n family ----
    MatrixSequence seqA(f, {"1", "p^n", "0", "1"}, {"1", "0", "0", "1"});
    Mat2 B(Element::uniformiser(f), Element::exact_zero(f), Element::one(f),
           Element::uniformiser(f, -1));
    Mat2 C(Element::uniformiser(f), Element::exact_zero(f), Element::exact_zero(f),
           Element::uniformiser(f, -1));
    for (long long n = 1; n <= 3; ++n) {
        Mat2 An = seqA.generator(n);
        JorgensenReport jr = jorgensen_test(An, B);
        check(rep,
              "certificate for (A_" + std::to_string(n) + ", B)",
              jr.verdict == Verdict::not_discrete_certificate &&
                  jr.lhs.comm_trace_minus_2 == Valuation::Exact(2 * n),
              "v(tr[A,B]-2) " + jr.lhs.comm_trace_minus_2.to_string());
        JorgensenReport jc = jorgensen_test(An, C);
        check(rep, "(A_" + std::to_string(n) + ", C) shares a fixed end",
              jc.verdict == Verdict::fixed_end_detected);
    }
    {
        MatrixSequence seqD(f, {"1+p^n", "1", "0", "1/(1+p^n)"}, {"1", "1", "0", "1"});
        std::vector<long long> exps;
        for (long long k = p, m = 0; m < 3; ++m, k *= p) exps.push_back(k);
        bool increasing = true;
        for (long long n = 1; n <= 2; ++n) {
            PowerProbe pr = power_convergence_probe(seqD.generator(n), exps);
            if (!pr.strictly_increasing) increasing = false;
        }
        check(rep, "D_n powers approach the identity along p^m", increasing);
        rep.discreteness_discrepancy_flag = true;
        rep.discrepancy_note =
            "the computed powers D_n^(p^m) converge to the identity through distinct "
            "nontrivial elements, which no discrete group allows; this contradicts the "
            "stated discreteness of the cyclic group <D_n>, so that reading is flagged "
            "rather than hard-coded";
    }

    // ---- commuting pair with non-square discriminants (residue 7 only) ----
    if (p == 7) {
        Element m3 = Element::from_int(f, -3);
        check(rep, "-3 is a square in Q_7", is_square(m3) == Ternary::yes);
        Element s = sqrt(m3);
        Mat2 A = Mat2::from_ints(f, 0, -1, 1, 0);
        Mat2 Bc(Element::from_int(f, 2), -s, s, Element::from_int(f, 2));
        check(rep, "the pair commutes", agrees(A * Bc, Bc * A));
        Element two = Element::from_int(f, 2);
        check(rep, "tr[A,B] agrees with 2",
              (commutator(A, Bc).trace() - two).is_zero_like());
        check(rep, "tr^2(A)-4 and tr^2(B)-4 are non-squares",
              is_square(Element::from_int(f, -4)) == Ternary::no &&
                  is_square(Element::from_int(f, 12)) == Ternary::no);
        check(rep, "neither element fixes an end",
              fixed_ends(A).kind == FixedEnds::Kind::none &&
                  fixed_ends(Bc).kind == FixedEnds::Kind::none);
    }

    // ---- discrete non-elementary pair of orders 4 and 6 ----
    {
        Mat2 S = Mat2::from_ints(f, 0, -1, 1, 0);
        Mat2 T = Mat2::from_ints(f, 0, -1, 1, 1);
        Mat2 Bp(Element::exact_zero(f), -Element::uniformiser(f, -1),
                Element::uniformiser(f), Element::one(f));
        check(rep, "generator orders are 4 and 6",
              finite_order(S, f).is_finite(4) && finite_order(T, f).is_finite(6));
        check(rep, "conjugated generator keeps order 6", finite_order(Bp, f).is_finite(6));
        NonElementaryCertificate cert = nonelementary_certificate({S, Bp}, 3);
        check(rep, "non-elementarity certificate", cert.certified,
              cert.certified ? cert.word1 + " , " + cert.word2 : "");
        JorgensenReport jr = jorgensen_test(S, Bp);
        check(rep, "the bound holds for the discrete pair",
              jr.verdict == Verdict::inequality_holds &&
                  jr.lhs.min == Valuation::Exact(-2),
              "min " + jr.lhs.min.to_string());
    }

    // ---- elliptic approximations of a parabolic: no common end at any n ----
    {
        MatrixSequence seqAn(f, {"1+p^n", "1", "p^n", "1"}, {"1", "1", "0", "1"});
        MatrixSequence seqB(f, {"p", "0", "0", "1/p"}, {"p", "0", "0", "1/p"});
        CommonEndTail tail = common_end_tail(seqAn, seqB, 1, 12);
        bool none_everywhere = tail.precondition_ok;
        for (const auto& [n, kind] : tail.per_index)
            if (kind != CommonEnd::Kind::none) none_everywhere = false;
        check(rep, "no term shares an end with B", none_everywhere);
        check(rep, "the limit fixes an end of Ax(B)", tail.limit_fixes_axis_end);
    }
    return rep;
}

} // namespace btj

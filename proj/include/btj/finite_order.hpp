#pragma once

#include <map>
#include <tuple>
#include <set>
#include <string>
#include <vector>

#include "btj/field.hpp"
#include "btj/matrix.hpp"

namespace btj {

/*
 * Finite-order elements of SL2(K).
 *
 * Elements of finite order coprime to p have eigenvalues which are roots of
 * unity in at most a quadratic extension, with the nontrivial automorphism
 * (when it exists) swapping the eigenvalue pair. Over F_p((t)) the extra
 * orders are p and (for odd p) 2p, coming from +-(unipotent); the semisimple
 * part of a mixed-order element would be a non-central torus element whose
 * centraliser contains no unipotents, so nothing else mixes.
 *
 * Over Q_p the ramified cyclotomic levels with [(Z/p^k)^x] inside {+-1} are
 * p^k in {3, 4}, which adds orders {3, 6} for p = 3 and {4} (plus the doubled
 * odd orders 2m) for p = 2.
 *
 * The same enumeration runs for any finite extension of Q_p by replacing the
 * degree bound 2 with 2[K:Q_p] and tracking ramification in v(t - 2); only
 * K = Q_p is wired up here.
 */

namespace cyclo {

// Cyclotomic polynomial coefficients (exact, ascending), n <= a few hundred.
// Memoized per thread: the catalog machinery asks for the same few levels
// over and over.
inline std::vector<long long> cyclotomic_uncached(long long n) {
    std::vector<std::vector<long long>> phi(static_cast<size_t>(n + 1));
    for (long long m = 1; m <= n; ++m) {
        // start from x^m - 1, divide by phi_d for proper divisors d
        std::vector<long long> poly(static_cast<size_t>(m + 1), 0);
        poly[0] = -1;
        poly[static_cast<size_t>(m)] = 1;
        for (long long d = 1; d < m; ++d) {
            if (m % d != 0) continue;
            const auto& q = phi[static_cast<size_t>(d)];
            // exact polynomial division poly /= q (q monic)
            std::vector<long long> quot(poly.size() - q.size() + 1, 0);
            std::vector<long long> rem = poly;
            for (size_t i = quot.size(); i-- > 0;) {
                long long c = rem[i + q.size() - 1];
                quot[i] = c;
                if (c == 0) continue;
                for (size_t j = 0; j < q.size(); ++j) rem[i + j] -= c * q[j];
            }
            poly = std::move(quot);
        }
        phi[static_cast<size_t>(m)] = std::move(poly);
    }
    return phi[static_cast<size_t>(n)];
}

inline const std::vector<long long>& cyclotomic(long long n) {
    thread_local std::map<long long, std::vector<long long>> memo;
    auto it = memo.find(n);
    if (it == memo.end()) it = memo.emplace(n, cyclotomic_uncached(n)).first;
    return it->second;
}

// Minimal polynomial of zeta + zeta^{-1} over Z for primitive n-th roots,
// n >= 3: Phi_n(x) = x^{phi(n)/2} psi_n(x + 1/x), peeled off degree by
// degree using (x^2+1)^k = x^k (x + 1/x)^k.
inline std::vector<long long> trace_polynomial(long long n) {
    std::vector<long long> P = cyclotomic(n);
    size_t k = (P.size() - 1) / 2;
    std::vector<long long> psi(k + 1, 0);
    for (size_t deg = k + 1; deg-- > 0;) {
        long long c = P[2 * deg]; // leading coefficient of the palindromic block
        psi[deg] = c;
        if (c != 0) {
            // subtract c * (x^2 + 1)^deg
            std::vector<long long> bin(deg + 1, 0);
            bin[0] = 1;
            for (size_t i = 1; i <= deg; ++i)
                bin[i] = bin[i - 1] * static_cast<long long>(deg - i + 1) /
                         static_cast<long long>(i);
            for (size_t i = 0; i <= deg; ++i) P[2 * i] -= c * bin[i];
        }
        if (deg > 0) {
            // P is now divisible by x; shift down and keep the palindromic block
            P.erase(P.begin());
            P.pop_back();
        }
    }
    return psi;
}

inline Element eval_poly(const std::vector<long long>& coeffs, const Element& x) {
    const Field& f = x.field();
    Element acc = Element::exact_zero(f);
    for (size_t i = coeffs.size(); i-- > 0;) {
        acc = acc * x + Element::from_int(f, coeffs[i], x.is_zero_like() ? 0 : x.precision());
    }
    return acc;
}

// Hensel lift of a simple residue root of an integer polynomial.
inline Element lift_root(const std::vector<long long>& coeffs, long long residue_root,
                         const Field& f) {
    std::vector<long long> deriv;
    for (size_t i = 1; i < coeffs.size(); ++i)
        deriv.push_back(coeffs[i] * static_cast<long long>(i));
    Element t = Element::from_int(f, residue_root);
    size_t iters = 2;
    for (int s = 1; s < f.precision; s *= 2) ++iters;
    for (size_t i = 0; i < iters; ++i) {
        Element fv = eval_poly(coeffs, t);
        if (fv.is_zero_like()) break;
        t = t - fv / eval_poly(deriv, t);
    }
    return t;
}

} // namespace cyclo

inline std::set<long long> divisors(long long n) {
    std::set<long long> d;
    for (long long k = 1; k <= n; ++k)
        if (n % k == 0) d.insert(k);
    return d;
}

// All orders of finite-order elements of SL2(K).
inline std::set<long long> candidate_orders(const Field& f) {
    const long long p = f.p;
    std::set<long long> orders{1, 2};
    for (long long d : divisors(p - 1)) orders.insert(d);
    for (long long d : divisors(p + 1)) orders.insert(d);
    if (f.kind == FieldKind::laurent) {
        orders.insert(p);
        if (p != 2) orders.insert(2 * p);
        return orders;
    }
    if (p == 2) {
        // -1 lives in Q_2, so odd orders double; Q_2(i) is the one ramified
        // quadratic with an inverting automorphism.
        std::set<long long> doubled;
        for (long long m : orders)
            if (m % 2 == 1) doubled.insert(2 * m);
        orders.insert(doubled.begin(), doubled.end());
        orders.insert(4);
    }
    if (p == 3) {
        // zeta_3 generates the ramified quadratic Q_3(zeta_3).
        orders.insert(3);
        orders.insert(6);
    }
    return orders;
}

struct CatalogEntry {
    long long order = 1;
    Element trace;
    bool trace_is_two = false;  // flagged; excluded from the M_K maximum
    long long v_t_minus_2 = 0;  // valid when !trace_is_two
};

struct TraceCatalog {
    Field field;
    std::vector<CatalogEntry> entries;

    long long max_v_t_minus_2() const {
        long long m = 0; // non-negative by the translation length formula
        for (const auto& e : entries)
            if (!e.trace_is_two) m = std::max(m, e.v_t_minus_2);
        return m;
    }
};

// Every trace of a finite-order element, as an exact element of K, together
// with v(t - 2). Orders whose only trace is 2 (the identity, and unipotents
// in char p) are flagged. Cached per thread and field.
inline TraceCatalog finite_order_traces_uncached(const Field& f) {
    TraceCatalog cat;
    cat.field = f;
    const long long p = f.p;
    auto push = [&](long long order, const Element& t) {
        CatalogEntry e;
        e.order = order;
        e.trace = t;
        Element tm2 = t - Element::from_int(f, 2);
        if (tm2.is_zero_like()) {
            e.trace_is_two = true;
        } else {
            e.v_t_minus_2 = tm2.val();
        }
        cat.entries.push_back(e);
    };

    for (long long n : candidate_orders(f)) {
        if (n == 1) {
            push(1, Element::from_int(f, 2));
            continue;
        }
        if (n == 2) {
            push(2, Element::from_int(f, -2));
            continue;
        }
        if (f.kind == FieldKind::laurent && (n == p || n == 2 * p)) {
            // unipotent part contributes order p with trace 2, order 2p with
            // trace -2 (odd p)
            push(n, Element::from_int(f, n == p ? 2 : -2));
            continue;
        }
        std::vector<long long> psi = cyclo::trace_polynomial(n);
        if (psi.size() == 2) {
            // linear: the trace is an exact integer (covers the ramified levels)
            push(n, Element::from_int(f, -psi[0]));
            continue;
        }
        // unramified level: distinct simple roots mod p, Hensel-lift each
        for (long long r = 0; r < p; ++r) {
            long long v = 0;
            for (size_t i = psi.size(); i-- > 0;)
                v = (static_cast<long long>((__int128)v * r % p) + psi[i] % p + 2 * p) % p;
            if (v % p != 0) continue;
            if (f.kind == FieldKind::laurent) {
                push(n, Element::from_int(f, r)); // residue constants are exact in F_p((t))
            } else {
                push(n, cyclo::lift_root(psi, r, f));
            }
        }
    }
    return cat;
}

inline const TraceCatalog& finite_order_traces(const Field& f) {
    thread_local std::map<std::tuple<int, long long, int>, TraceCatalog> memo;
    auto key = std::make_tuple(static_cast<int>(f.kind), f.p, f.precision);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, finite_order_traces_uncached(f)).first;
    return it->second;
}

// M_K = max v(tr X - 2) over finite-order X with tr X != 2.
inline long long compute_M_K(const Field& f) { return finite_order_traces(f).max_v_t_minus_2(); }

// A matrix of the given catalog order and trace. Companion matrices realise
// every trace other than +-2; those two are realised by +-I and, in char p,
// by +-(unipotent).
inline Mat2 realize_catalog_entry(const CatalogEntry& e, const Field& f) {
    Element two = Element::from_int(f, 2);
    if (e.trace_is_two) {
        if (e.order == 1) return Mat2::identity(f);
        // order p unipotent in char p
        return Mat2::unchecked(Element::one(f), Element::one(f), Element::exact_zero(f),
                               Element::one(f));
    }
    if (agrees(e.trace, -two)) {
        if (e.order == 2) return -Mat2::identity(f);
        // order 2p = -(unipotent) in char p
        return -Mat2::unchecked(Element::one(f), Element::one(f), Element::exact_zero(f),
                                Element::one(f));
    }
    return Mat2::unchecked(Element::exact_zero(f), -Element::one(f), Element::one(f), e.trace);
}

struct OrderResult {
    enum class Kind { finite, infinite, indeterminate };
    Kind kind = Kind::indeterminate;
    long long order = 0;          // valid when finite
    long long verified_precision = 0; // digits at which A^n was compared with I
    std::string note;

    bool is_finite(long long n) const { return kind == Kind::finite && order == n; }
};

// Decides the order of A as far as the tracked digits allow. Trace matching
// against the catalog plus a power check; trace +-2 splits into the central,
// unipotent (char p) and infinite-order (char 0) cases.
inline OrderResult finite_order(const Mat2& A, const Field& f) {
    OrderResult res;
    Element tr = A.trace();
    ElementClass cls = classify(A);
    if (cls.hyperbolic) {
        res.kind = OrderResult::Kind::infinite;
        res.note = "hyperbolic";
        return res;
    }
    const bool char_p = f.kind == FieldKind::laurent;
    Element two = Element::from_int(f, 2);

    auto power_matches = [&](long long n, const Mat2& target) -> bool {
        return agrees(A.pow(n), target);
    };
    auto verified = [&](long long n) {
        res.kind = OrderResult::Kind::finite;
        res.order = n;
        res.verified_precision = f.precision;
        res.note = "verified at precision " + std::to_string(f.precision);
    };

    if (agrees(tr, two)) {
        if (A.agrees_with_identity()) {
            verified(1);
            return res;
        }
        if (char_p) {
            if (power_matches(f.p, Mat2::identity(f))) {
                verified(f.p);
                return res;
            }
            res.kind = OrderResult::Kind::indeterminate;
            res.note = "trace 2 but A^p differs from I";
            return res;
        }
        res.kind = OrderResult::Kind::infinite;
        res.note = "unipotent (trace 2, not central, characteristic 0)";
        return res;
    }
    if (agrees(tr, -two)) {
        if (agrees(A, -Mat2::identity(f))) {
            verified(2);
            return res;
        }
        if (char_p && f.p != 2) {
            if (power_matches(f.p, -Mat2::identity(f))) {
                verified(2 * f.p);
                return res;
            }
            res.kind = OrderResult::Kind::indeterminate;
            res.note = "trace -2 but A^p differs from -I";
            return res;
        }
        res.kind = OrderResult::Kind::infinite;
        res.note = "-(unipotent) (trace -2, not central, characteristic 0)";
        return res;
    }

    const TraceCatalog& cat = finite_order_traces(f);
    for (const auto& e : cat.entries) {
        if (e.trace_is_two || agrees(e.trace, -two)) continue;
        if (!agrees(tr, e.trace)) continue;
        if (power_matches(e.order, Mat2::identity(f))) {
            verified(e.order);
            return res;
        }
        res.kind = OrderResult::Kind::indeterminate;
        res.note = "trace matches order " + std::to_string(e.order) +
                   " but the power check failed";
        return res;
    }
    if (tr.valuation().exact) {
        res.kind = OrderResult::Kind::infinite;
        res.note = "elliptic with trace outside the finite-order catalog";
        return res;
    }
    res.kind = OrderResult::Kind::indeterminate;
    res.note = "trace only known to a bound";
    return res;
}

} // namespace btj

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "btj/field.hpp"
#include "btj/matrix.hpp"

namespace btj {

/*
 * The Bruhat-Tits tree of SL2(K): vertices are homothety classes of rank-2
 * lattices, kept in the canonical form (level m, offset b mod pi^m) for the
 * class of the lattice spanned by (pi^m, 0) and (b, 1). The base vertex
 * (0, 0) is the class of O^2. Ends are points of P^1(K).
 */

class Vertex {
public:
    Vertex() = default;

    // Canonicalizes: the offset keeps exactly the digits with exponent < m.
    // Throws PrecisionExhausted when the offset is not known that far.
    static Vertex make(const Field& f, long long level, const Element& offset) {
        Vertex v;
        v.field_ = f;
        v.level_ = level;
        v.off_ = reduce_offset(offset, level, f);
        return v;
    }

    static Vertex base(const Field& f) { return make(f, 0, Element::exact_zero(f)); }

    const Field& field() const { return field_; }
    long long level() const { return level_; }
    const Element& offset() const { return off_; }

    // The canonical offset is an exact element (its digits beyond the window
    // are genuinely zero), so extending the window is legitimate. Arithmetic
    // on offsets should use this form to avoid spurious precision loss.
    Element offset_exact(long long min_horizon) const {
        if (off_.is_zero_like()) return Element::exact_zero(field_);
        long long need = min_horizon - off_.val();
        if (need <= off_.precision()) return off_;
        return off_.padded(static_cast<size_t>(need));
    }
    Element offset_full() const {
        return offset_exact(off_.is_zero_like() ? 0 : off_.val() + field_.precision);
    }

    bool operator==(const Vertex& o) const {
        return level_ == o.level_ && off_.is_zero_like() == o.off_.is_zero_like() &&
               (off_.is_zero_like() ||
                (off_.val() == o.off_.val() && off_.digits() == o.off_.digits()));
    }
    bool operator!=(const Vertex& o) const { return !(*this == o); }
    bool operator<(const Vertex& o) const {
        if (level_ != o.level_) return level_ < o.level_;
        bool z1 = off_.is_zero_like(), z2 = o.off_.is_zero_like();
        if (z1 != z2) return z1;
        if (z1) return false;
        if (off_.val() != o.off_.val()) return off_.val() < o.off_.val();
        return off_.digits() < o.off_.digits();
    }

    // Child in direction digit (0 <= digit < p): level+1, offset + digit*pi^level.
    Vertex child(uint32_t digit) const {
        Vertex v;
        v.field_ = field_;
        v.level_ = level_ + 1;
        if (off_.is_zero_like()) {
            v.off_ = digit == 0 ? Element::exact_zero(field_)
                                : Element::from_digits(field_, level_, {digit});
        } else {
            std::vector<uint32_t> d = off_.digits();
            while (off_.val() + static_cast<long long>(d.size()) < level_) d.push_back(0);
            d.push_back(digit);
            v.off_ = Element::from_digits(field_, off_.val(), std::move(d));
            if (v.off_.is_zero_like()) v.off_ = Element::exact_zero(field_);
        }
        return v;
    }

    Vertex parent() const {
        Vertex v;
        v.field_ = field_;
        v.level_ = level_ - 1;
        v.off_ = reduce_exact(off_, level_ - 1, field_);
        return v;
    }

    std::string to_string() const;

private:
    friend class VertexOps;

    static Element reduce_exact(const Element& b, long long m, const Field& f) {
        // b already canonical below some level >= m; just drop high digits.
        if (b.is_zero_like() || b.val() >= m) return Element::exact_zero(f);
        size_t keep = static_cast<size_t>(m - b.val());
        Element r = b.truncated(keep);
        return r.is_zero_like() ? Element::exact_zero(f) : r;
    }

    static Element reduce_offset(const Element& b, long long m, const Field& f) {
        if (b.is_zero_like()) {
            if (b.zero_bound() < m)
                throw PrecisionExhausted("offset not determined modulo pi^" +
                                         std::to_string(m));
            return Element::exact_zero(f);
        }
        if (b.val() >= m) return Element::exact_zero(f);
        if (b.horizon() < m)
            throw PrecisionExhausted("offset digits exhausted below pi^" + std::to_string(m));
        Element r = b.truncated(static_cast<size_t>(m - b.val()));
        return r.is_zero_like() ? Element::exact_zero(f) : r;
    }

    Field field_;
    long long level_ = 0;
    Element off_;
};

// d(u, v) = v(det h) - 2 min_ij v(h_ij) for the transition matrix h between
// lattice representatives; reduces to two valuation lookups here.
inline long long vertex_distance(const Vertex& u, const Vertex& v) {
    long long mu = u.level(), mv = v.level();
    long long cap = std::min(mu, mv);
    Element diff = v.offset() - u.offset();
    long long dmin = std::min(mv - mu, 0LL);
    if (!diff.is_zero_like() && diff.val() < cap) {
        dmin = std::min(dmin, diff.val() - mu);
    } else if (diff.is_zero_like() && diff.zero_bound() < cap) {
        throw PrecisionExhausted("offset difference only bounded below the level cap");
    }
    return (mv - mu) - 2 * dmin;
}

// Canonical vertex of the lattice spanned by the columns (x1,y1), (x2,y2).
// Only the valuation of the reduced top-left entry matters and it is pinned
// by the determinant, so no digits of the reduction are ever needed.
inline Vertex vertex_from_columns(const Field& f, Element x1, Element y1, Element x2,
                                  Element y2) {
    Element det = x1 * y2 - x2 * y1;
    if (det.is_zero_like())
        throw PrecisionExhausted("lattice determinant is zero-like");
    auto pivot_second = [&]() -> bool {
        // true when (x2,y2) provides the pivot row entry
        if (y2.is_zero_like() && y1.is_zero_like())
            throw PrecisionExhausted("both second-row entries are zero-like");
        if (y2.is_zero_like()) {
            if (y2.zero_bound() <= y1.val())
                throw PrecisionExhausted("cannot certify the pivot column");
            return false;
        }
        if (y1.is_zero_like()) {
            if (y1.zero_bound() <= y2.val())
                throw PrecisionExhausted("cannot certify the pivot column");
            return true;
        }
        return y2.val() <= y1.val();
    };
    if (!pivot_second()) {
        std::swap(x1, x2);
        std::swap(y1, y2);
    }
    long long m = det.val() - 2 * y2.val();
    Element offset = x2 * y2.inverse();
    return Vertex::make(f, m, offset);
}

inline Vertex apply(const Mat2& g, const Vertex& v) {
    const Field& f = v.field();
    Element pm = Element::uniformiser(f, v.level());
    Element beta = v.offset_full();
    return vertex_from_columns(f, g.a() * pm, g.c() * pm, g.a() * beta + g.b(),
                               g.c() * beta + g.d());
}

inline long long displacement(const Mat2& g, const Vertex& v) {
    return vertex_distance(v, apply(g, v));
}

inline bool fixes_vertex(const Mat2& g, const Vertex& v) { return displacement(g, v) == 0; }

// The p+1 vertices at distance 1.
inline std::vector<Vertex> neighbors(const Vertex& v) {
    std::vector<Vertex> out;
    out.reserve(static_cast<size_t>(v.field().p) + 1);
    for (long long c = 0; c < v.field().p; ++c)
        out.push_back(v.child(static_cast<uint32_t>(c)));
    out.push_back(v.parent());
    return out;
}

// Ball of the given radius, BFS order.
inline std::vector<Vertex> ball(const Vertex& center, int radius) {
    std::vector<Vertex> frontier{center}, all{center};
    std::set<Vertex> seen{center};
    for (int r = 0; r < radius; ++r) {
        std::vector<Vertex> next;
        for (const Vertex& v : frontier)
            for (const Vertex& w : neighbors(v))
                if (seen.insert(w).second) {
                    next.push_back(w);
                    all.push_back(w);
                }
        frontier = std::move(next);
    }
    return all;
}

/*
 * Ends of the tree: the boundary is P^1(K). Finite(c) is [c : 1]; Infinity
 * is [1 : 0]. Equality of computed ends is decided by the cross product of
 * primitive representative vectors: an exact nonzero valuation certifies
 * distinctness, a zero-like cross product certifies agreement at precision.
 */
struct End {
    bool infinity = false;
    Element c; // valid when !infinity

    static End inf(const Field& f) {
        End e;
        e.infinity = true;
        e.c = Element::exact_zero(f);
        return e;
    }
    static End finite(Element v) {
        End e;
        e.c = std::move(v);
        return e;
    }
    std::string to_string() const;
};

// Primitive representative (x, y), min valuation 0.
inline std::pair<Element, Element> primitive_vector(const End& e, const Field& f) {
    if (e.infinity) return {Element::one(f), Element::exact_zero(f)};
    if (!e.c.is_zero_like() && e.c.val() < 0)
        return {Element::one(f), e.c.inverse()};
    if (e.c.is_zero_like() && e.c.zero_bound() <= 0)
        throw PrecisionExhausted("end coordinate bound is not positive");
    return {e.c, Element::one(f)};
}

struct EndCompare {
    bool equal = false;
    long long param = 0; // equal: agreement bound; distinct: exact cross valuation
};

inline EndCompare compare_ends(const End& e1, const End& e2, const Field& f) {
    auto [x1, y1] = primitive_vector(e1, f);
    auto [x2, y2] = primitive_vector(e2, f);
    Element cross = x1 * y2 - x2 * y1;
    EndCompare r;
    if (cross.is_zero_like()) {
        r.equal = true;
        r.param = cross.zero_bound();
    } else {
        r.equal = false;
        r.param = cross.val();
    }
    return r;
}

inline End apply_to_end(const Mat2& g, const End& e) {
    const Field& f = g.field();
    auto [x, y] = primitive_vector(e, f);
    Element nx = g.a() * x + g.b() * y;
    Element ny = g.c() * x + g.d() * y;
    if (ny.is_zero_like()) {
        if (nx.is_zero_like())
            throw PrecisionExhausted("image of an end is zero-like in both coordinates");
        return End::inf(f);
    }
    return End::finite(nx * ny.inverse());
}

// Fixed ends of g on the boundary.
struct FixedEnds {
    enum class Kind { none, one, two, all, indeterminate };
    Kind kind = Kind::indeterminate;
    End e1, e2;       // one: e1; two: attracting first for hyperbolic g
    bool exact = true; // false when the kind rests on a zero-like comparison
    long long cluster_bound = (1LL << 40); // how far perturbed ends could sit

    std::vector<End> ends() const {
        if (kind == Kind::one) return {e1};
        if (kind == Kind::two) return {e1, e2};
        return {};
    }
};

namespace detail_tree {
// Eigen-direction of g for eigenvalue lam, as an end.
inline End eigen_end(const Mat2& g, const Element& lam) {
    const Field& f = g.field();
    if (!g.b().is_zero_like()) {
        // (b, lam - a)
        Element y = lam - g.a();
        if (y.is_zero_like()) return End::inf(f);
        return End::finite(g.b() * y.inverse());
    }
    if (!g.c().is_zero_like()) {
        // (lam - d, c)
        return End::finite((lam - g.d()) * g.c().inverse());
    }
    // diagonal-like: (1,0) or (0,1)
    if (agrees(lam, g.a())) return End::inf(f);
    if (agrees(lam, g.d())) return End::finite(Element::exact_zero(f));
    throw PrecisionExhausted("no eigen-direction matches the eigenvalue at precision");
}
} // namespace detail_tree

inline FixedEnds fixed_ends(const Mat2& g) {
    const Field& f = g.field();
    FixedEnds res;
    Mat2 I = Mat2::identity(f);
    if (agrees(g, I) || agrees(g, -I)) {
        res.kind = FixedEnds::Kind::all;
        res.exact = false; // central only up to the tracked digits
        res.cluster_bound = 0;
        return res;
    }
    Element tr = g.trace();
    Element two = Element::from_int(f, 2);
    for (int sign : {+1, -1}) {
        Element dev = sign > 0 ? tr - two : tr + two;
        if (!dev.is_zero_like()) continue;
        // repeated eigenvalue +-1, one fixed end: the unique eigen-direction
        Element lam = sign > 0 ? Element::one(f) : -Element::one(f);
        res.kind = FixedEnds::Kind::one;
        res.e1 = detail_tree::eigen_end(g, lam);
        res.exact = false;
        res.cluster_bound = dev.zero_bound() / 2 - 1;
        return res;
    }
    QuadRoots qr = quadratic_roots(tr);
    switch (qr.kind) {
        case QuadRoots::Kind::indeterminate:
            res.kind = FixedEnds::Kind::indeterminate;
            return res;
        case QuadRoots::Kind::non_split:
            res.kind = FixedEnds::Kind::none; // exact: residue obstruction
            return res;
        case QuadRoots::Kind::split: {
            res.kind = FixedEnds::Kind::two;
            res.e1 = detail_tree::eigen_end(g, qr.lambda);
            res.e2 = detail_tree::eigen_end(g, qr.lambda_inv);
            long long prec_bound =
                qr.lambda.is_zero_like() ? 0 : qr.lambda.val() + qr.lambda.precision();
            res.cluster_bound = prec_bound / 2;
            return res;
        }
    }
    return res;
}

struct CommonEnd {
    enum class Kind { none, some, indeterminate };
    Kind kind = Kind::indeterminate;
    End end;           // valid when some
    bool exact = true; // for none: every comparison was exactly distinct
    long long agreement_bound = 0;
};

// Intersects the fixed-end sets. A "none" is exact only when every cross
// product is exactly nonzero well inside both cluster bounds, so perturbed
// ends hiding beyond precision cannot collide either.
inline CommonEnd common_fixed_end(const Mat2& A, const Mat2& B) {
    const Field& f = A.field();
    FixedEnds FA = fixed_ends(A);
    FixedEnds FB = fixed_ends(B);
    CommonEnd r;
    if (FA.kind == FixedEnds::Kind::indeterminate ||
        FB.kind == FixedEnds::Kind::indeterminate)
        return r;
    if (FA.kind == FixedEnds::Kind::all && FB.kind == FixedEnds::Kind::all) {
        r.kind = CommonEnd::Kind::some;
        r.end = End::inf(f);
        r.exact = false;
        return r;
    }
    if (FA.kind == FixedEnds::Kind::all || FB.kind == FixedEnds::Kind::all) {
        const FixedEnds& other = FA.kind == FixedEnds::Kind::all ? FB : FA;
        auto ends = other.ends();
        if (ends.empty()) {
            r.kind = CommonEnd::Kind::none;
            r.exact = false; // the central factor is central only at precision
            return r;
        }
        r.kind = CommonEnd::Kind::some;
        r.end = ends.front();
        r.exact = false;
        return r;
    }
    auto endsA = FA.ends(), endsB = FB.ends();
    if (endsA.empty() || endsB.empty()) {
        r.kind = CommonEnd::Kind::none;
        r.exact = true; // at least one side has provably no fixed ends
        return r;
    }
    bool all_exact = true;
    for (const End& ea : endsA)
        for (const End& eb : endsB) {
            EndCompare cmp = compare_ends(ea, eb, f);
            if (cmp.equal) {
                r.kind = CommonEnd::Kind::some;
                r.end = ea;
                r.exact = FA.exact && FB.exact;
                r.agreement_bound = cmp.param;
                return r;
            }
            long long margin = std::min(FA.cluster_bound, FB.cluster_bound);
            if (cmp.param + 2 >= margin) all_exact = false;
        }
    r.kind = CommonEnd::Kind::none;
    r.exact = all_exact;
    return r;
}

// Translation axis of a hyperbolic element.
struct Axis {
    End attracting, repelling;
    Vertex base_point;
    long long length = 0;
};

inline Axis hyperbolic_axis(const Mat2& g) {
    ElementClass cls = classify(g);
    if (!cls.hyperbolic) throw Error("hyperbolic_axis requires a hyperbolic element");
    const Field& f = g.field();
    QuadRoots qr = quadratic_roots(g.trace());
    if (qr.kind != QuadRoots::Kind::split)
        throw PrecisionExhausted("hyperbolic element failed to split");
    Axis ax;
    ax.length = cls.length;
    ax.attracting = detail_tree::eigen_end(g, qr.lambda);
    ax.repelling = detail_tree::eigen_end(g, qr.lambda_inv);
    auto [x1, y1] = primitive_vector(ax.attracting, f);
    auto [x2, y2] = primitive_vector(ax.repelling, f);
    ax.base_point = vertex_from_columns(f, x1, y1, x2, y2);
    if (displacement(g, ax.base_point) != ax.length)
        throw PrecisionExhausted("axis base point failed the displacement check");
    return ax;
}

// The neighbor of v on the geodesic ray toward xi.
inline Vertex step_toward_end(const Vertex& v, const End& xi) {
    if (xi.infinity) return v.parent();
    long long m = v.level();
    Element diff = xi.c - v.offset_exact(m + 2);
    if (diff.is_zero_like()) {
        if (diff.zero_bound() >= m + 1) return v.child(0);
        throw PrecisionExhausted("end offset digits exhausted at the branch level");
    }
    if (diff.val() < m) return v.parent();
    if (diff.val() > m) return v.child(0);
    return v.child(diff.digit(0));
}

// Step from u toward the vertex w (ball containment picture).
inline Vertex step_toward_vertex(const Vertex& u, const Vertex& w) {
    long long m = u.level();
    if (w.level() <= m) return u.parent();
    Element diff = w.offset_exact(m + 2) - u.offset_exact(m + 2);
    if (diff.is_zero_like()) {
        if (diff.zero_bound() >= m + 1) return u.child(0);
        throw PrecisionExhausted("offset digits exhausted while walking");
    }
    if (diff.val() < m) return u.parent();
    if (diff.val() > m) return u.child(0);
    return u.child(diff.digit(0));
}

inline std::vector<Vertex> path_between(const Vertex& u, const Vertex& v) {
    std::vector<Vertex> path{u};
    Vertex cur = u;
    long long d = vertex_distance(cur, v);
    while (cur != v) {
        Vertex nxt = step_toward_vertex(cur, v);
        long long nd = vertex_distance(nxt, v);
        if (nd != d - 1) throw Error("greedy step failed to decrease the distance");
        d = nd;
        cur = nxt;
        path.push_back(cur);
    }
    return path;
}

// Fixed vertices of A on the axis of B, within `radius` steps of the axis
// base point. Fixed sets are subtrees, so the fixed part of the axis is one
// segment; touching the enumeration boundary is reported as such.
struct AxisOverlap {
    enum class Kind { empty, segment, exceeds_radius };
    Kind kind = Kind::empty;
    long long edge_length = 0;
};

inline AxisOverlap fixed_overlap_on_axis(const Mat2& A, const Mat2& B, int radius) {
    Axis ax = hyperbolic_axis(B);
    std::vector<Vertex> axis;
    Vertex cur = ax.base_point;
    for (int i = 0; i < radius; ++i) {
        cur = step_toward_end(cur, ax.repelling);
        axis.push_back(cur);
    }
    std::reverse(axis.begin(), axis.end());
    axis.push_back(ax.base_point);
    cur = ax.base_point;
    for (int i = 0; i < radius; ++i) {
        cur = step_toward_end(cur, ax.attracting);
        axis.push_back(cur);
    }
    std::vector<size_t> fixed;
    for (size_t i = 0; i < axis.size(); ++i)
        if (fixes_vertex(A, axis[i])) fixed.push_back(i);
    AxisOverlap r;
    if (fixed.empty()) {
        r.kind = AxisOverlap::Kind::empty;
        return r;
    }
    if (fixed.front() == 0 || fixed.back() == axis.size() - 1) {
        r.kind = AxisOverlap::Kind::exceeds_radius;
        return r;
    }
    if (fixed.back() - fixed.front() + 1 != fixed.size())
        throw Error("fixed vertices on the axis are not contiguous");
    r.kind = AxisOverlap::Kind::segment;
    r.edge_length = static_cast<long long>(fixed.size()) - 1;
    return r;
}

// Does g map {xi1, xi2} to itself (at precision)?
inline bool stabilizes_end_pair(const Mat2& g, const End& xi1, const End& xi2) {
    const Field& f = g.field();
    End g1 = apply_to_end(g, xi1);
    End g2 = apply_to_end(g, xi2);
    bool fix = compare_ends(g1, xi1, f).equal && compare_ends(g2, xi2, f).equal;
    bool swap = compare_ends(g1, xi2, f).equal && compare_ends(g2, xi1, f).equal;
    return fix || swap;
}

inline std::string Vertex::to_string() const {
    std::string off = "0";
    if (!off_.is_zero_like()) {
        off = "pi^" + std::to_string(off_.val()) + "*(";
        for (size_t i = 0; i < off_.digits().size(); ++i) {
            if (i) off += ",";
            off += std::to_string(off_.digits()[i]);
        }
        off += ")";
    }
    return "(" + std::to_string(level_) + ", " + off + ")";
}

inline std::string End::to_string() const {
    if (infinity) return "inf";
    if (c.is_exact_zero()) return "0";
    return "[c : 1], v(c) " + c.valuation().to_string();
}

} // namespace btj

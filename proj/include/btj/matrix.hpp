#pragma once

#include <array>
#include <string>

#include "btj/field.hpp"

namespace btj {

// Determinant-one 2x2 matrix over K. Construction checks det = 1 on all
// tracked digits; arithmetic preserves det exactly, so products skip the
// check.
class Mat2 {
public:
    Mat2() = default;

    Mat2(Element a, Element b, Element c, Element d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        Element det = a_ * d_ - b_ * c_;
        if (!agrees_with_int(det, 1))
            throw Error("matrix determinant does not agree with 1");
    }

    static Mat2 unchecked(Element a, Element b, Element c, Element d) {
        Mat2 m;
        m.a_ = std::move(a);
        m.b_ = std::move(b);
        m.c_ = std::move(c);
        m.d_ = std::move(d);
        return m;
    }

    static Mat2 identity(const Field& f) {
        return unchecked(Element::one(f), Element::exact_zero(f), Element::exact_zero(f),
                         Element::one(f));
    }

    static Mat2 from_ints(const Field& f, long long a, long long b, long long c, long long d) {
        return Mat2(Element::from_int(f, a), Element::from_int(f, b), Element::from_int(f, c),
                    Element::from_int(f, d));
    }

    const Element& a() const { return a_; }
    const Element& b() const { return b_; }
    const Element& c() const { return c_; }
    const Element& d() const { return d_; }
    const Field& field() const { return a_.field(); }

    const Element& entry(int row, int col) const {
        return row == 0 ? (col == 0 ? a_ : b_) : (col == 0 ? c_ : d_);
    }

    Element trace() const { return a_ + d_; }
    Element det() const { return a_ * d_ - b_ * c_; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return unchecked(x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_,
                         x.c_ * y.a_ + x.d_ * y.c_, x.c_ * y.b_ + x.d_ * y.d_);
    }

    Mat2 operator-() const { return unchecked(-a_, -b_, -c_, -d_); }

    // Adjugate; always valid for det 1.
    Mat2 inverse() const { return unchecked(d_, -b_, -c_, a_); }

    Mat2 pow(long long k) const {
        if (k < 0) return inverse().pow(-k);
        Mat2 r = identity(field());
        Mat2 b = *this;
        while (k > 0) {
            if (k & 1) r = r * b;
            b = b * b;
            k >>= 1;
        }
        return r;
    }

    friend Mat2 commutator(const Mat2& x, const Mat2& y) {
        return x * y * x.inverse() * y.inverse();
    }

    friend bool agrees(const Mat2& x, const Mat2& y) {
        return agrees(x.a_, y.a_) && agrees(x.b_, y.b_) && agrees(x.c_, y.c_) &&
               agrees(x.d_, y.d_);
    }

    bool agrees_with_identity() const { return agrees(*this, identity(field())); }

    // Smallest valuation among the entries of (this - I); the distance of g
    // to the identity in the congruence filtration.
    Valuation distance_to_identity() const {
        Mat2 e = unchecked(a_ - Element::one(field()), b_, c_, d_ - Element::one(field()));
        Valuation v = e.a_.valuation();
        v = vmin(v, e.b_.valuation());
        v = vmin(v, e.c_.valuation());
        v = vmin(v, e.d_.valuation());
        return v;
    }

private:
    Element a_, b_, c_, d_;
};

// Elliptic/hyperbolic dichotomy: translation length is -2 min{0, v(tr)}.
struct ElementClass {
    bool hyperbolic = false;
    long long length = 0; // positive even when hyperbolic, 0 otherwise
    Valuation trace_val;

    std::string to_string() const {
        return hyperbolic ? "hyperbolic(l=" + std::to_string(length) + ")" : "elliptic";
    }
};

inline ElementClass classify(const Mat2& g) {
    ElementClass r;
    r.trace_val = g.trace().valuation();
    if (r.trace_val.exact && r.trace_val.n < 0) {
        r.hyperbolic = true;
        r.length = -2 * r.trace_val.n;
    } else if (!r.trace_val.exact && r.trace_val.n < 0) {
        // Sentinels are created at their horizon, which is never negative for
        // traces of det-1 matrices built at sane precision.
        throw PrecisionExhausted("trace valuation bound is negative");
    }
    return r;
}

inline long long translation_length(const Mat2& g) { return classify(g).length; }

} // namespace btj

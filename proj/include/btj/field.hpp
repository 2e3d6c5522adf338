#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace btj {

/*
 * Exact arithmetic in the non-archimedean local fields Q_p and F_p((t)).
 *
 * An element is stored as an exact valuation plus a window of residue
 * digits: x = pi^v * (d0 + d1*pi + d2*pi^2 + ...), d0 != 0, where pi is the
 * uniformiser (p or t) and the digits are known for exactly `precision`
 * positions. Q_p digits combine with carries (base-p integers); F_p((t))
 * digits are F_p coefficients and never carry.
 *
 * A value whose tracked digits have all cancelled is not "zero": it is
 * indistinguishable from zero below pi^N for the recorded bound N. Such
 * values carry the bound instead of digits, so valuation queries always
 * answer honestly with either an exact integer or a lower bound.
 */

enum class FieldKind { padic, laurent };

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};
struct DivisionByZeroLike : Error {
    DivisionByZeroLike() : Error("division by a zero-like element") {}
};
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& what = "precision exhausted")
        : Error(what) {}
};
struct NotASquare : Error {
    NotASquare() : Error("element is not a square") {}
};
struct ZeroLikeInput : Error {
    ZeroLikeInput() : Error("zero-like input where a nonzero element is required") {}
};
struct ParseError : Error {
    size_t position;
    ParseError(const std::string& what, size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

namespace detail {
inline bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}
inline long long mod_pow(long long base, long long exp, long long mod) {
    long long r = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) r = static_cast<long long>((__int128)r * base % mod);
        base = static_cast<long long>((__int128)base * base % mod);
        exp >>= 1;
    }
    return r;
}
inline long long inv_mod(long long a, long long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw Error("inverse of zero mod p");
    return mod_pow(a, p - 2, p); // p prime
}
// Legendre symbol for odd prime p.
inline int legendre(long long a, long long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    return mod_pow(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}
} // namespace detail

struct Field {
    FieldKind kind = FieldKind::padic;
    long long p = 2;
    int precision = 64; // significant residue digits for newly built elements

    Field() = default;
    Field(FieldKind k, long long prime, int prec) : kind(k), p(prime), precision(prec) {
        if (!detail::is_prime(p)) throw Error("residue characteristic must be prime");
        if (precision < 1) throw Error("precision must be >= 1");
    }
    static Field padic(long long p, int prec = 64) { return Field(FieldKind::padic, p, prec); }
    static Field laurent(long long p, int prec = 64) { return Field(FieldKind::laurent, p, prec); }

    char uniformiser_symbol() const { return kind == FieldKind::padic ? 'p' : 't'; }
    bool operator==(const Field& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const Field& o) const { return !(*this == o); }

    std::string to_string() const {
        return (kind == FieldKind::padic ? std::string("padic:") : std::string("laurent:")) +
               std::to_string(p);
    }
};

// Valuation of an element: either exactly n, or only known to be >= n
// (cancellation beyond the tracked digits).
struct Valuation {
    bool exact = true;
    long long n = 0;

    static Valuation Exact(long long n) { return {true, n}; }
    static Valuation AtLeast(long long n) { return {false, n}; }

    bool operator==(const Valuation& o) const { return exact == o.exact && n == o.n; }
    bool operator!=(const Valuation& o) const { return !(*this == o); }

    bool definitely_greater(long long m) const { return n > m; }
    bool definitely_leq(long long m) const { return exact && n <= m; }

    std::string to_string() const {
        if (!exact && n >= (1LL << 40)) return "v >= inf (exact zero)";
        return (exact ? "v = " : "v >= ") + std::to_string(n);
    }
};

// Lower-bound semantics: Exact(n) wins when n < N, otherwise only the bound
// survives; min of two bounds is the smaller bound.
inline Valuation vmin(const Valuation& a, const Valuation& b) {
    if (a.exact && b.exact) return Valuation::Exact(std::min(a.n, b.n));
    if (a.exact) return a.n < b.n ? a : Valuation::AtLeast(b.n);
    if (b.exact) return b.n < a.n ? b : Valuation::AtLeast(a.n);
    return Valuation::AtLeast(std::min(a.n, b.n));
}

enum class Ternary { yes, no, indeterminate };

class Element {
public:
    // Bound carried by exact zeros; larger than any valuation that can arise.
    static constexpr long long kExactZeroBound = (1LL << 40);

    Element() = default;

    static Element zero_like(const Field& f, long long bound) {
        Element e;
        e.field_ = f;
        e.val_ = std::min(bound, kExactZeroBound);
        return e;
    }
    static Element exact_zero(const Field& f) { return zero_like(f, kExactZeroBound); }

    static Element from_digits(const Field& f, long long val, std::vector<uint32_t> digits) {
        Element e;
        e.field_ = f;
        e.val_ = val;
        e.dig_ = std::move(digits);
        e.normalize();
        return e;
    }

    static Element one(const Field& f, int prec = 0) { return from_int(f, 1, prec); }

    static Element uniformiser(const Field& f, long long power = 1, int prec = 0) {
        if (prec <= 0) prec = f.precision;
        std::vector<uint32_t> d(static_cast<size_t>(prec), 0);
        d[0] = 1;
        return from_digits(f, power, std::move(d));
    }

    static Element from_int(const Field& f, long long n, int prec = 0) {
        return from_rational(f, n, 1, prec);
    }

    // Image of num/den. For Q_p this is the full p-adic expansion; in
    // F_p((t)) integers land in the constant field F_p, so den must be a
    // unit mod p.
    static Element from_rational(const Field& f, long long num, long long den, int prec = 0) {
        if (den == 0) throw DivisionByZeroLike();
        if (prec <= 0) prec = f.precision;
        if (num == 0) return exact_zero(f);
        const long long p = f.p;
        if (f.kind == FieldKind::laurent) {
            long long n = num % p, d = den % p;
            if (n < 0) n += p;
            if (d < 0) d += p;
            if (d == 0) throw DivisionByZeroLike();
            if (n == 0) return exact_zero(f);
            std::vector<uint32_t> dig(static_cast<size_t>(prec), 0);
            dig[0] = static_cast<uint32_t>(n * detail::inv_mod(d, p) % p);
            return from_digits(f, 0, std::move(dig));
        }
        long long v = 0;
        while (num % p == 0) { num /= p; ++v; }
        while (den % p == 0) { den /= p; --v; }
        // p-adic long division, one digit per step; the remainder stays small.
        std::vector<uint32_t> dig(static_cast<size_t>(prec), 0);
        long long inv_d = detail::inv_mod(den, p);
        long long r = num;
        for (int i = 0; i < prec; ++i) {
            long long rm = r % p;
            if (rm < 0) rm += p;
            long long digit = rm * inv_d % p;
            dig[static_cast<size_t>(i)] = static_cast<uint32_t>(digit);
            r = (r - digit * den) / p;
        }
        return from_digits(f, v, std::move(dig));
    }

    const Field& field() const { return field_; }
    bool is_zero_like() const { return dig_.empty(); }
    bool is_exact_zero() const { return dig_.empty() && val_ >= kExactZeroBound; }
    long long zero_bound() const { return val_; } // meaningful when zero-like
    long long val() const { return val_; }        // leading exponent when nonzero
    int precision() const { return static_cast<int>(dig_.size()); }
    long long horizon() const {
        return is_zero_like() ? val_
                              : std::min(val_ + static_cast<long long>(dig_.size()),
                                         kExactZeroBound);
    }
    const std::vector<uint32_t>& digits() const { return dig_; }
    uint32_t digit(size_t i) const { return i < dig_.size() ? dig_[i] : 0; }

    Valuation valuation() const {
        return is_zero_like() ? Valuation::AtLeast(val_) : Valuation::Exact(val_);
    }

    Element operator-() const {
        if (is_zero_like()) return *this;
        Element r = *this;
        const long long p = field_.p;
        if (field_.kind == FieldKind::laurent) {
            for (auto& d : r.dig_) d = static_cast<uint32_t>((p - d) % p);
        } else {
            // -x = pi^v * ((p - d0) + (p-1-d1) pi + ...); no carries needed.
            r.dig_[0] = static_cast<uint32_t>(p - r.dig_[0]);
            for (size_t i = 1; i < r.dig_.size(); ++i)
                r.dig_[i] = static_cast<uint32_t>(p - 1 - r.dig_[i]);
        }
        return r;
    }

    friend Element operator+(const Element& x, const Element& y) {
        x.check_same_field(y);
        const Field& f = x.field_;
        if (x.is_zero_like() && y.is_zero_like())
            return zero_like(f, std::min(x.val_, y.val_));
        if (x.is_zero_like()) return add_zero_like(y, x.val_);
        if (y.is_zero_like()) return add_zero_like(x, y.val_);

        long long v = std::min(x.val_, y.val_);
        long long hor = std::min(x.horizon(), y.horizon());
        size_t len = static_cast<size_t>(hor - v);
        std::vector<uint32_t> buf(len, 0);
        accumulate(buf, x, v, f);
        accumulate(buf, y, v, f);
        return from_digits(f, v, std::move(buf));
    }

    friend Element operator-(const Element& x, const Element& y) { return x + (-y); }

    friend Element operator*(const Element& x, const Element& y) {
        x.check_same_field(y);
        const Field& f = x.field_;
        if (x.is_zero_like() || y.is_zero_like())
            return zero_like(f, sat_val_add(x.val_, y.val_));
        size_t len = std::min(x.dig_.size(), y.dig_.size());
        std::vector<uint32_t> out(len, 0);
        const unsigned __int128 p = static_cast<unsigned __int128>(f.p);
        if (f.kind == FieldKind::laurent) {
            for (size_t k = 0; k < len; ++k) {
                unsigned __int128 acc = 0;
                for (size_t i = 0; i <= k; ++i)
                    acc += (unsigned __int128)x.dig_[i] * y.dig_[k - i];
                out[k] = static_cast<uint32_t>(acc % p);
            }
        } else {
            unsigned __int128 carry = 0;
            for (size_t k = 0; k < len; ++k) {
                unsigned __int128 acc = carry;
                for (size_t i = 0; i <= k; ++i)
                    acc += (unsigned __int128)x.dig_[i] * y.dig_[k - i];
                out[k] = static_cast<uint32_t>(acc % p);
                carry = acc / p;
            }
        }
        return from_digits(f, x.val_ + y.val_, std::move(out));
    }

    // Newton iteration w <- w (2 - u w); 1 - u w' = (1 - u w)^2 holds in any
    // characteristic, so correct digits double each round.
    Element inverse() const {
        if (is_zero_like()) throw DivisionByZeroLike();
        const Field& f = field_;
        const size_t target = dig_.size();
        Element u = *this;
        u.val_ = 0;
        Element two = from_int(f, 2, static_cast<int>(target));
        Element w = from_digits(
            f, 0, {static_cast<uint32_t>(detail::inv_mod(dig_[0], f.p))});
        size_t cur = 1;
        while (cur < target) {
            cur = std::min(cur * 2, target);
            w = w.padded(cur);
            Element corr = two.truncated(cur) - u.truncated(cur) * w;
            w = (w * corr).padded(cur);
        }
        w = w.truncated(target);
        w.val_ = -val_;
        return w;
    }

    friend Element operator/(const Element& x, const Element& y) { return x * y.inverse(); }

    Element pow(long long k) const {
        if (k < 0) return inverse().pow(-k);
        if (k == 0) return one(field_, std::max(1, precision()));
        if (is_zero_like()) {
            __int128 b = static_cast<__int128>(val_) * k;
            long long bound = b > kExactZeroBound ? kExactZeroBound
                              : b < -kExactZeroBound ? -kExactZeroBound
                                                     : static_cast<long long>(b);
            return zero_like(field_, bound);
        }
        Element r = one(field_, precision());
        Element b = *this;
        long long e = k;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    // At most n significant digits (n >= 1); never extends.
    Element truncated(size_t n) const {
        if (is_zero_like() || dig_.size() <= n) return *this;
        Element r = *this;
        r.dig_.resize(std::max<size_t>(1, n));
        return r;
    }

    // Extends the digit window with zeros. Only safe inside Newton-style
    // loops where subsequent rounds repair the tail.
    Element padded(size_t n) const {
        if (is_zero_like()) return *this;
        Element r = *this;
        while (r.dig_.size() < n) r.dig_.push_back(0);
        return r;
    }

    bool operator==(const Element& o) const {
        return field_ == o.field_ && val_ == o.val_ && dig_ == o.dig_;
    }
    bool operator!=(const Element& o) const { return !(*this == o); }

private:
    static long long sat_val_add(long long a, long long b) {
        __int128 s = static_cast<__int128>(a) + b;
        if (s > Element::kExactZeroBound) return Element::kExactZeroBound;
        if (s < -Element::kExactZeroBound) return -Element::kExactZeroBound;
        return static_cast<long long>(s);
    }

    static Element add_zero_like(const Element& x, long long bound) {
        // x nonzero; the other summand only vanishes below pi^bound.
        if (bound <= x.val_) return zero_like(x.field_, bound);
        long long hor = std::min(x.horizon(), bound);
        Element r = x;
        r.dig_.resize(static_cast<size_t>(hor - x.val_));
        return r;
    }

    static void accumulate(std::vector<uint32_t>& buf, const Element& x, long long base_val,
                           const Field& f) {
        const long long p = f.p;
        size_t shift = static_cast<size_t>(x.val_ - base_val);
        if (f.kind == FieldKind::laurent) {
            for (size_t i = 0; i < x.dig_.size() && i + shift < buf.size(); ++i)
                buf[i + shift] = static_cast<uint32_t>((buf[i + shift] + x.dig_[i]) % p);
        } else {
            uint64_t carry = 0;
            for (size_t i = shift; i < buf.size(); ++i) {
                uint64_t d = (i - shift) < x.dig_.size() ? x.dig_[i - shift] : 0;
                uint64_t s = buf[i] + d + carry;
                buf[i] = static_cast<uint32_t>(s % static_cast<uint64_t>(p));
                carry = s / static_cast<uint64_t>(p);
            }
        }
    }

    void normalize() {
        size_t lead = 0;
        while (lead < dig_.size() && dig_[lead] == 0) ++lead;
        if (lead == dig_.size()) {
            long long bound = val_ + static_cast<long long>(dig_.size());
            dig_.clear();
            val_ = std::min(bound, kExactZeroBound);
            return;
        }
        if (lead > 0) {
            dig_.erase(dig_.begin(), dig_.begin() + static_cast<long>(lead));
            val_ += static_cast<long long>(lead);
        }
    }

    void check_same_field(const Element& o) const {
        if (field_ != o.field_) throw Error("elements from different fields");
    }

    Field field_;
    long long val_ = kExactZeroBound;
    std::vector<uint32_t> dig_;
};

// x and y agree on every digit both of them track.
inline bool agrees(const Element& x, const Element& y) { return (x - y).is_zero_like(); }

inline bool agrees_with_int(const Element& x, long long n) {
    return agrees(x, Element::from_int(x.field(), n));
}

// Square test: valuation parity plus a residue test on the leading unit.
//  - odd p (both kinds): Legendre symbol of the leading digit;
//  - Q_2: the unit part must be 1 mod 8, which needs >= 3 tracked digits;
//  - F_2((t)): squares are series in t^2, so an oddly-placed digit refutes
//    and nothing at finite precision confirms.
inline Ternary is_square(const Element& x) {
    if (x.is_zero_like()) throw ZeroLikeInput();
    if (x.val() % 2 != 0) return Ternary::no;
    const Field& f = x.field();
    if (f.p != 2)
        return detail::legendre(x.digit(0), f.p) == 1 ? Ternary::yes : Ternary::no;
    if (f.kind == FieldKind::padic) {
        if (x.precision() < 3) return Ternary::indeterminate;
        return (x.digit(0) == 1 && x.digit(1) == 0 && x.digit(2) == 0) ? Ternary::yes
                                                                       : Ternary::no;
    }
    for (size_t i = 1; i < x.digits().size(); i += 2)
        if (x.digits()[i] != 0) return Ternary::no;
    return Ternary::indeterminate;
}

namespace detail {
inline long long sqrt_mod(long long a, long long p) {
    a %= p;
    if (a < 0) a += p;
    for (long long r = 0; r < p; ++r)
        if (r * r % p == a) return r;
    throw NotASquare();
}
} // namespace detail

// Square root by Hensel/Newton lifting. Of the two roots, the one with the
// smaller leading digit is returned; for Q_2 the root that is 1 mod 4.
inline Element sqrt(const Element& x) {
    if (x.is_zero_like()) throw ZeroLikeInput();
    Ternary sq = is_square(x);
    if (sq == Ternary::no) throw NotASquare();
    const Field& f = x.field();
    if (sq == Ternary::indeterminate && f.kind == FieldKind::padic)
        throw PrecisionExhausted("square test needs at least 3 digits");
    const long long half_val = x.val() / 2;
    const Element u = Element::from_digits(f, 0, x.digits());
    const size_t target = x.digits().size();

    if (f.kind == FieldKind::laurent && f.p == 2) {
        // inverse Frobenius: keep the even-indexed coefficients
        std::vector<uint32_t> d;
        for (size_t i = 0; i < u.digits().size(); i += 2) d.push_back(u.digits()[i]);
        return Element::uniformiser(f, half_val, static_cast<int>(target)) *
               Element::from_digits(f, 0, std::move(d));
    }

    Element y;
    if (f.p != 2) {
        long long r0 = detail::sqrt_mod(u.digit(0), f.p);
        Element half = Element::from_int(f, 2, static_cast<int>(target)).inverse();
        y = Element::from_int(f, r0, static_cast<int>(target));
        size_t iters = 2;
        for (size_t t = 1; t < target; t *= 2) ++iters;
        for (size_t i = 0; i < iters; ++i) y = (y + u / y) * half;
        if (y.digit(0) > f.p - y.digit(0)) y = -y;
    } else {
        // Q_2 with u = 1 mod 8: y <- y - (y^2 - u)/(2y) starting from 1;
        // the defect valuation grows from 3 via m -> 2m - 2.
        y = Element::one(f, static_cast<int>(target));
        for (size_t i = 0; i < target + 4; ++i) {
            Element e = y * y - u;
            if (e.is_zero_like()) break;
            y = y - e / (y + y);
        }
        y = y.truncated(target > 1 ? target - 1 : 1);
    }
    return Element::uniformiser(f, half_val, static_cast<int>(target)) * y;
}

// Roots of x^2 - t x + 1, the characteristic polynomial attached to a trace.
struct QuadRoots {
    enum class Kind { split, non_split, indeterminate };
    Kind kind = Kind::indeterminate;
    Element lambda, lambda_inv; // valid when split; v(lambda) <= v(lambda_inv)
};

inline QuadRoots quadratic_roots(const Element& t) {
    const Field& f = t.field();
    QuadRoots res;

    if (!t.is_zero_like() && t.val() < 0) {
        // Newton polygon slopes +-v(t): both roots live in K. The iteration
        // l <- t - 1/l contracts by pi^{2|v(t)|} per step.
        long long m = -t.val();
        Element lam = t;
        long long steps = t.precision() / (2 * m) + 3;
        for (long long i = 0; i < steps; ++i) lam = t - lam.inverse();
        res.kind = QuadRoots::Kind::split;
        res.lambda = lam;
        res.lambda_inv = lam.inverse();
        return res;
    }

    Element disc = t * t - Element::from_int(f, 4);
    if (disc.is_zero_like()) {
        res.kind = QuadRoots::Kind::indeterminate; // repeated-eigenvalue boundary
        return res;
    }

    if (f.kind == FieldKind::padic && f.p != 2) {
        if (is_square(disc) == Ternary::no) {
            res.kind = QuadRoots::Kind::non_split;
            return res;
        }
        Element lam = (t + sqrt(disc)) / Element::from_int(f, 2);
        res.kind = QuadRoots::Kind::split;
        res.lambda = lam;
        res.lambda_inv = lam.inverse();
        if (res.lambda_inv.val() < res.lambda.val()) std::swap(res.lambda, res.lambda_inv);
        return res;
    }

    // Residue characteristic 2, and Laurent fields: Hensel factorisation
    // against a simple residue root (division by 2 is illegal in char 2 and
    // lossy in Q_2).
    const long long p = f.p;
    long long tbar = (!t.is_zero_like() && t.val() == 0) ? t.digit(0) : 0;
    long long disc_bar = ((tbar * tbar - 4) % p + p) % p;
    if (disc_bar == 0) {
        res.kind = QuadRoots::Kind::indeterminate; // inseparable residue polynomial
        return res;
    }
    std::optional<long long> root;
    for (long long r = 0; r < p; ++r)
        if (((r * r - tbar * r + 1) % p + p) % p == 0) {
            root = root ? std::min(*root, r) : r;
        }
    if (!root) {
        res.kind = QuadRoots::Kind::non_split;
        return res;
    }
    const size_t target =
        static_cast<size_t>(t.is_zero_like() ? f.precision : t.precision());
    Element lam = Element::from_int(f, *root, static_cast<int>(target));
    Element one = Element::one(f, static_cast<int>(target));
    size_t iters = 2;
    for (size_t s = 1; s < target; s *= 2) ++iters;
    for (size_t i = 0; i < iters; ++i) {
        Element fv = lam * lam - t * lam + one;
        if (fv.is_zero_like()) break;
        lam = lam - fv / (lam + lam - t);
    }
    res.kind = QuadRoots::Kind::split;
    res.lambda = lam;
    res.lambda_inv = lam.inverse();
    return res;
}

} // namespace btj

#pragma once

#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "btj/field.hpp"
#include "btj/matrix.hpp"

namespace btj_test {

using namespace btj;

// ---- independent oracles (kept free of the library's digit machinery) ----

// Valuation of num/den by repeated division.
inline long long rational_valuation_oracle(long long num, long long den, long long p) {
    long long v = 0;
    while (num % p == 0) { num /= p; ++v; }
    while (den % p == 0) { den /= p; --v; }
    return v;
}

// v_p(a^k - 1) for a unit a, computed modulo p^J with plain integers.
inline long long unit_power_defect_oracle(long long a, long long k, long long p, int J) {
    long long mod = 1;
    for (int i = 0; i < J; ++i) mod *= p;
    long long x = 1 % mod, base = a % mod;
    long long e = k;
    while (e > 0) {
        if (e & 1) x = static_cast<long long>((__int128)x * base % mod);
        base = static_cast<long long>((__int128)base * base % mod);
        e >>= 1;
    }
    long long d = (x - 1 % mod + mod) % mod;
    if (d == 0) return J; // at least J
    long long v = 0;
    while (d % p == 0) { d /= p; ++v; }
    return v;
}

// Admissible orders of finite-order elements of SL2(Q_p), by enumerating the
// exponent action on roots of unity: n = p^k m is admissible iff every Galois
// exponent (any unit mod p^k, any power of p mod m) acts as +-1 mod n.
inline std::set<long long> padic_orders_oracle(long long p, long long n_max = 100) {
    std::set<long long> out;
    for (long long n = 1; n <= n_max; ++n) {
        long long m = n, pk = 1;
        while (m % p == 0) { m /= p; pk *= p; }
        std::vector<long long> frob{1 % m};
        {
            long long x = 1 % m, guard = 0;
            do {
                x = x * (p % m) % m;
                frob.push_back(x);
            } while (x != 1 % m && ++guard < n_max);
        }
        bool ok = true;
        for (long long u = 0; u < pk && ok; ++u) {
            if (std::gcd(u, pk) != 1 && pk > 1) continue;
            long long uu = pk == 1 ? 0 : u;
            for (long long fr : frob) {
                // CRT: a = uu mod pk, a = fr mod m
                bool found = false;
                for (long long a = 0; a < n; ++a) {
                    if (pk > 1 && a % pk != uu) continue;
                    if (m > 1 && a % m != fr % m) continue;
                    found = true;
                    bool is_pm1 = (a % n == 1 % n) || ((a + 1) % n == 0);
                    if (!is_pm1) ok = false;
                    break;
                }
                if (!found) ok = false;
                if (!ok) break;
            }
        }
        if (ok) out.insert(n);
    }
    return out;
}

// char-p case: coprime orders divide q-1 or q+1; a nontrivial unipotent part
// forces the semisimple part central, leaving only p and (odd p) 2p extra.
inline std::set<long long> laurent_orders_oracle(long long p, long long n_max = 100) {
    std::set<long long> out;
    for (long long n = 1; n <= n_max; ++n) {
        if (n % p != 0) {
            if ((p - 1) % n == 0 || (p + 1) % n == 0) out.insert(n);
            continue;
        }
        if (n == p) out.insert(n);
        if (p != 2 && n == 2 * p) out.insert(n);
    }
    return out;
}

// Semantic agreement of two valuation answers computed along different
// routes: exact values must match; a bound is consistent with anything it
// does not exclude.
inline bool valuations_compatible(const Valuation& a, const Valuation& b) {
    if (a.exact && b.exact) return a.n == b.n;
    if (a.exact) return a.n >= b.n;
    if (b.exact) return b.n >= a.n;
    return true;
}

// ---- randomized generators ----

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    long long uniform(long long lo, long long hi) {
        return std::uniform_int_distribution<long long>(lo, hi)(eng);
    }
};

inline Element random_element(Rng& rng, const Field& f) {
    long long val = rng.uniform(-5, 5);
    std::vector<uint32_t> d(static_cast<size_t>(f.precision));
    d[0] = static_cast<uint32_t>(rng.uniform(1, f.p - 1));
    for (size_t i = 1; i < d.size(); ++i)
        d[i] = static_cast<uint32_t>(rng.uniform(0, f.p - 1));
    return Element::from_digits(f, val, std::move(d));
}

// Products of elementary matrices, optionally with one diagonal twist.
inline Mat2 random_sl2(Rng& rng, const Field& f, int factors = 4, bool allow_diag = true) {
    Mat2 m = Mat2::identity(f);
    for (int i = 0; i < factors; ++i) {
        int kind = static_cast<int>(rng.uniform(0, allow_diag ? 2 : 1));
        if (kind == 2) {
            long long k = rng.uniform(-1, 1);
            m = m * Mat2::unchecked(Element::uniformiser(f, k), Element::exact_zero(f),
                                    Element::exact_zero(f), Element::uniformiser(f, -k));
            continue;
        }
        long long a = rng.uniform(-3, 3);
        Element x = Element::from_int(f, a);
        if (rng.uniform(0, 3) == 0) x = x * Element::uniformiser(f);
        if (kind == 0)
            m = m * Mat2::unchecked(Element::one(f), x, Element::exact_zero(f),
                                    Element::one(f));
        else
            m = m * Mat2::unchecked(Element::one(f), Element::exact_zero(f), x,
                                    Element::one(f));
    }
    return m;
}

} // namespace btj_test

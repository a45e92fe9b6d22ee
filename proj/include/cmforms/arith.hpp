#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cmforms/errors.hpp"

namespace cmforms::arith {

using i64 = std::int64_t;
using i128 = __int128;

// ---------------------------------------------------------------------------
// checked 128-bit helpers
// ---------------------------------------------------------------------------

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw overflow("add");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw overflow("sub");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw overflow("mul");
    return r;
}

inline i128 checked_neg(i128 a) { return checked_sub(0, a); }

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u =
        neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

inline i64 to_i64(i128 v, const char* what = "value") {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw overflow(what);
    return static_cast<i64>(v);
}

inline i128 abs128(i128 a) { return a < 0 ? checked_neg(a) : a; }

inline int sgn(i128 a) { return a < 0 ? -1 : (a > 0 ? 1 : 0); }

/// Floor division (round toward minus infinity); m != 0.
inline i128 floor_div(i128 a, i128 m) {
    i128 q = a / m;
    if ((a % m != 0) && ((a < 0) != (m < 0))) --q;
    return q;
}

/// Representative of a mod m in [0, m); m > 0.
inline i128 mod_floor(i128 a, i128 m) {
    i128 r = a % m;
    if (r < 0) r += m;
    return r;
}

inline i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

struct ExtGcd {
    i128 g, u, v;  // g = u*a + v*b, g >= 0
};

inline ExtGcd ext_gcd(i128 a, i128 b) {
    i128 old_r = a, r = b;
    i128 old_u = 1, u = 0;
    i128 old_v = 0, v = 1;
    while (r != 0) {
        i128 q = old_r / r;
        i128 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_u - q * u;
        old_u = u;
        u = t;
        t = old_v - q * v;
        old_v = v;
        v = t;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_u = -old_u;
        old_v = -old_v;
    }
    return {old_r, old_u, old_v};
}

/// Inverse of a modulo m (m > 1); throws not_coprime if gcd(a, m) != 1.
inline i128 inv_mod(i128 a, i128 m) {
    ExtGcd e = ext_gcd(mod_floor(a, m), m);
    if (e.g != 1) throw not_coprime("inv_mod: gcd(" + to_string(a) + ", " + to_string(m) + ") != 1");
    return mod_floor(e.u, m);
}

/// Floor of sqrt(n) for n >= 0 (exact integer result).
inline i128 isqrt(i128 n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    if (n == 0) return 0;
    auto sq_gt = [](i128 s, i128 m) {
        i128 r;
        if (__builtin_mul_overflow(s, s, &r)) return true;  // s^2 beyond range => > m
        return r > m;
    };
    i128 s = static_cast<i128>(__builtin_sqrtl(static_cast<long double>(n)));
    while (s > 0 && sq_gt(s, n)) --s;
    while (!sq_gt(s + 1, n)) ++s;
    return s;
}

inline bool is_square(i128 n, i128* root = nullptr) {
    if (n < 0) return false;
    i128 s = isqrt(n);
    if (s * s != n) return false;
    if (root) *root = s;
    return true;
}

/// base^e with overflow checking; e >= 0.
inline i128 checked_pow(i128 base, i64 e) {
    if (e < 0) throw std::domain_error("checked_pow: negative exponent");
    i128 r = 1;
    i128 b = base;
    while (e > 0) {
        if (e & 1) r = checked_mul(r, b);
        e >>= 1;
        if (e > 0) b = checked_mul(b, b);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Kronecker symbol and small prime utilities
// ---------------------------------------------------------------------------

/// Kronecker symbol (a | n), fully general (n may be even, zero, or negative).
inline int kronecker(i128 a, i128 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int res = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) res = -res;
    }
    // factor out twos of n: (a|2) = 0 if a even, +1 if a = +-1 (mod 8), -1 otherwise
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v != 0) {
        if ((a & 1) == 0) return 0;
        i128 a8 = mod_floor(a, 8);
        if ((v & 1) && (a8 == 3 || a8 == 5)) res = -res;
    }
    // now n odd and positive: Jacobi with reciprocity
    a = mod_floor(a, n);
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) {
            a >>= 1;
            ++v;
        }
        i128 n8 = n & 7;
        if ((v & 1) && (n8 == 3 || n8 == 5)) res = -res;
        if ((a & 3) == 3 && (n & 3) == 3) res = -res;
        i128 t = n % a;
        n = a;
        a = t;
    }
    return n == 1 ? res : 0;
}

inline bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (i64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> sieve(static_cast<std::size_t>(n) + 1, true);
    for (i64 p = 2; p <= n; ++p) {
        if (!sieve[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (i64 q = p * p; q <= n; q += p) sieve[static_cast<std::size_t>(q)] = false;
    }
    return out;
}

/// Prime factorization of n >= 1 by trial division, ascending primes.
inline std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n < 1) throw std::domain_error("factorize: n must be positive");
    std::vector<std::pair<i64, int>> out;
    for (i64 p = 2; p * p <= n; p == 2 ? p = 3 : p += 2) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_squarefree(i64 n) {
    if (n < 1) return false;
    for (auto [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

}  // namespace cmforms::arith

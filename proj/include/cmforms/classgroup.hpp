#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "cmforms/quadfield.hpp"

namespace cmforms::classgroup {

using arith::i128;
using arith::i64;
using quadfield::QuadField;
using quadfield::QuadInt;
using quadfield::SplitType;

// ---------------------------------------------------------------------------
// binary quadratic forms
// ---------------------------------------------------------------------------

/// Primitive positive definite binary quadratic form a x^2 + b xy + c y^2.
struct QuadForm {
    i64 a, b, c;

    i128 disc() const { return i128(b) * b - 4 * i128(a) * c; }
    i128 eval(i128 x, i128 y) const { return a * x * x + b * x * y + c * y * y; }
    std::array<i64, 3> key() const { return {a, b, c}; }
    bool operator==(const QuadForm& o) const = default;
    bool operator<(const QuadForm& o) const { return key() < o.key(); }
};

inline std::ostream& operator<<(std::ostream& os, const QuadForm& f) {
    return os << "(" << f.a << "," << f.b << "," << f.c << ")";
}

/// Principal form of discriminant -delta.
inline QuadForm identity_form(const QuadField& K) {
    const i64 D = K.delta();
    if (D % 2 != 0) return {1, 1, static_cast<i64>((1 + D) / 4)};
    return {1, 0, static_cast<i64>(D / 4)};
}

inline bool is_reduced(const QuadForm& f) {
    if (!(-f.a < f.b && f.b <= f.a && f.a <= f.c)) return false;
    if ((f.b == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

namespace detail {

struct Form128 {
    i128 a, b, c;
};

/// Shift b into (-a, a], adjusting c to keep the discriminant.
inline Form128 normalized128(Form128 f, i128 D) {
    if (f.a <= 0) throw std::domain_error("form must be positive definite");
    const i128 twoa = 2 * f.a;
    i128 b = arith::mod_floor(f.b, twoa);
    if (b > f.a) b -= twoa;
    i128 num = b * b + D;
    if (num % (4 * f.a) != 0) throw std::logic_error("normalize: discriminant broken");
    return {f.a, b, num / (4 * f.a)};
}

inline QuadForm reduce128(Form128 f, i128 D) {
    f = normalized128(f, D);
    while (f.a > f.c) f = normalized128({f.c, -f.b, f.a}, D);
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return {arith::to_i64(f.a, "form a"), arith::to_i64(f.b, "form b"),
            arith::to_i64(f.c, "form c")};
}

inline void require_primitive(const QuadForm& f) {
    if (arith::gcd128(f.a, arith::gcd128(f.b, f.c)) != 1)
        throw std::domain_error("form is not primitive");
}

}  // namespace detail

inline QuadForm reduce(const QuadForm& f) {
    i128 D = -f.disc();
    if (D <= 0) throw std::domain_error("reduce: discriminant must be negative");
    return detail::reduce128({f.a, f.b, f.c}, D);
}

/// Gauss composition of primitive forms of one discriminant; result reduced.
inline QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
    using namespace arith;
    if (f1.disc() != f2.disc()) throw discriminant_mismatch("compose: different discriminants");
    detail::require_primitive(f1);
    detail::require_primitive(f2);
    const i128 D = -f1.disc();
    const i128 s = (i128(f1.b) + f2.b) / 2;
    const ExtGcd e1 = ext_gcd(f1.a, f2.a);
    const ExtGcd e2 = ext_gcd(e1.g, s);
    const i128 d = e2.g;
    const i128 v = e1.v * e2.u;
    const i128 A = (f1.a / d) * (f2.a / d);
    const i128 B = f2.b + 2 * (f2.a / d) * (v * (s - f2.b) - e2.v * f2.c);
    return detail::reduce128({A, B, 0}, D);  // c recomputed by normalization
}

inline QuadForm form_inverse(const QuadForm& f) { return reduce({f.a, -f.b, f.c}); }

inline QuadForm form_pow(QuadForm f, i64 e) {
    const i64 D = arith::to_i64(-f.disc(), "discriminant");
    if (e < 0) {
        f = form_inverse(f);
        e = -e;
    }
    QuadForm r = (D % 2 != 0) ? QuadForm{1, 1, (1 + D) / 4} : QuadForm{1, 0, D / 4};
    QuadForm b = reduce(f);
    while (e > 0) {
        if (e & 1) r = compose(r, b);
        e >>= 1;
        if (e > 0) b = compose(b, b);
    }
    return r;
}

/// All reduced forms of discriminant -delta, sorted by (a, b, c).
inline std::vector<QuadForm> reduced_forms(const QuadField& K) {
    const i64 D = K.delta();
    std::vector<QuadForm> out;
    for (i64 b = K.sigma(); 3 * i128(b) * b <= D; b += 2) {
        const i128 m4 = i128(b) * b + D;
        if (m4 % 4 != 0) throw std::logic_error("reduced_forms: parity broken");
        const i128 m = m4 / 4;
        for (i64 a = std::max<i64>(b, 1); i128(a) * a <= m; ++a) {
            if (m % a != 0) continue;
            const i64 c = arith::to_i64(m / a, "form c");
            out.push_back({a, b, c});
            if (b > 0 && b < a && a < c) out.push_back({a, -b, c});
        }
    }
    for (const QuadForm& f : out) {
        if (!is_reduced(f)) throw std::logic_error("reduced_forms: enumeration error");
        detail::require_primitive(f);  // automatic for fundamental discriminants
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// ideals
// ---------------------------------------------------------------------------

/**
 * Integral ideal g * [a, t + theta] of O_K: content g >= 1 times the primitive
 * part with Z-basis {a, t + theta}, 0 <= t < a and a | N(t + theta).
 * Norm: g^2 * a.
 */
struct QuadIdeal {
    QuadField K;
    i128 g, a, t;

    i128 norm() const { return arith::checked_mul(arith::checked_mul(g, g), a); }
    QuadIdeal primitive_part() const { return {K, 1, a, t}; }
    bool operator==(const QuadIdeal& o) const {
        return K == o.K && g == o.g && a == o.a && t == o.t;
    }
};

inline std::ostream& operator<<(std::ostream& os, const QuadIdeal& I) {
    return os << arith::to_string(I.g) << "*[" << arith::to_string(I.a) << ", "
              << arith::to_string(I.t) << "+theta]";
}

inline QuadIdeal make_ideal(const QuadField& K, i128 g, i128 a, i128 t) {
    using namespace arith;
    if (g < 1 || a < 1) throw std::domain_error("make_ideal: g, a must be positive");
    t = mod_floor(t, a);
    const i128 nt = checked_add(checked_mul(t, checked_add(t, K.sigma())), K.theta_norm());
    if (nt % a != 0) throw std::domain_error("make_ideal: a does not divide N(t + theta)");
    return {K, g, a, t};
}

inline QuadIdeal unit_ideal(const QuadField& K) { return {K, 1, 1, 0}; }

inline QuadIdeal conj_ideal(const QuadIdeal& I) {
    return make_ideal(I.K, I.g, I.a, -I.t - I.K.sigma());
}

/// Does alpha lie in the ideal?
inline bool contains(const QuadIdeal& I, const QuadInt& alpha) {
    using namespace arith;
    if (I.K != alpha.field()) throw discriminant_mismatch("contains: different fields");
    auto [X, Y] = alpha.basis_coords();
    if (mod_floor(Y, I.g) != 0 || mod_floor(X, I.g) != 0) return false;
    return mod_floor(X / I.g - (Y / I.g) * I.t, I.a) == 0;
}

namespace detail {

/// Two-row HNF [A, B + C*theta] of the module spanned by (u_i, v_i) ~ u + v*theta.
struct Hnf {
    i128 A, B, C;
};

inline Hnf hnf_cols(std::vector<std::pair<i128, i128>> cols) {
    using namespace arith;
    i128 bu = 0, bv = 0;
    bool seeded = false;
    for (auto& [u, v] : cols) {
        if (v == 0) continue;
        if (!seeded) {
            bu = u;
            bv = v;
            seeded = true;
        } else {
            const ExtGcd e = ext_gcd(bv, v);
            const i128 nu = checked_add(checked_mul(e.u, bu), checked_mul(e.v, u));
            bu = nu;
            bv = e.g;
        }
    }
    if (!seeded) throw std::logic_error("hnf_cols: rank deficient");
    if (bv < 0) {
        bv = -bv;
        bu = -bu;
    }
    i128 A = 0;
    for (auto& [u, v] : cols) {
        const i128 cleared = checked_sub(u, checked_mul(v / bv, bu));
        A = gcd128(A, cleared);
    }
    if (A == 0) throw std::logic_error("hnf_cols: rank deficient");
    return {A, mod_floor(bu, A), bv};
}

}  // namespace detail

inline QuadIdeal ideal_mul(const QuadIdeal& I, const QuadIdeal& J) {
    using namespace arith;
    if (I.K != J.K) throw discriminant_mismatch("ideal_mul: different fields");
    const i128 nt = I.K.theta_norm();
    const int sg = I.K.sigma();
    std::vector<std::pair<i128, i128>> cols{
        {checked_mul(I.a, J.a), 0},
        {checked_mul(I.a, J.t), I.a},
        {checked_mul(J.a, I.t), J.a},
        {checked_sub(checked_mul(I.t, J.t), nt), checked_add(checked_add(I.t, J.t), sg)}};
    const detail::Hnf h = detail::hnf_cols(std::move(cols));
    if (h.C <= 0 || h.A % h.C != 0 || h.B % h.C != 0)
        throw std::logic_error("ideal_mul: product is not an ideal");
    if (checked_mul(h.A, h.C) != checked_mul(I.a, J.a))
        throw std::logic_error("ideal_mul: norm mismatch");
    return make_ideal(I.K, checked_mul(checked_mul(I.g, J.g), h.C), h.A / h.C, h.B / h.C);
}

inline QuadIdeal ideal_pow(const QuadIdeal& I, i64 e) {
    if (e < 0) throw std::domain_error("ideal_pow: negative exponent");
    QuadIdeal r = unit_ideal(I.K);
    QuadIdeal b = I;
    while (e > 0) {
        if (e & 1) r = ideal_mul(r, b);
        e >>= 1;
        if (e > 0) b = ideal_mul(b, b);
    }
    return r;
}

/// The degree-one prime ideal (p, b) above a non-inert prime p with smallest b >= 0.
inline QuadIdeal prime_ideal_above(const QuadField& K, i64 p) {
    using namespace arith;
    if (K.splitting(p) == SplitType::inert)
        throw inert_prime(std::to_string(p) + " is inert in Q(sqrt(-" +
                          std::to_string(K.delta()) + "))");
    for (i64 b = K.sigma(); b < 2 * p; b += 2)
        if (mod_floor(i128(b) * b + K.delta(), 4 * i128(p)) == 0)
            return make_ideal(K, 1, p, (b - K.sigma()) / 2);
    throw std::logic_error("prime_ideal_above: no square root found");
}

/// Does J divide I (equivalently, is I contained in J)?
inline bool ideal_divides(const QuadIdeal& J, const QuadIdeal& I) {
    using namespace arith;
    return contains(J, QuadInt::integer(I.K, checked_mul(I.g, I.a))) &&
           contains(J, QuadInt::from_basis(I.K, checked_mul(I.g, I.t), I.g));
}

/// Exact quotient I / P by a prime ideal P dividing I.
inline QuadIdeal ideal_div_prime(const QuadIdeal& I, const QuadIdeal& P) {
    if (!ideal_divides(P, I))
        throw exact_division_failure("ideal_div_prime: prime does not divide the ideal");
    if (P.a == 1) {  // inert rational prime (p), content P.g = p
        if (I.g % P.g != 0) throw std::logic_error("ideal_div_prime: content not divisible");
        return make_ideal(I.K, I.g / P.g, I.a, I.t);
    }
    const QuadIdeal q = ideal_mul(I, conj_ideal(P));  // = (I / P) * (p)
    if (q.g % P.a != 0) throw std::logic_error("ideal_div_prime: quotient not integral");
    return make_ideal(I.K, q.g / P.a, q.a, q.t);
}

struct IdealFactor {
    QuadIdeal prime;
    int e;
    i64 p;
    quadfield::SplitType type;
};

/// Prime ideal factorization; factors ordered by rational prime, then prime ideal.
inline std::vector<IdealFactor> factorize_ideal(const QuadIdeal& I) {
    using namespace arith;
    std::vector<IdealFactor> out;
    QuadIdeal J = I;
    for (auto [p, en] : factorize(to_i64(I.norm(), "ideal norm"))) {
        const SplitType st = I.K.splitting(p);
        if (st == SplitType::inert) {
            int e = 0;
            while (J.g % p == 0) {
                J = make_ideal(I.K, J.g / p, J.a, J.t);
                ++e;
            }
            if (e == 0 || J.a % p == 0 || 2 * e != en)
                throw std::logic_error("factorize_ideal: inert valuation broken");
            out.push_back({make_ideal(I.K, p, 1, 0), e, p, st});
            continue;
        }
        const QuadIdeal P = prime_ideal_above(I.K, p);
        for (const QuadIdeal& Q : {P, conj_ideal(P)}) {
            int e = 0;
            while (ideal_divides(Q, J)) {
                J = ideal_div_prime(J, Q);
                ++e;
            }
            if (e > 0) out.push_back({Q, e, p, st});
            if (st == SplitType::ramified) break;
        }
    }
    if (!(J == unit_ideal(I.K))) throw std::logic_error("factorize_ideal: leftover factor");
    QuadIdeal prod = unit_ideal(I.K);
    for (const auto& f : out) prod = ideal_mul(prod, ideal_pow(f.prime, f.e));
    if (!(prod == I)) throw std::logic_error("factorize_ideal: product mismatch");
    return out;
}

/// All ideal divisors of I, sorted by (norm, g, a, t).
inline std::vector<QuadIdeal> ideal_divisors(const QuadIdeal& I) {
    std::vector<QuadIdeal> divs{unit_ideal(I.K)};
    for (const auto& f : factorize_ideal(I)) {
        std::vector<QuadIdeal> next;
        QuadIdeal pw = unit_ideal(I.K);
        for (int j = 0; j <= f.e; ++j) {
            for (const auto& d : divs) next.push_back(ideal_mul(d, pw));
            if (j < f.e) pw = ideal_mul(pw, f.prime);
        }
        divs = std::move(next);
    }
    std::sort(divs.begin(), divs.end(), [](const QuadIdeal& x, const QuadIdeal& y) {
        return std::array<i128, 4>{x.norm(), x.g, x.a, x.t} <
               std::array<i128, 4>{y.norm(), y.g, y.a, y.t};
    });
    return divs;
}

/// Least common multiple (largest common divisor-wise exponents).
inline QuadIdeal ideal_lcm(const QuadIdeal& A, const QuadIdeal& B) {
    std::map<std::array<i128, 3>, std::pair<QuadIdeal, int>> merged;
    for (const auto& side : {factorize_ideal(A), factorize_ideal(B)})
        for (const auto& f : side) {
            auto [it, inserted] =
                merged.try_emplace({f.prime.g, f.prime.a, f.prime.t}, f.prime, f.e);
            if (!inserted) it->second.second = std::max(it->second.second, f.e);
        }
    QuadIdeal out = unit_ideal(A.K);
    for (const auto& [key, pe] : merged) out = ideal_mul(out, ideal_pow(pe.first, pe.second));
    return out;
}

/// Ideal generated by alpha != 0.
inline QuadIdeal principal_ideal(const QuadInt& alpha) {
    using namespace arith;
    if (alpha.is_zero()) throw std::domain_error("principal_ideal: zero element");
    const QuadField& K = alpha.field();
    auto [X, Y] = alpha.basis_coords();
    // columns alpha and alpha*theta = -Y*N(theta) + (X + Y*sigma)*theta
    std::vector<std::pair<i128, i128>> cols{
        {X, Y},
        {checked_neg(checked_mul(Y, K.theta_norm())), checked_add(X, checked_mul(Y, K.sigma()))}};
    const detail::Hnf h = detail::hnf_cols(std::move(cols));
    if (h.C <= 0 || h.A % h.C != 0 || h.B % h.C != 0)
        throw std::logic_error("principal_ideal: module is not an ideal");
    QuadIdeal I = make_ideal(K, h.C, h.A / h.C, h.B / h.C);
    if (I.norm() != alpha.norm()) throw std::logic_error("principal_ideal: norm mismatch");
    return I;
}

/**
 * Generator of a principal ideal, normalized to the lexicographically largest
 * associate by (x, y) (for the fields with only +-1 this is x > 0, ties y > 0).
 * Throws not_principal otherwise.
 */
inline QuadInt principal_generator(const QuadIdeal& I) {
    const QuadIdeal P = I.primitive_part();
    std::optional<QuadInt> found;
    for (const QuadInt& rep : quadfield::elements_of_norm(I.K, I.a)) {
        bool member = false;
        for (const QuadInt& assoc : rep.associates())
            if (contains(P, assoc)) {
                member = true;
                break;
            }
        if (!member) continue;
        if (found) throw std::logic_error("principal_generator: generator not unique");
        found = rep;  // orbit representative is already the canonical associate
    }
    if (!found) throw not_principal("ideal has no generator of matching norm");
    return found->mul_int(I.g);
}

// ---------------------------------------------------------------------------
// forms <-> ideals
// ---------------------------------------------------------------------------

/// Form (a, 2t + sigma, *) attached to the primitive part of the ideal.
inline QuadForm form_from_ideal(const QuadIdeal& I) {
    using namespace arith;
    const i64 a = to_i64(I.a, "ideal norm");
    const i64 b = to_i64(2 * I.t + I.K.sigma(), "form b");
    const i128 num = i128(b) * b + I.K.delta();
    if (num % (4 * i128(a)) != 0) throw std::logic_error("form_from_ideal: broken ideal");
    return {a, b, to_i64(num / (4 * a), "form c")};
}

/// Ideal [a, t + theta] attached to a form (a, b, c), t = (b - sigma)/2 mod a.
inline QuadIdeal ideal_from_form(const QuadField& K, const QuadForm& f) {
    if (f.disc() != -i128(K.delta()))
        throw discriminant_mismatch("ideal_from_form: wrong discriminant");
    return make_ideal(K, 1, f.a, (i128(f.b) - K.sigma()) / 2);
}

// ---------------------------------------------------------------------------
// representation search (small representative coprime to a modulus)
// ---------------------------------------------------------------------------

struct FormRep {
    i128 value;
    i64 x, y;
};

/**
 * Smallest value of the form at coprime (x, y) that is itself coprime to M;
 * deterministic tie-break by (x, y). Used to pick generator ideals whose norms
 * are coprime to 2*delta (and as small as possible).
 */
inline FormRep min_coprime_rep(const QuadForm& f, i128 M) {
    using namespace arith;
    const i128 D = -f.disc();
    const i128 denom = 4 * i128(std::max(f.a, f.c));
    std::optional<FormRep> best;
    for (i64 B = 8; B <= 4096; B *= 2) {
        for (i64 y = -B; y <= B; ++y)
            for (i64 x = -B; x <= B; ++x) {
                if (gcd128(x, y) != 1) continue;
                const i128 v = f.eval(x, y);
                if (gcd128(v, M) != 1) continue;
                if (!best || v < best->value ||
                    (v == best->value && std::pair(x, y) < std::pair(best->x, best->y))) {
                    best = FormRep{v, x, y};
                }
            }
        // values outside the box exceed D*B^2 / (4 max(a, c))
        if (best && best->value * denom <= D * i128(B) * B) return *best;
    }
    throw no_match("min_coprime_rep: no small representative found");
}

/// An ideal in the class of f whose norm is coprime to M (and small).
inline QuadIdeal coprime_ideal_in_class(const QuadField& K, const QuadForm& f, i128 M) {
    using namespace arith;
    const FormRep r = min_coprime_rep(f, M);
    const ExtGcd e = ext_gcd(r.x, r.y);  // e.u x + e.v y = 1
    // complete (x, y) to SL2: columns (x, y), (u, w) with x w - y u = 1
    const i128 u = -e.v, w = e.u;
    const i64 a2 = to_i64(r.value, "translated form a");
    const i128 b2 = 2 * i128(f.a) * r.x * u + i128(f.b) * (r.x * w + u * r.y) +
                    2 * i128(f.c) * r.y * w;
    QuadIdeal I = make_ideal(K, 1, a2, (b2 - K.sigma()) / 2);
    if (reduce(form_from_ideal(I)) != reduce(f))
        throw std::logic_error("coprime_ideal_in_class: wrong class");
    return I;
}

// ---------------------------------------------------------------------------
// class group
// ---------------------------------------------------------------------------

/**
 * Form class group of discriminant -delta: all reduced forms, the invariant
 * factor decomposition n_1 >= n_2 >= ... (n_{i+1} | n_i) with generator
 * classes, generator ideals coprime to 2*delta, and a full discrete-log table.
 */
struct ClassGroup {
    QuadField K;
    std::vector<QuadForm> forms;
    std::vector<i64> factors;
    std::vector<QuadForm> gen_forms;
    std::vector<QuadIdeal> gen_ideals;
    std::map<std::array<i64, 3>, std::vector<i64>> dlog;

    i64 h() const { return static_cast<i64>(forms.size()); }
    i64 exponent() const { return factors.empty() ? 1 : factors.front(); }

    const std::vector<i64>& discrete_log(const QuadForm& f) const {
        auto it = dlog.find(reduce(f).key());
        if (it == dlog.end())
            throw discriminant_mismatch("discrete_log: form not in this group");
        return it->second;
    }
    const std::vector<i64>& discrete_log(const QuadIdeal& I) const {
        return discrete_log(form_from_ideal(I));
    }
    bool is_principal_class(const QuadForm& f) const {
        for (i64 e : discrete_log(f))
            if (e != 0) return false;
        return true;
    }
};

namespace detail {

/// Multiplicative order of a reduced form, using the factored group size.
inline i64 form_order(const QuadForm& f, i64 h, const QuadForm& id) {
    i64 o = h;
    for (auto [p, e] : arith::factorize(h)) {
        (void)e;
        while (o % p == 0 && form_pow(f, o / p) == id) o /= p;
    }
    return o;
}

struct SylowBasis {
    std::vector<QuadForm> gens;
    std::vector<i64> orders;  // p-powers, non-increasing
};

/**
 * Basis of the Sylow p-subgroup S (greedy maximal-order choice with the
 * classical correction step, falling back to exhaustive search).
 * `pref` orders candidate forms (small preferred) for deterministic picks.
 */
inline SylowBasis sylow_basis(i64 p, const std::vector<QuadForm>& S, const QuadForm& id,
                              const std::map<std::array<i64, 3>, i64>& ord,
                              const std::vector<QuadForm>& pref) {
    SylowBasis out;
    std::vector<std::pair<QuadForm, std::vector<i64>>> span{{id, {}}};
    auto span_key = [&](const QuadForm& f) {
        for (const auto& [sf, vec] : span)
            if (sf == f) return std::optional<std::vector<i64>>(vec);
        return std::optional<std::vector<i64>>();
    };
    auto quotient_order = [&](const QuadForm& f) {
        QuadForm x = f;
        i64 q = 1;
        while (!span_key(x)) {
            x = form_pow(x, p);
            q *= p;
        }
        return q;
    };
    while (static_cast<i64>(span.size()) < static_cast<i64>(S.size())) {
        QuadForm best = id;
        i64 bestq = 1;
        for (const QuadForm& f : pref) {
            const i64 q = quotient_order(f);
            if (q > bestq) {
                bestq = q;
                best = f;
            }
        }
        if (bestq <= 1) throw std::logic_error("sylow_basis: no progress");
        const i64 t = bestq;
        std::optional<QuadForm> ghat;
        // correction: write best^t over the current basis and divide out t-th parts
        const std::vector<i64> c = *span_key(form_pow(best, t));
        bool divisible = true;
        for (i64 cj : c)
            if (cj % t != 0) divisible = false;
        if (divisible) {
            QuadForm adj = best;
            for (std::size_t j = 0; j < c.size(); ++j)
                adj = compose(adj, form_pow(form_inverse(out.gens[j]), c[j] / t));
            if (form_pow(adj, t) == id && quotient_order(adj) == t) ghat = adj;
        }
        if (!ghat) {
            for (const QuadForm& f2 : pref) {
                if (ord.at(f2.key()) != t) continue;
                if (quotient_order(f2) == t) {
                    ghat = f2;
                    break;
                }
            }
        }
        if (!ghat) throw std::logic_error("sylow_basis: no independent generator");
        out.gens.push_back(*ghat);
        out.orders.push_back(t);
        std::vector<std::pair<QuadForm, std::vector<i64>>> bigger;
        QuadForm pw = id;
        for (i64 e2 = 0; e2 < t; ++e2) {
            for (const auto& [sf, vec] : span) {
                std::vector<i64> nv = vec;
                nv.push_back(e2);
                bigger.emplace_back(compose(sf, pw), std::move(nv));
            }
            if (e2 + 1 < t) pw = compose(pw, *ghat);
        }
        std::set<std::array<i64, 3>> keys;
        for (const auto& [sf, vec] : bigger) keys.insert(sf.key());
        if (keys.size() != bigger.size())
            throw std::logic_error("sylow_basis: span extension collided");
        span = std::move(bigger);
    }
    for (std::size_t i = 1; i < out.orders.size(); ++i)
        if (out.orders[i] > out.orders[i - 1])
            throw std::logic_error("sylow_basis: orders not sorted");
    return out;
}

}  // namespace detail

inline ClassGroup build_group(const QuadField& K) {
    using namespace arith;
    ClassGroup G{K, reduced_forms(K), {}, {}, {}, {}};
    const QuadForm id = identity_form(K);
    const i64 h = G.h();
    if (h == 1) {
        G.dlog[id.key()] = {};
        return G;
    }

    // per-class data: orders and preferred (small coprime norm) ordering
    std::map<std::array<i64, 3>, i64> ord;
    for (const QuadForm& f : G.forms) ord[f.key()] = detail::form_order(f, h, id);
    std::map<std::array<i64, 3>, i128> prefval;
    for (const QuadForm& f : G.forms)
        prefval[f.key()] = min_coprime_rep(f, 2 * i128(K.delta())).value;

    // Sylow decompositions, combined into invariant factors
    std::vector<detail::SylowBasis> parts;
    for (auto [p, e] : factorize(h)) {
        i64 pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        std::vector<QuadForm> S, pref;
        for (const QuadForm& f : G.forms) {
            i64 o = ord[f.key()];
            bool ppow = true;
            while (o > 1) {
                if (o % p != 0) {
                    ppow = false;
                    break;
                }
                o /= p;
            }
            if (ppow) S.push_back(f);
        }
        if (static_cast<i64>(S.size()) != pe)
            throw std::logic_error("build_group: Sylow subgroup size mismatch");
        pref = S;
        std::sort(pref.begin(), pref.end(), [&](const QuadForm& x, const QuadForm& y) {
            if (prefval[x.key()] != prefval[y.key()])
                return prefval[x.key()] < prefval[y.key()];
            return x < y;
        });
        parts.push_back(detail::sylow_basis(p, S, id, ord, pref));
    }
    std::size_t rank = 0;
    for (const auto& part : parts) rank = std::max(rank, part.gens.size());
    for (std::size_t i = 0; i < rank; ++i) {
        i64 n = 1;
        QuadForm gen = id;
        for (const auto& part : parts)
            if (i < part.gens.size()) {
                n = checked_mul(n, part.orders[i]);
                gen = compose(gen, part.gens[i]);
            }
        G.factors.push_back(n);
        G.gen_forms.push_back(gen);
    }
    i64 prod = 1;
    for (std::size_t i = 0; i < G.factors.size(); ++i) {
        prod = checked_mul(prod, G.factors[i]);
        if (detail::form_order(G.gen_forms[i], h, id) != G.factors[i])
            throw std::logic_error("build_group: generator order mismatch");
        if (i + 1 < G.factors.size() && G.factors[i] % G.factors[i + 1] != 0)
            throw std::logic_error("build_group: invariant factors not a divisor chain");
    }
    if (prod != h) throw std::logic_error("build_group: factor product != h");

    // discrete logarithm table: enumerate all generator power products
    std::vector<std::pair<QuadForm, std::vector<i64>>> all{{id, {}}};
    for (std::size_t i = 0; i < G.factors.size(); ++i) {
        std::vector<std::pair<QuadForm, std::vector<i64>>> next;
        QuadForm pw = id;
        for (i64 e = 0; e < G.factors[i]; ++e) {
            for (const auto& [f, vec] : all) {
                std::vector<i64> nv = vec;
                nv.push_back(e);
                next.emplace_back(compose(f, pw), std::move(nv));
            }
            if (e + 1 < G.factors[i]) pw = compose(pw, G.gen_forms[i]);
        }
        all = std::move(next);
    }
    for (auto& [f, vec] : all) G.dlog.emplace(f.key(), std::move(vec));
    if (static_cast<i64>(G.dlog.size()) != h)
        throw std::logic_error("build_group: generators do not span the group");

    // generator ideals with norm coprime to 2*delta
    for (const QuadForm& f : G.gen_forms)
        G.gen_ideals.push_back(coprime_ideal_in_class(K, f, 2 * i128(K.delta())));
    return G;
}

}  // namespace cmforms::classgroup

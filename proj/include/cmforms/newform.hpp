#pragma once
// Newforms attached to the Hecke characters: weight/level/nebentypus data,
// q-expansion coefficients via the Euler recurrence, a direct ideal-sum
// oracle for the same coefficients, sign calibration against coefficient
// tables, and conductor/level bound checks.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cmforms/heckechar.hpp"

namespace cmforms::newform {

using arith::i128;
using arith::i64;
using classgroup::QuadIdeal;
using heckechar::HeckeChar;
using quadfield::QuadField;
using quadfield::QuadInt;
using quadfield::SplitType;

/// Nebentypus descriptor: trivial for even weight, otherwise the quadratic
/// character attached to the imaginary quadratic field.
struct Nebentypus {
    bool trivial;
    i64 chi_disc;  // -Delta when nontrivial, 0 otherwise
};

struct NewformData {
    i64 weight;
    i64 level;
    Nebentypus nebentypus;
    i64 cm_disc;              // -Delta
    std::vector<i64> coeffs;  // coeffs[n] = a_n; index 0 unused
};

inline std::pair<i64, Nebentypus> level_nebentypus(const HeckeChar& psi) {
    const i64 weight = psi.l + 1;
    const i64 level = arith::to_i64(i128(psi.K.delta()) * psi.cond.norm(), "level");
    if (weight % 2 == 0) return {level, Nebentypus{true, 0}};
    return {level, Nebentypus{false, -psi.K.delta()}};
}

namespace detail {

/// Doubled coordinates (x, y) with y = 0 encode the rational integer x/2.
inline i64 rational_value(const QuadInt& v, const char* what) {
    if (v.y() != 0 || v.x() % 2 != 0) throw std::logic_error(std::string(what) + ": not rational");
    return arith::to_i64(v.x() / 2, what);
}

}  // namespace detail

/// a_p = sum of psi over the prime ideals of norm p (psi extended by zero):
/// the trace of psi at a split prime, the (rational) value at a ramified
/// prime, and zero at an inert prime.
inline i64 coefficient_ap(const HeckeChar& psi, i64 p) {
    const SplitType st = psi.K.splitting(p);
    if (st == SplitType::inert) return 0;
    const QuadIdeal P = classgroup::prime_ideal_above(psi.K, p);
    QuadInt total = heckechar::evaluate(psi, P);
    if (st == SplitType::split)
        total = total + heckechar::evaluate(psi, classgroup::conj_ideal(P));
    return detail::rational_value(total, "coefficient_ap");
}

/// Oracle path: a_n as the literal sum of psi over every ideal of norm n.
inline i64 direct_coefficient(const HeckeChar& psi, i64 n) {
    if (n < 1) throw std::domain_error("direct_coefficient: n must be positive");
    const QuadField& K = psi.K;
    std::vector<QuadIdeal> products{classgroup::unit_ideal(K)};
    for (const auto& [p, e] : arith::factorize(n)) {
        std::vector<QuadIdeal> part;
        const SplitType st = K.splitting(p);
        if (st == SplitType::inert) {
            if (e % 2 != 0) return 0;  // no ideal of odd inert norm exponent
            part.push_back(classgroup::principal_ideal(
                QuadInt::integer(K, arith::to_i64(arith::checked_pow(p, e / 2), "p^e"))));
        } else {
            const QuadIdeal P = classgroup::prime_ideal_above(K, p);
            if (st == SplitType::ramified) {
                part.push_back(classgroup::ideal_pow(P, e));
            } else {
                const QuadIdeal Pbar = classgroup::conj_ideal(P);
                for (i64 j = 0; j <= e; ++j)
                    part.push_back(classgroup::ideal_mul(classgroup::ideal_pow(P, j),
                                                         classgroup::ideal_pow(Pbar, e - j)));
            }
        }
        std::vector<QuadIdeal> next;
        for (const QuadIdeal& a : products)
            for (const QuadIdeal& b : part) next.push_back(classgroup::ideal_mul(a, b));
        products = std::move(next);
    }
    QuadInt total = QuadInt::zero(K);
    for (const QuadIdeal& I : products) total = total + heckechar::evaluate(psi, I);
    return detail::rational_value(total, "direct_coefficient");
}

/// Coefficients a_1..a_nmax from the prime values via the Euler recurrence
///   a_{p^{r+1}} = a_p a_{p^r} - eps(p) p^{k-1} a_{p^{r-1}}
/// and multiplicativity, where eps is the nebentypus (zero at p | level).
inline NewformData q_expansion(const HeckeChar& psi, i64 nmax) {
    if (nmax < 1) throw std::domain_error("q_expansion: nmax must be positive");
    const auto [level, neb] = level_nebentypus(psi);
    const i64 k = psi.l + 1;
    NewformData nf{k, level, neb, -psi.K.delta(), std::vector<i64>(nmax + 1, 0)};
    nf.coeffs[1] = 1;
    std::vector<i64> spf(nmax + 1, 0);  // smallest prime factor
    for (i64 p : arith::primes_up_to(nmax))
        for (i64 m = p; m <= nmax; m += p)
            if (spf[m] == 0) spf[m] = p;
    for (i64 n = 2; n <= nmax; ++n) {
        const i64 p = spf[n];
        i64 pe = p, m = n / p;
        while (m % p == 0) {
            pe *= p;
            m /= p;
        }
        if (m != 1) {  // multiplicative split into coprime parts
            nf.coeffs[n] = arith::to_i64(i128(nf.coeffs[pe]) * nf.coeffs[m], "a_n");
            continue;
        }
        if (n == p) {
            nf.coeffs[n] = coefficient_ap(psi, p);
            continue;
        }
        const i64 eps = level % p == 0 ? 0
                        : k % 2 == 0  ? 1
                                      : static_cast<i64>(arith::kronecker(-psi.K.delta(), p));
        const i128 t = i128(nf.coeffs[p]) * nf.coeffs[n / p] -
                       i128(eps) * arith::checked_pow(p, k - 1) * nf.coeffs[n / (p * p)];
        nf.coeffs[n] = arith::to_i64(t, "a_n");
    }
    return nf;
}

struct Calibration {
    std::vector<int> signs;  // one entry per even invariant factor
    int matches;             // number of sign vectors reproducing the targets
};

/// Exhaustive search over the 2^t sign vectors for the one whose prime
/// coefficients match the targets (pairs (p, a_p)). Flipping sign i
/// multiplies a_p by (-1)^{k_i} where k is the discrete log of a prime
/// above p, so all candidates are cheap sign patterns over the all-plus
/// coefficients. The count of matching vectors reports uniqueness up to
/// vectors acting trivially on the listed primes.
inline Calibration calibrate_signs(const QuadField& K, i64 l,
                                   const std::vector<std::pair<i64, i64>>& targets) {
    const HeckeChar base = heckechar::build_canonical(K, l);
    std::vector<std::size_t> eidx;
    for (std::size_t i = 0; i < base.G.factors.size(); ++i)
        if (base.G.factors[i] % 2 == 0) eidx.push_back(i);
    const std::size_t t = eidx.size();

    struct Entry {
        i64 want;
        i64 base_ap;
        unsigned parity;  // dlog parity bits over the even factors
    };
    std::vector<Entry> entries;
    for (const auto& [p, want] : targets) {
        Entry e{want, coefficient_ap(base, p), 0};
        if (e.base_ap != 0 && t > 0) {
            const QuadIdeal P = classgroup::prime_ideal_above(K, p);
            const auto& dl = base.G.discrete_log(P);
            for (std::size_t j = 0; j < t; ++j)
                if (dl[eidx[j]] % 2 != 0) e.parity |= 1u << j;
        }
        entries.push_back(e);
    }

    Calibration out{{}, 0};
    for (unsigned mask = 0; mask < (1u << t); ++mask) {
        bool ok = true;
        for (const Entry& e : entries) {
            const int flip = __builtin_popcount(mask & e.parity) % 2 == 0 ? 1 : -1;
            if (e.base_ap * flip != e.want) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (out.matches == 0)
            for (std::size_t j = 0; j < t; ++j) out.signs.push_back(mask & (1u << j) ? -1 : +1);
        ++out.matches;
    }
    if (out.matches == 0) throw no_match("calibrate_signs: no sign vector matches the targets");
    return out;
}

namespace detail {

/// Allowed conductor exponents e at a prime above p, by field class,
/// ramification, and infinity-type parity. Cells marked impossible in the
/// classification return false for every e > -1, including e = 0.
inline bool cond_exponent_allowed(i64 delta, i64 l, i64 p, bool ramified, i64 e) {
    const bool lodd = l % 2 != 0;
    if (p != 2) {
        if (ramified) {
            if (delta == 3) return lodd ? (e == 1 || e == 2 || e == 4) : (e == 0 || e == 2 || e == 4);
            return lodd ? e == 1 : e == 0;
        }
        return e == 0 || e == 1;
    }
    if (delta % 2 != 0) {  // 2 unramified
        if (delta == 3) return e >= 0 && e <= 3;
        return e == 0 || e == 2 || e == 3;
    }
    if (delta % 8 == 4) {  // 4 exactly divides Delta
        if (delta == 4) return lodd ? (e == 3 || e == 4 || e == 6) : (e == 0 || e == 2 || e == 4 || e == 6);
        return lodd ? false : (e == 0 || e == 4);
    }
    // 8 divides Delta
    return lodd ? e == 5 : (e == 0 || e == 2);
}

}  // namespace detail

struct BoundsReport {
    i64 ramanujan_checked = 0;                        // primes passing the coefficient bound
    std::vector<std::pair<i64, i64>> cond_exponents;  // (p, exponent at a prime above p)
};

/// Checks (i) the coefficient bound |a_p| <= 2 p^{(k-1)/2} at good primes,
/// (ii) the level exponent bounds e_2 <= 8, e_3 <= 5, e_p <= 2 for even
/// weight, and (iii) that every conductor exponent lies in its allowed cell.
inline BoundsReport check_bounds(const HeckeChar& psi, const NewformData& nf) {
    BoundsReport rep;
    const i64 nmax = static_cast<i64>(nf.coeffs.size()) - 1;
    for (i64 p : arith::primes_up_to(nmax)) {
        if (nf.level % p == 0) continue;
        const i128 lhs = i128(nf.coeffs[p]) * nf.coeffs[p];
        const i128 rhs = 4 * arith::checked_pow(p, nf.weight - 1);
        if (lhs > rhs)
            throw bound_violation("coefficient bound exceeded at p = " + std::to_string(p));
        ++rep.ramanujan_checked;
    }
    if (nf.weight % 2 == 0)
        for (const auto& [p, e] : arith::factorize(nf.level)) {
            const i64 cap = p == 2 ? 8 : p == 3 ? 5 : 2;
            if (e > cap)
                throw bound_violation("level exponent bound exceeded at p = " + std::to_string(p));
        }
    const i64 delta = psi.K.delta();
    const auto fac = classgroup::factorize_ideal(psi.cond);
    // every prime of the conductor, plus every ramified prime with exponent 0
    std::vector<std::pair<i64, bool>> to_check;  // (p, ramified)
    auto listed = [&](i64 p) {
        for (const auto& pr : to_check)
            if (pr.first == p) return true;
        return false;
    };
    for (const auto& f : fac)
        if (!listed(f.p)) to_check.emplace_back(f.p, f.type == quadfield::SplitType::ramified);
    for (const auto& [p, e] : arith::factorize(delta))
        if (!listed(p)) to_check.emplace_back(p, true);
    for (const auto& [p, ramified] : to_check) {
        i64 e = 0;
        for (const auto& f : fac)
            if (f.p == p) {
                e = f.e;
                // conjugate exponents must agree at split primes
                for (const auto& g : fac)
                    if (g.p == p && g.e != e)
                        throw bound_violation("conjugate conductor exponents differ at p = " +
                                              std::to_string(p));
                break;
            }
        if (!detail::cond_exponent_allowed(delta, psi.l, p, ramified, e))
            throw bound_violation("conductor exponent " + std::to_string(e) +
                                  " not allowed at p = " + std::to_string(p));
        rep.cond_exponents.emplace_back(p, e);
    }
    return rep;
}

}  // namespace cmforms::newform

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmforms/classgroup.hpp"

namespace cmforms::heckechar {

using arith::i128;
using arith::i64;
using classgroup::ClassGroup;
using classgroup::IdealFactor;
using classgroup::QuadIdeal;
using quadfield::QuadField;
using quadfield::QuadInt;

// ---------------------------------------------------------------------------
// unit characters (finite-order part on residues)
// ---------------------------------------------------------------------------

/// Residue of alpha in the standard box of the modulus M = g[a, t+theta]:
/// Y' = Y mod g, X' = (X - k*g*t) mod g*a where k clears the theta part.
inline std::pair<i64, i64> box_residue(const QuadIdeal& M, const QuadInt& alpha) {
    using namespace arith;
    auto [X, Y] = alpha.basis_coords();
    const i128 A = checked_mul(M.g, M.a), B = checked_mul(M.g, M.t), C = M.g;
    const i128 Yr = mod_floor(Y, C);
    const i128 Xr = mod_floor(X - ((Y - Yr) / C) * B, A);
    return {to_i64(Xr, "box residue X"), to_i64(Yr, "box residue Y")};
}

/**
 * Root-of-unity valued character on residues coprime to a modulus.
 * - trivial: identically 1
 * - chi_residue: alpha -> chi_K(r(alpha)) through the rational residue embedding
 * - table: explicit values on the box residues of `modulus`
 */
struct UnitChar {
    enum class Kind { trivial, chi_residue, table };
    Kind kind = Kind::trivial;
    std::optional<QuadIdeal> modulus;
    std::map<std::pair<i64, i64>, QuadInt> values;
};

inline QuadInt eta_value(const UnitChar& eta, const QuadInt& alpha) {
    const QuadField& K = alpha.field();
    switch (eta.kind) {
        case UnitChar::Kind::trivial:
            return QuadInt::integer(K, 1);
        case UnitChar::Kind::chi_residue: {
            const int c = K.chi(quadfield::residue_embedding(alpha));
            if (c == 0) throw not_coprime("eta_value: residue not coprime");
            return QuadInt::integer(K, c);
        }
        case UnitChar::Kind::table: {
            const auto it = eta.values.find(box_residue(*eta.modulus, alpha));
            if (it == eta.values.end())
                throw not_coprime("eta_value: residue not coprime to the modulus");
            return it->second;
        }
    }
    throw std::logic_error("eta_value: bad kind");
}

/// All box residues of M coprime to M (factorization of M supplied by caller).
inline std::vector<QuadInt> coprime_box_residues(const QuadIdeal& M,
                                                 const std::vector<IdealFactor>& fac) {
    using namespace arith;
    std::vector<QuadInt> out;
    for (i128 Y = 0; Y < M.g; ++Y)
        for (i128 X = 0; X < checked_mul(M.g, M.a); ++X) {
            const QuadInt alpha = QuadInt::from_basis(M.K, X, Y);
            bool coprime = true;
            for (const auto& f : fac)
                if (classgroup::contains(f.prime, alpha)) {
                    coprime = false;
                    break;
                }
            if (coprime) out.push_back(alpha);
        }
    return out;
}

struct MinimizeResult {
    QuadIdeal cond;
    UnitChar eta;
};

/**
 * Conductor of a unit character defined modulo Mw: the smallest ideal divisor
 * m of Mw with eta trivial on residues congruent to 1 mod m, together with the
 * character rewritten modulo that conductor.
 */
inline MinimizeResult minimize(const QuadField& K, const QuadIdeal& Mw, const UnitChar& etaw) {
    const QuadInt one = QuadInt::integer(K, 1);
    const auto fac = classgroup::factorize_ideal(Mw);
    const auto residues = coprime_box_residues(Mw, fac);
    if (!(eta_value(etaw, one) == one)) throw std::logic_error("minimize: eta(1) != 1");

    std::optional<QuadIdeal> cond;
    for (const QuadIdeal& d : classgroup::ideal_divisors(Mw)) {  // ascending norm
        bool ok = true;
        for (const QuadInt& b : residues)
            if (classgroup::contains(d, b - one) && !(eta_value(etaw, b) == one)) {
                ok = false;
                break;
            }
        if (ok) {
            cond = d;
            break;
        }
    }
    if (!cond) throw std::logic_error("minimize: no admissible modulus");  // Mw always works
    if (*cond == Mw) return {*cond, etaw};
    if (*cond == classgroup::unit_ideal(K)) return {*cond, UnitChar{}};

    UnitChar out{UnitChar::Kind::table, *cond, {}};
    for (const QuadInt& b : residues) {
        const QuadInt v = eta_value(etaw, b);
        const auto [it, inserted] = out.values.emplace(box_residue(*cond, b), v);
        if (!inserted && !(it->second == v))
            throw std::logic_error("minimize: character not defined modulo the conductor");
    }
    // coverage: every residue coprime to the conductor received a value
    const auto cfac = classgroup::factorize_ideal(*cond);
    for (const QuadInt& rho : coprime_box_residues(*cond, cfac))
        if (out.values.find(box_residue(*cond, rho)) == out.values.end())
            throw std::logic_error("minimize: residue not covered");
    return {*cond, out};
}

// ---------------------------------------------------------------------------
// canonical Hecke characters
// ---------------------------------------------------------------------------

/**
 * Hecke character psi of infinity type l: psi((alpha)) = eta(alpha) * alpha^l
 * on principal ideals coprime to the conductor, extended to all coprime ideals
 * by chosen roots psi_gen[i] on generator ideals gens[i] of the class group
 * (psi_gen[i]^{n_i} = psi(gens[i]^{n_i}) = psi_gen_pow[i]).
 */
struct HeckeChar {
    QuadField K;
    i64 l;
    ClassGroup G;
    std::vector<QuadIdeal> gens;
    QuadIdeal cond;
    std::vector<IdealFactor> cond_factors;
    UnitChar eta;
    std::vector<QuadInt> psi_gen;
    std::vector<QuadInt> psi_gen_pow;
    std::vector<int> signs;  // applied choice per even invariant factor
};

namespace detail {

inline bool is_special(i64 delta) { return delta == 3 || delta == 4 || delta == 8; }

/// Working modulus for the unit character of the three one-class fields with
/// extra units / even ramification: (3), (2+2i), (4*sqrt(-2)).
inline QuadIdeal special_modulus(const QuadField& K) {
    switch (K.delta()) {
        case 3: return classgroup::make_ideal(K, 3, 1, 0);
        case 4: return classgroup::make_ideal(K, 2, 2, 1);
        case 8: return classgroup::make_ideal(K, 4, 2, 0);
        default: throw std::logic_error("special_modulus: not a special field");
    }
}

/// Unit character of the infinity-type-1 base character psi_1: the unique
/// unit u(alpha) with u(alpha)*alpha = 1 in the residue ring (delta 3, 4), or
/// the quadratic character on (X mod 8, Y mod 4) pinned by psi_1 (delta 8).
inline UnitChar base_unit_char(const QuadField& K) {
    const QuadIdeal M = special_modulus(K);
    UnitChar eps{UnitChar::Kind::table, M, {}};
    if (K.delta() == 8) {
        static constexpr int kTable[4][4] = {
            {+1, -1, -1, -1},  // X = 1
            {+1, -1, -1, -1},  // X = 3
            {-1, +1, +1, +1},  // X = 5
            {-1, +1, +1, +1},  // X = 7
        };
        for (i64 X = 1; X < 8; X += 2)
            for (i64 Y = 0; Y < 4; ++Y)
                eps.values.emplace(std::pair{X, Y},
                                   QuadInt::integer(K, kTable[(X - 1) / 2][Y]));
        return eps;
    }
    const QuadInt one = QuadInt::integer(K, 1);
    const auto fac = classgroup::factorize_ideal(M);
    for (const QuadInt& rho : coprime_box_residues(M, fac)) {
        std::optional<QuadInt> match;
        for (const QuadInt& u : quadfield::units(K))
            if (classgroup::contains(M, u * rho - one)) {
                if (match) throw std::logic_error("base_unit_char: normalizing unit not unique");
                match = u;
            }
        if (!match) throw std::logic_error("base_unit_char: no normalizing unit");
        eps.values.emplace(box_residue(M, rho), *match);
    }
    return eps;
}

}  // namespace detail

/**
 * The canonical character of infinity type l >= 1, with an optional sign
 * choice (+1 / -1) for each even invariant factor of the class group.
 * Throws exponent_mismatch unless the class group exponent divides l.
 */
inline HeckeChar build_canonical(const QuadField& K, i64 l, const std::vector<int>& signs = {}) {
    using namespace arith;
    if (l < 1) throw std::domain_error("infinity type must be positive");
    ClassGroup G = classgroup::build_group(K);
    if (l % G.exponent() != 0)
        throw exponent_mismatch("class group exponent " + std::to_string(G.exponent()) +
                                " of discriminant -" + std::to_string(K.delta()) +
                                " does not divide infinity type " + std::to_string(l));
    std::size_t even_count = 0;
    for (i64 n : G.factors)
        if (n % 2 == 0) ++even_count;
    if (!signs.empty() && signs.size() != even_count)
        throw std::domain_error("expected one sign per even invariant factor (" +
                                std::to_string(even_count) + ")");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::domain_error("signs must be +1 or -1");

    QuadIdeal cond = classgroup::unit_ideal(K);
    UnitChar eta;
    if (detail::is_special(K.delta())) {
        const QuadIdeal Mw = detail::special_modulus(K);
        const UnitChar eps = detail::base_unit_char(K);
        UnitChar etaw{UnitChar::Kind::table, Mw, {}};
        for (const auto& [key, u] : eps.values) etaw.values.emplace(key, u.pow(l));
        MinimizeResult m = minimize(K, Mw, etaw);
        cond = m.cond;
        eta = std::move(m.eta);
    } else if (l % 2 == 1) {
        // sqrt(-delta) generates the product of the odd ramified primes
        cond = classgroup::make_ideal(K, 1, K.delta(), -(1 + K.delta()) / 2);
        eta = UnitChar{UnitChar::Kind::chi_residue, cond, {}};
    }

    HeckeChar psi{K,   l,  std::move(G), {}, cond, classgroup::factorize_ideal(cond),
                  eta, {}, {},           {}};
    psi.gens = psi.G.gen_ideals;
    std::size_t sign_idx = 0;
    for (std::size_t i = 0; i < psi.G.factors.size(); ++i) {
        const i64 n = psi.G.factors[i];
        if (l % n != 0) throw std::logic_error("build_canonical: factor does not divide l");
        const QuadInt alpha =
            classgroup::principal_generator(classgroup::ideal_pow(psi.gens[i], n));
        const QuadInt eta_a = eta_value(psi.eta, alpha);
        const QuadInt target = eta_a * alpha.pow(l);  // psi(gens[i]^n)
        QuadInt root = (eta_a * alpha).pow(l / n);
        if (!(root.pow(n) == target))
            throw root_not_found("no canonical root of psi on a generator ideal");
        if (n % 2 == 0) {
            const int s = signs.empty() ? 1 : signs[sign_idx];
            ++sign_idx;
            root = root.mul_int(s);
            psi.signs.push_back(s);
        }
        psi.psi_gen.push_back(root);
        psi.psi_gen_pow.push_back(target);
    }
    return psi;
}

/// psi evaluated on an integral ideal, tacitly extended by zero on ideals
/// sharing a prime with the conductor.
inline QuadInt evaluate(const HeckeChar& psi, const QuadIdeal& I) {
    using namespace arith;
    if (!(I.K == psi.K)) throw discriminant_mismatch("evaluate: ideal from another field");
    for (const auto& f : psi.cond_factors)
        if (classgroup::ideal_divides(f.prime, I)) return QuadInt::zero(psi.K);
    const auto& k = psi.G.discrete_log(I);
    QuadIdeal B = I;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const i64 e = (psi.G.factors[i] - k[i]) % psi.G.factors[i];
        if (e > 0) B = classgroup::ideal_mul(B, classgroup::ideal_pow(psi.gens[i], e));
    }
    const QuadInt beta = classgroup::principal_generator(B);
    QuadInt val = eta_value(psi.eta, beta) * beta.pow(psi.l);
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k[i] > 0) val = (val * psi.psi_gen[i].pow(k[i])).div_exact(psi.psi_gen_pow[i]);
    if (val.norm() != checked_pow(I.norm(), psi.l))
        throw std::logic_error("evaluate: norm mismatch");
    return val;
}

/// The minimal modulus of psi (already minimized at construction).
inline const QuadIdeal& conductor_of(const HeckeChar& psi) { return psi.cond; }

/// Is d a fundamental discriminant (of either sign)? d = 1 counts.
inline bool is_fundamental_discriminant(i64 d) {
    if (d == 1) return true;
    if (d == 0) return false;
    if (d < 0) return QuadField::is_fundamental(-d);
    if (d % 4 == 1) return arith::is_squarefree(d);
    if (d % 4 == 0) {
        const i64 m = d / 4;
        return (m % 4 == 2 || m % 4 == 3) && arith::is_squarefree(m);
    }
    return false;
}

/**
 * Twist by the quadratic character attached to a fundamental discriminant d:
 * psi'(a) = kronecker(d, N(a)) * psi(a), with the conductor re-minimized and
 * generator ideals re-selected coprime to 2 * delta * |d|.
 */
inline HeckeChar twist(const HeckeChar& psi, i64 d) {
    using namespace arith;
    if (!is_fundamental_discriminant(d))
        throw std::domain_error("twist: not a fundamental discriminant");
    if (d == 1) return psi;
    const QuadField& K = psi.K;
    const i64 ad = d < 0 ? -d : d;
    const QuadIdeal Mw =
        classgroup::ideal_lcm(psi.cond, classgroup::make_ideal(K, ad, 1, 0));
    const auto fac = classgroup::factorize_ideal(Mw);
    UnitChar etaw{UnitChar::Kind::table, Mw, {}};
    for (const QuadInt& rho : coprime_box_residues(Mw, fac)) {
        const int chi = static_cast<int>(kronecker(d, rho.norm()));
        if (chi == 0) throw std::logic_error("twist: coprime residue with chi = 0");
        etaw.values.emplace(box_residue(Mw, rho), eta_value(psi.eta, rho).mul_int(chi));
    }
    MinimizeResult m = minimize(K, Mw, etaw);

    HeckeChar out{K,           psi.l, psi.G, {}, m.cond, classgroup::factorize_ideal(m.cond),
                  std::move(m.eta),   {},    {}, {}};
    const i128 M2 =
        checked_mul(checked_mul(checked_mul(i128(2), K.delta()), ad), psi.cond.norm());
    for (std::size_t i = 0; i < out.G.factors.size(); ++i) {
        const i64 n = out.G.factors[i];
        const QuadIdeal gi = classgroup::coprime_ideal_in_class(K, out.G.gen_forms[i], M2);
        const int chi = static_cast<int>(kronecker(d, gi.norm()));
        const QuadInt val = evaluate(psi, gi).mul_int(chi);
        const QuadInt alpha = classgroup::principal_generator(classgroup::ideal_pow(gi, n));
        const QuadInt target = eta_value(out.eta, alpha) * alpha.pow(psi.l);
        if (!(val.pow(n) == target))
            throw std::logic_error("twist: generator value does not match the unit character");
        out.gens.push_back(gi);
        out.psi_gen.push_back(val);
        out.psi_gen_pow.push_back(target);
    }
    return out;
}

}  // namespace cmforms::heckechar

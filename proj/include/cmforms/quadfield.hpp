#pragma once

#include <algorithm>
#include <ostream>
#include <set>
#include <vector>

#include "cmforms/arith.hpp"
#include "cmforms/errors.hpp"

namespace cmforms::quadfield {

using arith::i128;
using arith::i64;

enum class SplitType { split, inert, ramified };

/**
 * Imaginary quadratic field Q(sqrt(-delta)) identified by the absolute value
 * `delta` of its fundamental discriminant.
 *
 * Integral basis: {1, theta} with theta = (sigma + sqrt(-delta)) / 2 and
 * sigma = delta mod 2, so theta^2 = sigma*theta - (sigma + delta)/4.
 */
class QuadField {
public:
    explicit QuadField(i64 delta) : delta_(delta) {
        if (!is_fundamental(delta))
            throw invalid_discriminant("-" + std::to_string(delta) +
                                       " is not a fundamental discriminant");
    }

    i64 delta() const { return delta_; }
    int sigma() const { return static_cast<int>(delta_ & 1); }
    /// N(theta) = (sigma + delta)/4 (note sigma^2 = sigma).
    i128 theta_norm() const { return (i128(sigma()) + delta_) / 4; }

    /// Kronecker character chi_K(n) = (-delta | n).
    int chi(i128 n) const { return arith::kronecker(-i128(delta_), n); }

    SplitType splitting(i64 p) const {
        if (!arith::is_prime(p)) throw std::domain_error("splitting: p must be prime");
        int c = chi(p);
        if (c == 0) return SplitType::ramified;
        return c == 1 ? SplitType::split : SplitType::inert;
    }

    static bool is_fundamental(i64 d) {
        if (d < 3) return false;
        if (d % 4 == 3) return arith::is_squarefree(d);
        if (d % 4 == 0) {
            i64 m = d / 4;
            return (m % 4 == 1 || m % 4 == 2) && arith::is_squarefree(m);
        }
        return false;
    }

    bool operator==(const QuadField& o) const { return delta_ == o.delta_; }
    bool operator!=(const QuadField& o) const { return delta_ != o.delta_; }

private:
    i64 delta_;
};

/**
 * Algebraic integer (x + y*sqrt(-delta)) / 2 in doubled coordinates (x, y);
 * invariant: x = y*delta (mod 2), equivalently x = y*sigma (mod 2).
 */
class QuadInt {
public:
    QuadInt(const QuadField& K, i128 x, i128 y) : K_(K), x_(x), y_(y) {
        if (((x - y * K.sigma()) & 1) != 0)
            throw std::domain_error("QuadInt: parity violated (x != y*delta mod 2)");
    }

    static QuadInt integer(const QuadField& K, i128 n) { return {K, 2 * n, 0}; }
    static QuadInt zero(const QuadField& K) { return {K, 0, 0}; }
    static QuadInt one(const QuadField& K) { return {K, 2, 0}; }
    /// theta = (sigma + sqrt(-delta)) / 2.
    static QuadInt theta(const QuadField& K) { return {K, K.sigma(), 1}; }
    /// X + Y*theta in the integral basis.
    static QuadInt from_basis(const QuadField& K, i128 X, i128 Y) {
        return {K, arith::checked_add(arith::checked_mul(2, X), Y * K.sigma()), Y};
    }

    const QuadField& field() const { return K_; }
    i128 x() const { return x_; }  // doubled rational part; equals the trace
    i128 y() const { return y_; }  // doubled sqrt coefficient

    /// Coefficient pair (X, Y) with *this = X + Y*theta.
    std::pair<i128, i128> basis_coords() const { return {(x_ - y_ * K_.sigma()) / 2, y_}; }

    i128 norm() const {
        using namespace arith;
        return checked_add(checked_mul(x_, x_), checked_mul(i128(K_.delta()), checked_mul(y_, y_))) / 4;
    }
    i128 trace() const { return x_; }
    QuadInt conj() const { return {K_, x_, -y_}; }
    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_unit() const { return norm() == 1; }

    QuadInt operator+(const QuadInt& o) const {
        check_field(o);
        return {K_, arith::checked_add(x_, o.x_), arith::checked_add(y_, o.y_)};
    }
    QuadInt operator-(const QuadInt& o) const {
        check_field(o);
        return {K_, arith::checked_sub(x_, o.x_), arith::checked_sub(y_, o.y_)};
    }
    QuadInt operator-() const { return {K_, -x_, -y_}; }

    QuadInt operator*(const QuadInt& o) const {
        using namespace arith;
        check_field(o);
        // (x1 x2 - delta y1 y2)/2 , (x1 y2 + y1 x2)/2
        i128 rx = checked_sub(checked_mul(x_, o.x_),
                              checked_mul(i128(K_.delta()), checked_mul(y_, o.y_)));
        i128 ry = checked_add(checked_mul(x_, o.y_), checked_mul(y_, o.x_));
        if ((rx & 1) != 0 || (ry & 1) != 0)
            throw std::logic_error("QuadInt::mul: non-integral product");
        return {K_, rx / 2, ry / 2};
    }

    QuadInt mul_int(i128 n) const {
        return {K_, arith::checked_mul(x_, n), arith::checked_mul(y_, n)};
    }

    QuadInt pow(i64 e) const {
        if (e < 0) throw std::domain_error("QuadInt::pow: negative exponent");
        QuadInt r = one(K_);
        QuadInt b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            e >>= 1;
            if (e > 0) b = b * b;
        }
        return r;
    }

    /// Exact division; throws exact_division_failure if *this is not a multiple of o.
    QuadInt div_exact(const QuadInt& o) const {
        using namespace arith;
        check_field(o);
        if (o.is_zero()) throw std::domain_error("QuadInt::div_exact by zero");
        i128 n = o.norm();
        QuadInt w = *this * o.conj();
        if (w.x_ % n != 0 || w.y_ % n != 0)
            throw exact_division_failure("QuadInt::div_exact left a remainder");
        return {K_, w.x_ / n, w.y_ / n};
    }

    bool operator==(const QuadInt& o) const {
        return K_ == o.K_ && x_ == o.x_ && y_ == o.y_;
    }
    bool operator!=(const QuadInt& o) const { return !(*this == o); }
    /// Lexicographic by (x, y); used for canonical orbit representatives.
    bool operator<(const QuadInt& o) const {
        if (x_ != o.x_) return x_ < o.x_;
        return y_ < o.y_;
    }

    /// All unit multiples of *this (2, 4, or 6 elements).
    std::vector<QuadInt> associates() const;

private:
    void check_field(const QuadInt& o) const {
        if (K_ != o.K_)
            throw discriminant_mismatch("QuadInt operands from different fields");
    }
    QuadField K_;
    i128 x_, y_;
};

inline std::ostream& operator<<(std::ostream& os, const QuadInt& a) {
    return os << "(" << arith::to_string(a.x()) << " + " << arith::to_string(a.y())
              << "*sqrt(-" << a.field().delta() << "))/2";
}

/// Units of O_K: {+-1}, plus {+-i} for delta = 4, {+-zeta, +-zeta^2} for delta = 3.
inline std::vector<QuadInt> units(const QuadField& K) {
    std::vector<QuadInt> u{QuadInt::one(K), -QuadInt::one(K)};
    if (K.delta() == 4) {
        u.emplace_back(K, 0, 1);
        u.emplace_back(K, 0, -1);
    } else if (K.delta() == 3) {
        u.emplace_back(K, 1, 1);
        u.emplace_back(K, -1, -1);
        u.emplace_back(K, -1, 1);
        u.emplace_back(K, 1, -1);
    }
    return u;
}

inline std::vector<QuadInt> QuadInt::associates() const {
    std::vector<QuadInt> out;
    for (const QuadInt& u : units(K_)) out.push_back(*this * u);
    return out;
}

/**
 * Representatives, up to units, of the elements of O_K with norm m (m >= 1).
 * Canonical representative: lexicographic maximum of the unit orbit by (x, y).
 * Deterministic order: ascending (y, x).
 */
inline std::vector<QuadInt> elements_of_norm(const QuadField& K, i128 m) {
    using namespace arith;
    if (m < 1) throw std::domain_error("elements_of_norm: m must be positive");
    const i128 D = K.delta();
    std::set<std::pair<i128, i128>> seen;
    std::vector<QuadInt> out;
    auto push_orbit = [&](i128 x, i128 y) {
        QuadInt a(K, x, y);
        QuadInt best = a;
        for (const QuadInt& b : a.associates())
            if (best < b) best = b;
        if (seen.insert({best.x(), best.y()}).second) out.push_back(best);
    };
    i128 m4 = checked_mul(4, m);
    i128 ymax = isqrt(m4 / D);
    for (i128 yv = 0; yv <= ymax; ++yv) {
        i128 rem = checked_sub(m4, checked_mul(D, checked_mul(yv, yv)));
        i128 xv;
        if (!is_square(rem, &xv)) continue;
        if (((xv - yv * K.sigma()) & 1) != 0) continue;
        if (xv == 0) {
            if (yv > 0) push_orbit(0, yv);
        } else {
            push_orbit(xv, yv);
            if (yv > 0) push_orbit(-xv, yv);
        }
    }
    std::sort(out.begin(), out.end(), [](const QuadInt& a, const QuadInt& b) {
        if (a.y() != b.y()) return a.y() < b.y();
        return a.x() < b.x();
    });
    return out;
}

/**
 * Residue of alpha = (x + y*sqrt(-delta))/2 at the ramified odd part:
 * x * inv(2) modulo m = delta / 2^v, as a representative in [1, m].
 * Requires gcd(N(alpha), m) = 1.
 */
inline i64 residue_embedding(const QuadInt& alpha) {
    using namespace arith;
    i64 m = alpha.field().delta();
    while (m % 2 == 0) m /= 2;
    if (m == 1) return 1;
    if (gcd128(mod_floor(alpha.norm(), m), m) != 1)
        throw not_coprime("residue_embedding: norm shares a factor with " + std::to_string(m));
    i128 r = mod_floor(alpha.x() * inv_mod(2, m), m);
    return to_i64(mod_floor(r - 1, m) + 1);
}

}  // namespace cmforms::quadfield

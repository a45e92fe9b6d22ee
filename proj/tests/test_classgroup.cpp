#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cmforms/classgroup.hpp"

using namespace cmforms;
using namespace cmforms::classgroup;
using arith::i128;
using arith::i64;
using quadfield::QuadField;
using quadfield::QuadInt;

namespace {

// Independent class-number oracle: Dirichlet's formula
//   h = w / (2 |D|) * | sum_{a=1}^{|D|-1} kronecker(D, a) * a |,  D = -delta.
i64 class_number_formula(i64 delta) {
    i64 w = 2;
    if (delta == 3) w = 6;
    if (delta == 4) w = 4;
    i128 s = 0;
    for (i64 a = 1; a < delta; ++a) s += i128(arith::kronecker(-delta, a)) * a;
    if (s < 0) s = -s;
    REQUIRE((w * s) % (2 * i128(delta)) == 0);
    return arith::to_i64(w * s / (2 * i128(delta)), "class number");
}

// Action of an SL2(Z) matrix (p q; r s) on a form.
QuadForm transformed(const QuadForm& f, i64 p, i64 q, i64 r, i64 s) {
    REQUIRE(p * s - q * r == 1);
    const i128 a2 = f.eval(p, r);
    const i128 c2 = f.eval(q, s);
    const i128 b2 =
        2 * i128(f.a) * p * q + i128(f.b) * (i128(p) * s + i128(q) * r) + 2 * i128(f.c) * r * s;
    return {arith::to_i64(a2, "a"), arith::to_i64(b2, "b"), arith::to_i64(c2, "c")};
}

std::vector<i64> fundamental_up_to(i64 bound) {
    std::vector<i64> out;
    for (i64 d = 3; d <= bound; ++d)
        if (QuadField::is_fundamental(d)) out.push_back(d);
    return out;
}

i64 order_of(const QuadForm& f, i64 h, const QuadForm& id) {
    for (i64 o = 1; o <= h; ++o)
        if (h % o == 0 && form_pow(f, o) == id) return o;
    FAIL("order not dividing h");
    return 0;
}

}  // namespace

TEST_CASE("reduction: hand examples and invariants") {
    CHECK(reduce({3, 7, 5}) == QuadForm{1, 1, 3});   // disc -11
    CHECK(reduce({2, -1, 2}) == QuadForm{2, 1, 2});  // disc -15, boundary flip
    CHECK(reduce({4, -3, 3}) == QuadForm{3, 3, 4});  // disc -39
    CHECK(reduce({1, 1, 2}) == QuadForm{1, 1, 2});
    CHECK(is_reduced({2, 1, 3}));
    CHECK(is_reduced({2, -1, 3}));
    CHECK_FALSE(is_reduced({2, -1, 2}));  // a == c needs b >= 0
    CHECK_FALSE(is_reduced({3, 3, 2}));
    CHECK_FALSE(is_reduced({2, 3, 4}));
}

TEST_CASE("reduction: random SL2 transforms reduce back to the original") {
    std::mt19937 rng(41);
    const auto deltas = fundamental_up_to(300);
    std::uniform_int_distribution<std::size_t> pick_delta(0, deltas.size() - 1);
    std::uniform_int_distribution<int> shear(-4, 4);
    std::uniform_int_distribution<int> steps(1, 5);
    for (int iter = 0; iter < 400; ++iter) {
        const QuadField K(deltas[pick_delta(rng)]);
        const auto forms = reduced_forms(K);
        std::uniform_int_distribution<std::size_t> pick_form(0, forms.size() - 1);
        const QuadForm f = forms[pick_form(rng)];
        // random word in the generators T^k and S of SL2(Z)
        i64 p = 1, q = 0, r = 0, s = 1;
        for (int j = 0; j < steps(rng); ++j) {
            const i64 k = shear(rng);
            // right-multiply by T^k, then by S
            std::tie(p, q) = std::pair(p, q + p * k);
            std::tie(r, s) = std::pair(r, s + r * k);
            std::tie(p, q) = std::pair(q, -p);
            std::tie(r, s) = std::pair(s, -r);
        }
        const QuadForm g = transformed(f, p, q, r, s);
        REQUIRE(g.disc() == f.disc());
        REQUIRE(reduce(g) == f);
    }
}

TEST_CASE("reduced form counts match the analytic class number formula") {
    for (i64 delta : fundamental_up_to(500)) {
        const QuadField K(delta);
        const auto forms = reduced_forms(K);
        REQUIRE(static_cast<i64>(forms.size()) == class_number_formula(delta));
        for (const auto& f : forms) REQUIRE(f.disc() == -i128(delta));
        REQUIRE(std::is_sorted(forms.begin(), forms.end()));
    }
}

TEST_CASE("composition: hand examples") {
    // disc -23
    CHECK(compose({2, 1, 3}, {2, 1, 3}) == QuadForm{2, -1, 3});
    CHECK(compose({2, 1, 3}, {2, -1, 3}) == QuadForm{1, 1, 6});
    // disc -15
    CHECK(compose({2, 1, 2}, {2, 1, 2}) == QuadForm{1, 1, 4});
    // disc -39: (2,1,5) has order 4
    CHECK(compose({2, 1, 5}, {2, 1, 5}) == QuadForm{3, 3, 4});
}

TEST_CASE("composition: group laws on whole class sets") {
    for (i64 delta : {15, 23, 39, 84, 120, 427}) {
        const QuadField K(delta);
        const QuadForm id = identity_form(K);
        const auto forms = reduced_forms(K);
        for (const auto& f : forms) {
            CHECK(compose(id, f) == f);
            CHECK(compose(f, form_inverse(f)) == id);
            for (const auto& g : forms) CHECK(compose(f, g) == compose(g, f));
        }
        for (const auto& f : forms)
            for (const auto& g : forms)
                for (const auto& k : forms)
                    REQUIRE(compose(compose(f, g), k) == compose(f, compose(g, k)));
    }
}

TEST_CASE("composition agrees with ideal multiplication (dual route)") {
    for (i64 delta : {15, 23, 39, 84, 120, 427, 4027}) {
        const QuadField K(delta);
        const auto forms = reduced_forms(K);
        for (const auto& f : forms)
            for (const auto& g : forms) {
                const QuadIdeal I = ideal_from_form(K, f);
                const QuadIdeal J = ideal_from_form(K, g);
                REQUIRE(reduce(form_from_ideal(ideal_mul(I, J))) == compose(f, g));
            }
    }
    // randomized over larger discriminants
    std::mt19937 rng(43);
    const auto deltas = fundamental_up_to(2000);
    std::uniform_int_distribution<std::size_t> pick_delta(0, deltas.size() - 1);
    for (int iter = 0; iter < 200; ++iter) {
        const QuadField K(deltas[pick_delta(rng)]);
        const auto forms = reduced_forms(K);
        std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
        const QuadForm f = forms[pick(rng)];
        const QuadForm g = forms[pick(rng)];
        const QuadIdeal prod = ideal_mul(ideal_from_form(K, f), ideal_from_form(K, g));
        REQUIRE(prod.norm() == i128(f.a) * g.a);
        REQUIRE(reduce(form_from_ideal(prod)) == compose(f, g));
    }
}

TEST_CASE("form <-> ideal round trip") {
    for (i64 delta : {7, 8, 15, 23, 4027}) {
        const QuadField K(delta);
        for (const auto& f : reduced_forms(K)) {
            const QuadIdeal I = ideal_from_form(K, f);
            REQUIRE(I.norm() == f.a);
            REQUIRE(reduce(form_from_ideal(I)) == f);
        }
    }
}

TEST_CASE("ideal basics: conjugate, powers, containment") {
    const QuadField K(15);
    const QuadIdeal p2 = prime_ideal_above(K, 2);
    CHECK(p2.a == 2);
    CHECK(conj_ideal(conj_ideal(p2)) == p2);
    CHECK(ideal_pow(p2, 3) == ideal_mul(p2, ideal_mul(p2, p2)));
    CHECK(ideal_pow(p2, 0) == unit_ideal(K));

    // N(I) is always a member; 1 only for the unit ideal
    std::mt19937 rng(47);
    for (i64 delta : {7, 8, 15, 23, 84}) {
        const QuadField Kd(delta);
        const auto forms = reduced_forms(Kd);
        std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
        std::uniform_int_distribution<i64> coeff(-5, 5);
        for (int iter = 0; iter < 50; ++iter) {
            QuadIdeal I = ideal_from_form(Kd, forms[pick(rng)]);
            if (iter % 3 == 0) I = ideal_mul(I, conj_ideal(I));  // exercise content > 1
            REQUIRE(contains(I, QuadInt::integer(Kd, I.norm())));
            REQUIRE(contains(I, QuadInt::integer(Kd, 1)) == (I == unit_ideal(Kd)));
            // random module element g*(m*a + n*(t+theta)) is contained
            const i64 m = coeff(rng), n = coeff(rng);
            const QuadInt theta = QuadInt::theta(Kd);
            const QuadInt el =
                (QuadInt::integer(Kd, I.a).mul_int(m) + (QuadInt::integer(Kd, I.t) + theta).mul_int(n))
                    .mul_int(I.g);
            if (!el.is_zero()) {
                REQUIRE(contains(I, el));
                REQUIRE(contains(I, el * QuadInt::theta(Kd)));  // ideal closure
            }
        }
    }
}

TEST_CASE("prime ideals: examples and p * conj(p) = (p)") {
    const QuadField K7(7);
    CHECK(prime_ideal_above(K7, 2) == make_ideal(K7, 1, 2, 0));
    CHECK(prime_ideal_above(K7, 7) == make_ideal(K7, 1, 7, 3));
    CHECK_THROWS_AS(prime_ideal_above(K7, 3), inert_prime);

    const QuadField K8(8);
    CHECK(prime_ideal_above(K8, 2) == make_ideal(K8, 1, 2, 0));

    const QuadField K4(4);
    const QuadIdeal p13 = prime_ideal_above(K4, 13);
    CHECK(p13 == make_ideal(K4, 1, 13, 5));
    CHECK(contains(p13, QuadInt::from_basis(K4, 3, -2)));
    CHECK_FALSE(contains(p13, QuadInt::from_basis(K4, 3, 2)));

    for (i64 delta : {7, 8, 11, 15, 20, 23, 4027}) {
        const QuadField K(delta);
        for (i64 p : arith::primes_up_to(60)) {
            if (K.splitting(p) == quadfield::SplitType::inert) {
                CHECK_THROWS_AS(prime_ideal_above(K, p), inert_prime);
                continue;
            }
            const QuadIdeal pp = prime_ideal_above(K, p);
            REQUIRE(pp.norm() == p);
            REQUIRE(ideal_mul(pp, conj_ideal(pp)) == make_ideal(K, p, 1, 0));
            if (K.splitting(p) == quadfield::SplitType::ramified) REQUIRE(conj_ideal(pp) == pp);
            // square of a ramified prime over odd p is (p)
            if (K.splitting(p) == quadfield::SplitType::ramified && p % 2 == 1)
                REQUIRE(ideal_pow(pp, 2) == make_ideal(K, p, 1, 0));
        }
    }
}

TEST_CASE("principal ideals and generators") {
    const QuadField K15(15);
    CHECK(principal_ideal(QuadInt::integer(K15, 2)) == make_ideal(K15, 2, 1, 0));
    CHECK(principal_generator(make_ideal(K15, 2, 1, 0)) == QuadInt::integer(K15, 2));

    // conj(p2) * p3 = ((3 + sqrt(-15))/2) in disc -15
    const QuadIdeal p2bar = conj_ideal(prime_ideal_above(K15, 2));
    const QuadIdeal p3 = prime_ideal_above(K15, 3);
    const QuadIdeal prod = ideal_mul(p2bar, p3);
    CHECK(prod == make_ideal(K15, 1, 6, 1));
    CHECK(principal_generator(prod) == QuadInt(K15, 3, 1));

    CHECK_THROWS_AS(principal_generator(prime_ideal_above(K15, 2)), not_principal);
    CHECK_THROWS_AS(principal_generator(prime_ideal_above(QuadField(23), 3)), not_principal);

    // round trip: generator of (alpha) is the canonical associate of alpha
    std::mt19937 rng(53);
    std::uniform_int_distribution<i64> coeff(-9, 9);
    for (i64 delta : {3, 4, 7, 8, 15, 23}) {
        const QuadField K(delta);
        for (int iter = 0; iter < 60; ++iter) {
            i64 y = coeff(rng);
            i64 x = 2 * coeff(rng) + (y % 2 == 0 ? 0 : K.sigma());
            if (x == 0 && y == 0) continue;
            const QuadInt alpha(K, x, y);
            const QuadIdeal I = principal_ideal(alpha);
            REQUIRE(I.norm() == alpha.norm());
            const QuadInt gen = principal_generator(I);
            const auto assoc = alpha.associates();
            REQUIRE(std::find(assoc.begin(), assoc.end(), gen) != assoc.end());
            REQUIRE(gen == *std::max_element(assoc.begin(), assoc.end()));
            REQUIRE(principal_ideal(gen) == I);
        }
    }
}

TEST_CASE("min_coprime_rep finds small coprime values deterministically") {
    const QuadField K7(7);
    const FormRep r1 = min_coprime_rep(identity_form(K7), 14);
    CHECK(r1.value == 1);
    CHECK(r1.x == -1);
    CHECK(r1.y == 0);

    const FormRep r2 = min_coprime_rep({2, 1, 3}, 46);
    CHECK(r2.value == 3);
    CHECK(r2.x == 0);
    CHECK(r2.y == -1);

    for (i64 delta : {23, 4027, 5460}) {
        const QuadField K(delta);
        for (const auto& f : reduced_forms(K)) {
            const i128 M = 2 * i128(delta);
            const FormRep r = min_coprime_rep(f, M);
            REQUIRE(arith::gcd128(r.value, M) == 1);
            REQUIRE(f.eval(r.x, r.y) == r.value);
            const QuadIdeal I = coprime_ideal_in_class(K, f, M);
            REQUIRE(I.norm() == r.value);
            REQUIRE(arith::gcd128(I.norm(), M) == 1);
            REQUIRE(reduce(form_from_ideal(I)) == reduce(f));
        }
    }
}

TEST_CASE("class group structure: known invariant factors") {
    const std::vector<std::pair<i64, std::vector<i64>>> expected = {
        {7, {}},          {8, {}},        {11, {}},      {15, {2}},
        {20, {2}},        {23, {3}},      {39, {4}},     {47, {5}},
        {84, {2, 2}},     {120, {2, 2}},  {408, {2, 2}}, {427, {2}},
        {4027, {3, 3}},   {5460, {2, 2, 2, 2}},
    };
    for (const auto& [delta, factors] : expected) {
        const ClassGroup G = build_group(QuadField(delta));
        INFO("delta = " << delta);
        CHECK(G.factors == factors);
        i64 h = 1;
        for (i64 n : factors) h *= n;
        CHECK(G.h() == h);
        CHECK(G.exponent() == (factors.empty() ? 1 : factors.front()));
    }
}

TEST_CASE("class group: generators, discrete logs, homomorphism") {
    std::mt19937 rng(59);
    for (i64 delta : {23, 39, 84, 4027, 5460}) {
        const QuadField K(delta);
        const ClassGroup G = build_group(K);
        const QuadForm id = identity_form(K);
        REQUIRE(G.is_principal_class(id));
        REQUIRE(static_cast<i64>(G.dlog.size()) == G.h());

        // generator orders and divisor chain
        for (std::size_t i = 0; i < G.factors.size(); ++i) {
            REQUIRE(order_of(G.gen_forms[i], G.h(), id) == G.factors[i]);
            if (i + 1 < G.factors.size()) REQUIRE(G.factors[i] % G.factors[i + 1] == 0);
        }
        // generator ideals: coprime to 2*delta, and dlog is the unit vector
        for (std::size_t i = 0; i < G.gen_ideals.size(); ++i) {
            REQUIRE(arith::gcd128(G.gen_ideals[i].norm(), 2 * i128(delta)) == 1);
            const auto& e = G.discrete_log(G.gen_ideals[i]);
            for (std::size_t j = 0; j < e.size(); ++j) REQUIRE(e[j] == (i == j ? 1 : 0));
        }
        // dlog is a homomorphism and reproduces each class
        const auto& forms = G.forms;
        std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
        for (int iter = 0; iter < 40; ++iter) {
            const QuadForm f = forms[pick(rng)];
            const QuadForm g = forms[pick(rng)];
            const auto& ef = G.discrete_log(f);
            const auto& eg = G.discrete_log(g);
            const auto& eprod = G.discrete_log(compose(f, g));
            QuadForm rebuilt = id;
            for (std::size_t i = 0; i < G.factors.size(); ++i) {
                REQUIRE(eprod[i] == (ef[i] + eg[i]) % G.factors[i]);
                rebuilt = compose(rebuilt, form_pow(G.gen_forms[i], ef[i]));
            }
            REQUIRE(rebuilt == f);
        }
    }
}

TEST_CASE("ideal factorization: examples and randomized round trip") {
    const QuadField K4(4);
    // (2 + 2i) = p2^3
    const QuadIdeal m = make_ideal(K4, 2, 2, 1);
    const auto fac = factorize_ideal(m);
    REQUIRE(fac.size() == 1);
    CHECK(fac[0].prime == prime_ideal_above(K4, 2));
    CHECK(fac[0].e == 3);
    CHECK(fac[0].type == quadfield::SplitType::ramified);
    CHECK(ideal_divisors(m).size() == 4);  // p2^0 .. p2^3

    // inert prime content: (5) in disc -8
    const QuadField K8(8);
    const auto fac5 = factorize_ideal(make_ideal(K8, 5, 1, 0));
    REQUIRE(fac5.size() == 1);
    CHECK(fac5[0].e == 1);
    CHECK(fac5[0].type == quadfield::SplitType::inert);
    CHECK(fac5[0].prime.norm() == 25);

    std::mt19937 rng(61);
    std::uniform_int_distribution<int> nprimes(1, 4);
    for (i64 delta : {7, 15, 23, 84}) {
        const QuadField K(delta);
        std::vector<QuadIdeal> pool;
        for (i64 p : arith::primes_up_to(30)) {
            if (K.splitting(p) == quadfield::SplitType::inert) {
                pool.push_back(make_ideal(K, p, 1, 0));
            } else {
                pool.push_back(prime_ideal_above(K, p));
                pool.push_back(conj_ideal(prime_ideal_above(K, p)));
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (int iter = 0; iter < 40; ++iter) {
            QuadIdeal I = unit_ideal(K);
            for (int j = nprimes(rng); j > 0; --j) I = ideal_mul(I, pool[pick(rng)]);
            const auto factors = factorize_ideal(I);  // internal product check
            i128 n = 1;
            for (const auto& f : factors) {
                for (int j = 0; j < f.e; ++j) n = n * f.prime.norm();
                REQUIRE(ideal_divides(f.prime, I));
                REQUIRE_FALSE(
                    ideal_divides(ideal_pow(f.prime, f.e + 1), I));
            }
            REQUIRE(n == I.norm());
            // divisor count and divisibility
            const auto divs = ideal_divisors(I);
            std::size_t expected = 1;
            for (const auto& f : factors) expected *= static_cast<std::size_t>(f.e + 1);
            REQUIRE(divs.size() == expected);
            for (const auto& d : divs) REQUIRE(ideal_divides(d, I));
            // lcm of two random divisors divides I and is divided by both
            std::uniform_int_distribution<std::size_t> pd(0, divs.size() - 1);
            const QuadIdeal d1 = divs[pd(rng)], d2 = divs[pd(rng)];
            const QuadIdeal l = ideal_lcm(d1, d2);
            REQUIRE(ideal_divides(d1, l));
            REQUIRE(ideal_divides(d2, l));
            REQUIRE(ideal_divides(l, I));
            for (const auto& m2 : divs)  // minimality among common multiples
                if (ideal_divides(d1, m2) && ideal_divides(d2, m2)) REQUIRE(ideal_divides(l, m2));
        }
    }
}

TEST_CASE("discrete_log rejects forms from another discriminant") {
    const ClassGroup G = build_group(QuadField(23));
    CHECK_THROWS_AS(G.discrete_log(QuadForm{1, 1, 4}), discriminant_mismatch);  // disc -15
}

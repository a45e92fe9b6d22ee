#pragma once
// Enumeration of imaginary quadratic fields whose class-group exponent
// divides a given value, up to a discriminant bound.

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cmforms/classgroup.hpp"

namespace cmforms::fieldsearch {

using arith::i64;
using classgroup::QuadForm;
using quadfield::QuadField;

/// Exponent of the class group (lcm of the invariant factors).
inline i64 exponent(const QuadField& K) { return classgroup::build_group(K).exponent(); }

namespace detail {

/// True iff every reduced form class satisfies f^l = identity, i.e. the
/// class-group exponent divides l. Bails out at the first counterexample.
inline bool exponent_divides(const QuadField& K, i64 l) {
    const QuadForm id = classgroup::identity_form(K);
    for (const QuadForm& f : classgroup::reduced_forms(K))
        if (!(classgroup::form_pow(f, l) == id)) return false;
    return true;
}

}  // namespace detail

/// Fields with odd class-group exponent have a single genus, so their
/// discriminant has exactly one prime discriminant divisor.
inline bool single_genus(i64 delta) {
    return delta == 4 || delta == 8 || (delta % 4 == 3 && arith::is_prime(delta));
}

/// All fundamental discriminants -Delta with 3 <= Delta <= bound whose
/// class-group exponent divides l, ascending. Deterministic for any job
/// count: workers share nothing and scan interleaved residue classes.
inline std::vector<i64> search(i64 l, i64 bound, int jobs = 1) {
    if (l < 1) throw std::domain_error("search: the infinity type must be positive");
    if (jobs < 1) jobs = 1;
    const bool odd = l % 2 != 0;
    auto scan = [&](i64 start, i64 step, std::vector<i64>& out) {
        for (i64 delta = start; delta <= bound; delta += step) {
            if (!QuadField::is_fundamental(delta)) continue;
            if (odd && !single_genus(delta)) continue;
            if (detail::exponent_divides(QuadField(delta), l)) out.push_back(delta);
        }
    };
    std::vector<std::vector<i64>> parts(static_cast<std::size_t>(jobs));
    if (jobs == 1) {
        scan(3, 1, parts[0]);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&scan, &parts, j, jobs] { scan(3 + j, jobs, parts[j]); });
        for (auto& t : pool) t.join();
    }
    std::vector<i64> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace cmforms::fieldsearch

#pragma once

#include <stdexcept>
#include <string>

namespace cmforms {

/// 128-bit arithmetic would wrap; never silently ignored.
struct overflow : std::overflow_error {
    explicit overflow(const std::string& where)
        : std::overflow_error("arithmetic overflow in " + where) {}
};

/// The given value is not minus a fundamental discriminant.
struct invalid_discriminant : std::domain_error {
    explicit invalid_discriminant(const std::string& m) : std::domain_error(m) {}
};

/// Operands belong to different quadratic fields.
struct discriminant_mismatch : std::domain_error {
    explicit discriminant_mismatch(const std::string& m) : std::domain_error(m) {}
};

/// The prime is inert: there is no degree-one prime ideal above it.
struct inert_prime : std::domain_error {
    explicit inert_prime(const std::string& m) : std::domain_error(m) {}
};

/// The ideal is not principal.
struct not_principal : std::domain_error {
    explicit not_principal(const std::string& m) : std::domain_error(m) {}
};

/// Argument is not coprime to the relevant modulus.
struct not_coprime : std::domain_error {
    explicit not_coprime(const std::string& m) : std::domain_error(m) {}
};

/// The class-group exponent does not divide the requested infinity type.
struct exponent_mismatch : std::domain_error {
    explicit exponent_mismatch(const std::string& m) : std::domain_error(m) {}
};

/// A required n-th root does not exist in the ring of integers.
struct root_not_found : std::domain_error {
    explicit root_not_found(const std::string& m) : std::domain_error(m) {}
};

/// A division expected to be exact left a remainder.
struct exact_division_failure : std::logic_error {
    explicit exact_division_failure(const std::string& m) : std::logic_error(m) {}
};

/// A proven coefficient or level bound is violated.
struct bound_violation : std::logic_error {
    explicit bound_violation(const std::string& m) : std::logic_error(m) {}
};

/// No candidate matched (sign calibration or representation search).
struct no_match : std::runtime_error {
    explicit no_match(const std::string& m) : std::runtime_error(m) {}
};

/// Malformed coefficient-table text.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace cmforms

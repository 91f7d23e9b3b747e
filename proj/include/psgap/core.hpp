#pragma once

// Shared scalar types, error hierarchy and small modular-arithmetic helpers.

#include <gmpxx.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace psgap {

/// Working real type. On x86-64 this is the 80-bit x87 format (64-bit significand).
using real_t = long double;

using BigInt = mpz_class;

// -----------------------------------------------------------------------------
// Errors
// -----------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request would exceed a configured memory or operation budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// An index or argument lies outside the range a structure covers.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An argument violates a mathematical precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two independent evaluation routes disagreed. Always a bug signal.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// -----------------------------------------------------------------------------
// 64-bit modular arithmetic
// -----------------------------------------------------------------------------

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Floor of the square root, exact for all 64-bit inputs.
inline std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// a mod m mapped into [0, m) for signed a.
inline std::uint64_t mod_floor(std::int64_t a, std::uint64_t m) {
    const auto sm = static_cast<std::int64_t>(m);
    std::int64_t r = a % sm;
    if (r < 0) r += sm;
    return static_cast<std::uint64_t>(r);
}

/// Distinct prime factors of n by trial division, ascending.
inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;
    std::uint64_t value;  // prime^exponent
};

inline std::vector<PrimePower> factorize(std::uint64_t n) {
    std::vector<PrimePower> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        PrimePower pp{p, 0, 1};
        while (n % p == 0) {
            n /= p;
            ++pp.exponent;
            pp.value *= p;
        }
        out.push_back(pp);
    }
    if (n > 1) out.push_back({n, 1, n});
    return out;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t phi = n;
    for (auto p : distinct_prime_factors(n)) phi = phi / p * (p - 1);
    return phi;
}

/// Natural log of a positive big integer without converting it to a double.
inline real_t log_big(const BigInt& m) {
    if (sgn(m) <= 0) throw DomainError("log_big: argument must be positive");
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, m.get_mpz_t());
    return std::log(static_cast<real_t>(mant)) + static_cast<real_t>(exp2) * std::log(2.0L);
}

inline BigInt to_big(std::uint64_t v) {
    BigInt r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return r;
}

inline bool fits_u64(const BigInt& v) {
    return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const BigInt& v) {
    if (!fits_u64(v)) throw RangeError("big integer does not fit in 64 bits");
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
    return out;
}

inline std::uint64_t mod_u64(const BigInt& v, std::uint64_t m) {
    return mpz_fdiv_ui(v.get_mpz_t(), m);
}

}  // namespace psgap

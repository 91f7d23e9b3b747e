#pragma once

// Piatetski-Shapiro sequences floor(l^c): certified evaluation, membership,
// prime enumeration and comparison against the asymptotic count in
// arithmetic progressions.

#include "psgap/core.hpp"
#include "psgap/primes.hpp"

#include <mpfr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace psgap {

/// Positive rational num/den in lowest terms.
struct Rational {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    static Rational make(std::uint64_t num, std::uint64_t den) {
        if (den == 0) throw DomainError("rational with zero denominator");
        const auto g = std::gcd(num, den);
        return {num / g, den / g};
    }
    Rational inverse() const { return make(den, num); }
    real_t value() const { return static_cast<real_t>(num) / static_cast<real_t>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Parses "1.05", "17983/17000" or "2".
inline Rational parse_rational(std::string_view text) {
    auto parse_u64 = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
            throw DomainError("cannot parse rational '" + std::string(text) + "'");
        }
        return v;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational::make(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto frac = text.substr(dot + 1);
        if (frac.size() > 18) throw DomainError("too many decimal places in '" + std::string(text) + "'");
        std::uint64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const std::uint64_t whole = dot == 0 ? 0 : parse_u64(text.substr(0, dot));
        const std::uint64_t part = frac.empty() ? 0 : parse_u64(frac);
        return Rational::make(whole * scale + part, scale);
    }
    return Rational::make(parse_u64(text), 1);
}

// -----------------------------------------------------------------------------
// Certified floor of n^e
// -----------------------------------------------------------------------------

struct PowerFloor {
    std::uint64_t value = 0;
    /// n^e is exactly the integer `value`.
    bool exact = false;
};

namespace detail {

class MpfrValue {
public:
    explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

// Decide floor(n^(num/den)) given that it is candidate or candidate - 1.
inline PowerFloor resolve_exactly(std::uint64_t n, Rational e, std::uint64_t candidate) {
    BigInt lhs, rhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), n, e.num);
    mpz_ui_pow_ui(rhs.get_mpz_t(), candidate, e.den);
    const int c = cmp(lhs, rhs);
    if (c >= 0) return {candidate, c == 0};
    mpz_ui_pow_ui(rhs.get_mpz_t(), candidate - 1, e.den);
    return {candidate - 1, cmp(lhs, rhs) == 0};
}

}  // namespace detail

inline constexpr unsigned kMaxPrecisionBits = 8192;

/// floor(n^e) for a positive rational exponent, with a correctness certificate.
/// The first pass runs in extended precision when precision_bits <= 64 and is
/// accepted only when the value is clear of the nearest integer; otherwise the
/// value is bracketed with directed-rounding MPFR evaluations at doubling
/// precision. Unresolvable brackets (n^e an exact integer) fall back to exact
/// integer comparison of n^num against m^den.
inline PowerFloor certified_floor_power(std::uint64_t n, Rational e, unsigned precision_bits = 64) {
    if (n <= 1 || e.num == 0) return {e.num == 0 ? 1 : n, true};

    constexpr real_t two63 = 9223372036854775808.0L;
    if (precision_bits <= 64) {
        const real_t v = std::pow(static_cast<real_t>(n), e.value());
        if (v > two63 * (1 + 1e-12L)) throw RangeError("floor power exceeds 2^63");
        if (v < two63 * (1 - 1e-12L)) {
            const real_t f = std::floor(v);
            const real_t dist = std::min(v - f, f + 1 - v);
            const real_t margin = std::max(std::ldexp(1.0L, -20), std::ldexp(v, -50));
            if (dist > margin) return {static_cast<std::uint64_t>(f), false};
        }
    }

    unsigned prec = std::max(128u, precision_bits);
    std::uint64_t candidate = 0;
    for (; prec <= kMaxPrecisionBits; prec *= 2) {
        const auto p = static_cast<mpfr_prec_t>(prec);
        detail::MpfrValue base(p), lo(p), hi(p), e_lo(p), e_hi(p);
        mpfr_set_ui(base.get(), n, MPFR_RNDN);
        mpfr_set_ui(e_lo.get(), e.num, MPFR_RNDN);
        mpfr_set_ui(e_hi.get(), e.num, MPFR_RNDN);
        mpfr_div_ui(e_lo.get(), e_lo.get(), e.den, MPFR_RNDD);
        mpfr_div_ui(e_hi.get(), e_hi.get(), e.den, MPFR_RNDU);
        mpfr_log(lo.get(), base.get(), MPFR_RNDD);
        mpfr_log(hi.get(), base.get(), MPFR_RNDU);
        mpfr_mul(lo.get(), lo.get(), e_lo.get(), MPFR_RNDD);
        mpfr_mul(hi.get(), hi.get(), e_hi.get(), MPFR_RNDU);
        mpfr_exp(lo.get(), lo.get(), MPFR_RNDD);
        mpfr_exp(hi.get(), hi.get(), MPFR_RNDU);

        if (mpfr_cmp_d(lo.get(), static_cast<double>(two63)) >= 0) throw RangeError("floor power exceeds 2^63");
        if (mpfr_cmp_d(hi.get(), static_cast<double>(two63)) >= 0) continue;

        const std::uint64_t f_lo = mpfr_get_ui(lo.get(), MPFR_RNDD);
        const std::uint64_t f_hi = mpfr_get_ui(hi.get(), MPFR_RNDD);
        candidate = f_hi;
        if (f_lo == f_hi && mpfr_cmp_ui(lo.get(), f_lo) > 0) return {f_lo, false};
    }
    if (candidate == 0) throw RangeError("floor power could not be bracketed below 2^63");
    return detail::resolve_exactly(n, e, candidate);
}

/// ceil(n^e), certified.
inline std::uint64_t certified_ceil_power(std::uint64_t n, Rational e, unsigned precision_bits = 64) {
    const auto f = certified_floor_power(n, e, precision_bits);
    return f.exact ? f.value : f.value + 1;
}

// -----------------------------------------------------------------------------
// Parameters
// -----------------------------------------------------------------------------

/// Exponent c in (1, 18/17), held as an exact rational so floor(l^c) is well defined.
class PSParameters {
public:
    static PSParameters from_rational(Rational c, unsigned precision_bits = 64) {
        if (c.num <= c.den) throw DomainError("PS exponent c must exceed 1");
        if (static_cast<unsigned __int128>(c.num) * 17 >= static_cast<unsigned __int128>(c.den) * 18) {
            throw DomainError("PS exponent c must be below 18/17");
        }
        PSParameters p;
        p.c_ = c;
        p.precision_bits_ = precision_bits;
        return p;
    }
    static PSParameters parse(std::string_view text, unsigned precision_bits = 64) {
        return from_rational(parse_rational(text), precision_bits);
    }

    Rational c_exact() const { return c_; }
    Rational gamma_exact() const { return c_.inverse(); }
    real_t c() const { return c_.value(); }
    real_t gamma() const { return gamma_exact().value(); }
    unsigned precision_bits() const { return precision_bits_; }

private:
    PSParameters() = default;
    Rational c_{};
    unsigned precision_bits_ = 64;
};

// -----------------------------------------------------------------------------
// Sequence values and membership
// -----------------------------------------------------------------------------

/// floor(l^c).
inline std::uint64_t ps_value(std::uint64_t l, const PSParameters& params) {
    if (l == 0) throw DomainError("ps_value: l must be >= 1");
    return certified_floor_power(l, params.c_exact(), params.precision_bits()).value;
}

/// True iff p = floor(l^c) for some l >= 1. Checks l* = ceil(p^(1/c)), the
/// smallest l with l^c >= p.
inline bool ps_member(std::uint64_t p, const PSParameters& params) {
    if (p == 0) throw DomainError("ps_member: p must be >= 1");
    if (p == 1) return true;
    const auto lstar = certified_ceil_power(p, params.gamma_exact(), params.precision_bits());
    return ps_value(lstar, params) == p;
}

/// Primes p <= w with ps_member(p).
inline std::vector<std::uint64_t> ps_primes_by_membership(std::uint64_t w, const PSParameters& params,
                                                          const PrimeTable& table) {
    if (w > table.limit()) throw RangeError("ps primes: w exceeds table limit");
    std::vector<std::uint64_t> out;
    for (auto p : table.up_to(w)) {
        if (ps_member(p, params)) out.push_back(p);
    }
    return out;
}

/// floor(l^c) for l = 1, 2, ... while <= w, filtered to primes.
inline std::vector<std::uint64_t> ps_primes_by_forward(std::uint64_t w, const PSParameters& params,
                                                       const PrimeTable& table) {
    if (w > table.limit()) throw RangeError("ps primes: w exceeds table limit");
    std::vector<std::uint64_t> out;
    for (std::uint64_t l = 1;; ++l) {
        const auto v = ps_value(l, params);
        if (v > w) break;
        if (table.is_prime(v)) out.push_back(v);
    }
    return out;
}

/// PS primes up to w. Both enumerations are run and must agree exactly.
inline std::vector<std::uint64_t> ps_primes_up_to(std::uint64_t w, const PSParameters& params,
                                                  const PrimeTable& table) {
    auto by_membership = ps_primes_by_membership(w, params, table);
    const auto by_forward = ps_primes_by_forward(w, params, table);
    if (by_membership != by_forward) {
        throw ConsistencyError("PS prime enumerations disagree up to w = " + std::to_string(w) +
                               " (membership " + std::to_string(by_membership.size()) + ", forward " +
                               std::to_string(by_forward.size()) + ")");
    }
    return by_membership;
}

/// pi_c(w; d, a).
inline std::uint64_t ps_count_in_progression(std::uint64_t w, std::uint64_t d, std::uint64_t a,
                                             const PSParameters& params, const PrimeTable& table) {
    detail::check_progression(table, w, d, a);
    const auto ps = ps_primes_up_to(w, params, table);
    if (d == 1) return ps.size();
    const auto r = a % d;
    return static_cast<std::uint64_t>(std::count_if(ps.begin(), ps.end(), [&](auto p) { return p % d == r; }));
}

// -----------------------------------------------------------------------------
// Asymptotic comparison
// -----------------------------------------------------------------------------

struct PSCountComparison {
    std::uint64_t w = 0;
    std::uint64_t d = 1;
    std::uint64_t a = 0;
    std::uint64_t exact_count = 0;
    real_t main_term = 0;
    real_t integral_term = 0;
    real_t relative_error = 0;
    /// w^(17/39 + 7 gamma / 19), the published error scale; reported, never asserted.
    real_t reference_error_scale = 0;
};

struct AsymptoticTerms {
    real_t main_term = 0;
    real_t integral_term = 0;
};

/// gamma w^(gamma-1) pi(w) and gamma (1-gamma) int_2^w u^(gamma-2) pi(u) du for
/// the step function pi(u) = #{q_i <= u}. The integral is summed exactly
/// piece by piece: on [q_i, q_{i+1}) the integrand is i u^(gamma-2).
inline AsymptoticTerms asymptotic_terms(std::span<const std::uint64_t> matching_primes, std::uint64_t w, real_t gamma) {
    if (gamma == 1) throw DomainError("degenerate exponent: gamma = 1");
    AsymptoticTerms t;
    const real_t g1 = gamma - 1;
    const real_t wr = static_cast<real_t>(w);
    std::size_t n = 0;
    CompensatedSum integral;
    for (std::size_t i = 0; i < matching_primes.size() && matching_primes[i] <= w; ++i) {
        n = i + 1;
        const real_t left = static_cast<real_t>(matching_primes[i]);
        const real_t right = (i + 1 < matching_primes.size() && matching_primes[i + 1] <= w)
                                 ? static_cast<real_t>(matching_primes[i + 1])
                                 : wr;
        integral.add(static_cast<real_t>(n) * (std::pow(right, g1) - std::pow(left, g1)) / g1);
    }
    t.main_term = gamma * std::pow(wr, g1) * static_cast<real_t>(n);
    t.integral_term = gamma * (1 - gamma) * integral.value();
    return t;
}

inline PSCountComparison ps_asymptotic_terms(std::uint64_t w, std::uint64_t d, std::uint64_t a,
                                             const PSParameters& params, const PrimeTable& table) {
    detail::check_progression(table, w, d, a);
    PSCountComparison out;
    out.w = w;
    out.d = d;
    out.a = d == 1 ? a : a % d;
    out.exact_count = ps_count_in_progression(w, d, a, params, table);

    std::vector<std::uint64_t> matching;
    for (auto p : table.up_to(w)) {
        if (d == 1 || p % d == out.a) matching.push_back(p);
    }
    const real_t gamma = params.gamma();
    const auto terms = asymptotic_terms(matching, w, gamma);
    out.main_term = terms.main_term;
    out.integral_term = terms.integral_term;
    const real_t exact = static_cast<real_t>(out.exact_count);
    out.relative_error = std::fabs(exact - (out.main_term + out.integral_term)) / std::max<real_t>(exact, 1);
    out.reference_error_scale = std::pow(static_cast<real_t>(w), 17.0L / 39 + 7 * gamma / 19);
    return out;
}

}  // namespace psgap

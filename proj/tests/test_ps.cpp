#include "psgap/ps.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace psgap;

TEST(Rational, Parse) {
    EXPECT_EQ(parse_rational("1.05"), Rational::make(21, 20));
    EXPECT_EQ(parse_rational("17983/17000"), Rational::make(17983, 17000));
    EXPECT_EQ(parse_rational("2"), Rational::make(2, 1));
    EXPECT_THROW(parse_rational("abc"), DomainError);
    EXPECT_THROW(parse_rational("1/0"), DomainError);
}

TEST(PSParameters, Range) {
    EXPECT_NO_THROW(PSParameters::parse("1.01"));
    EXPECT_NO_THROW(PSParameters::parse("17983/17000"));
    EXPECT_THROW(PSParameters::parse("1"), DomainError);
    EXPECT_THROW(PSParameters::parse("18/17"), DomainError);
    EXPECT_THROW(PSParameters::parse("1.2"), DomainError);
    const auto p = PSParameters::parse("1.05");
    EXPECT_EQ(p.gamma_exact(), Rational::make(20, 21));
}

TEST(FloorPower, AgreesWithIntegerRoot) {
    for (auto e : {Rational::make(21, 20), Rational::make(101, 100), Rational::make(17983, 17000),
                   Rational::make(20, 21), Rational::make(1, 2), Rational::make(3, 2)}) {
        for (std::uint64_t n = 1; n < 3000; ++n) {
            ASSERT_EQ(certified_floor_power(n, e).value, oracle::floor_power(n, e.num, e.den))
                << n << "^" << e.num << "/" << e.den;
        }
    }
}

TEST(FloorPower, ExactPowersAreFlagged) {
    const auto r = certified_floor_power(1024, Rational::make(1, 2));
    EXPECT_EQ(r.value, 32u);
    EXPECT_TRUE(r.exact);
    const auto q = certified_floor_power(1023, Rational::make(1, 2));
    EXPECT_EQ(q.value, 31u);
    EXPECT_FALSE(q.exact);
    // 2^20 under exponent 21/20 lands on 2^21 exactly
    const auto s = certified_floor_power(1u << 20, Rational::make(21, 20));
    EXPECT_EQ(s.value, 1u << 21);
    EXPECT_TRUE(s.exact);
    EXPECT_EQ(certified_ceil_power(1u << 21, Rational::make(20, 21)), 1u << 20);
    EXPECT_EQ(certified_ceil_power(1025, Rational::make(1, 2)), 33u);
}

TEST(FloorPower, HighPrecisionPathAgrees) {
    const auto e = Rational::make(21, 20);
    for (std::uint64_t n = 100000; n < 100500; ++n) {
        ASSERT_EQ(certified_floor_power(n, e, 256).value, certified_floor_power(n, e).value);
    }
}

TEST(FloorPower, Overflow) { EXPECT_THROW(certified_floor_power(1ull << 62, Rational::make(21, 20)), RangeError); }

TEST(PSSequence, FirstValues) {
    const auto params = PSParameters::parse("1.05");
    std::vector<std::uint64_t> got;
    for (std::uint64_t l = 1; l <= 10; ++l) got.push_back(ps_value(l, params));
    std::vector<std::uint64_t> want;
    for (std::uint64_t l = 1; l <= 10; ++l) want.push_back(oracle::floor_power(l, 21, 20));
    EXPECT_EQ(got, want);
    EXPECT_TRUE(ps_member(2, params));
    EXPECT_TRUE(ps_member(1, params));
}

TEST(PSSequence, DualEnumerationAgreesWithBruteForce) {
    const auto table = sieve(200'000);
    // the integer-root oracle raises l to the numerator, so large numerators get a short range
    for (auto [c, w] : {std::pair{"1.01", 200'000ull}, {"1.05", 200'000ull}, {"17983/17000", 3'000ull}}) {
        const auto params = PSParameters::parse(c);
        const auto e = params.c_exact();
        std::vector<std::uint64_t> brute;
        for (std::uint64_t l = 1;; ++l) {
            const auto v = oracle::floor_power(l, e.num, e.den);
            if (v > w) break;
            if (oracle::trial_division(v)) brute.push_back(v);
        }
        EXPECT_EQ(ps_primes_up_to(w, params, table), brute) << c;
    }
}

TEST(PSSequence, CountsInProgressionsSplit) {
    const auto table = sieve(100'000);
    const auto params = PSParameters::parse("1.05");
    const auto total = ps_count_in_progression(100'000, 1, 0, params, table);
    std::uint64_t split = 0;
    for (std::uint64_t a : {1, 3, 7, 9}) split += ps_count_in_progression(100'000, 10, a, params, table);
    EXPECT_EQ(split + 2, total);  // 2 and 5 are PS primes not coprime to 10
    EXPECT_TRUE(ps_member(5, params));
    EXPECT_THROW(ps_count_in_progression(100'000, 10, 5, params, table), DomainError);
}

TEST(AsymptoticTerms, IntegralMatchesQuadrature) {
    const auto table = sieve(10'000);
    const auto params = PSParameters::parse("1.05");
    const std::vector<std::uint64_t> primes(table.primes().begin(), table.primes().end());
    const auto terms = asymptotic_terms(primes, 10'000, params.gamma());
    const double quad = oracle::asymptotic_integral(primes, 10'000, static_cast<double>(params.gamma()));
    EXPECT_NEAR(static_cast<double>(terms.integral_term) / quad, 1.0, 1e-9);
}

TEST(AsymptoticTerms, SumIdentity) {
    // main + integral telescopes to sum over matching primes of gamma q^(gamma-1)
    const auto table = sieve(50'000);
    const real_t gamma = PSParameters::parse("1.05").gamma();
    std::vector<std::uint64_t> matching;
    for (auto p : table.primes()) {
        if (p % 7 == 3) matching.push_back(p);
    }
    const auto t = asymptotic_terms(matching, 50'000, gamma);
    real_t direct = 0;
    for (auto p : matching) direct += gamma * std::pow(static_cast<real_t>(p), gamma - 1);
    EXPECT_NEAR(static_cast<double>((t.main_term + t.integral_term) / direct), 1.0, 1e-12);
    EXPECT_THROW(asymptotic_terms(matching, 50'000, 1), DomainError);
}

TEST(AsymptoticTerms, EmptyProgression) {
    const auto t = asymptotic_terms({}, 1000, 0.95L);
    EXPECT_EQ(t.main_term, 0);
    EXPECT_EQ(t.integral_term, 0);
}

TEST(AsymptoticTerms, RelativeErrorDecreases) {
    const auto table = sieve(1'000'000);
    const auto params = PSParameters::parse("1.05");
    real_t prev = 1e9;
    for (std::uint64_t w : {10'000ull, 100'000ull, 1'000'000ull}) {
        const auto cmp = ps_asymptotic_terms(w, 1, 0, params, table);
        EXPECT_LE(cmp.relative_error, prev * 1.2L) << w;
        prev = cmp.relative_error;
    }
    EXPECT_LT(prev, 0.10L);
}

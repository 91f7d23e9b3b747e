#include "psgap/primes.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace psgap;

TEST(Sieve, SmallLimits) {
    const auto ten = sieve(10);
    EXPECT_EQ(std::vector<std::uint64_t>(ten.primes().begin(), ten.primes().end()),
              (std::vector<std::uint64_t>{2, 3, 5, 7}));
    const auto two = sieve(2);
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two.primes()[0], 2u);
    EXPECT_THROW(sieve(1), DomainError);
}

TEST(Sieve, MatchesPlainSieveAcrossSegments) {
    SieveOptions opts;
    opts.segment_size = 4096;  // force many segments
    const auto t = sieve(300'000, opts);
    const auto ref = oracle::plain_sieve(300'000);
    ASSERT_EQ(t.size(), ref.size());
    EXPECT_TRUE(std::equal(ref.begin(), ref.end(), t.primes().begin()));
}

TEST(Sieve, CountAtOneMillion) { EXPECT_EQ(sieve(1'000'000).size(), 78498u); }

TEST(Sieve, MembershipAgreesWithTrialDivision) {
    const auto t = sieve(20'000);
    for (std::uint64_t n = 0; n <= 20'000; ++n) ASSERT_EQ(t.is_prime(n), oracle::trial_division(n)) << n;
    EXPECT_THROW(t.is_prime(20'001), RangeError);
}

TEST(Sieve, MemoryBudgetIsEnforced) {
    SieveOptions opts;
    opts.memory_budget_bytes = 1000;
    try {
        sieve(1'000'000, opts);
        FAIL() << "expected ResourceError";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("1000"), std::string::npos);
    }
}

TEST(Primorial, Values) {
    EXPECT_EQ(primorial(0).value, 1);
    EXPECT_EQ(primorial(2).value, 1);
    EXPECT_EQ(primorial(3).value, 2);
    EXPECT_EQ(primorial(11).value, 210);
    EXPECT_EQ(primorial(12).value, 2310);
    EXPECT_EQ(primorial(30).value, BigInt("6469693230"));
}

TEST(Coprimorial, SmallAndTruncated) {
    const auto c = coprimorial(7, primorial(7), 1000);
    EXPECT_FALSE(c.truncated);
    EXPECT_EQ(c.bound, 30u);
    EXPECT_EQ(c.primes, (std::vector<std::uint64_t>{11, 13, 17, 19, 23, 29}));
    const auto big = coprimorial(29, primorial(29), 1000);
    EXPECT_TRUE(big.truncated);
    EXPECT_EQ(big.primes.back(), 997u);
}

TEST(Progressions, CountsAndTheta) {
    const auto t = sieve(100'000);
    EXPECT_EQ(count_primes_in_progression(t, 100, 1, 0), 25u);
    EXPECT_EQ(count_primes_in_progression(t, 100, 4, 1) + count_primes_in_progression(t, 100, 4, 3), 24u);
    EXPECT_NEAR(static_cast<double>(theta_in_progression(t, 10, 1, 0)), std::log(210.0), 1e-12);
    EXPECT_THROW(count_primes_in_progression(t, 100, 6, 3), DomainError);
    EXPECT_THROW(count_primes_in_progression(t, 200'000, 1, 0), RangeError);
    EXPECT_THROW(count_primes_in_progression(t, 100, 0, 1), DomainError);

    real_t split = 0;
    for (std::uint64_t a : {1, 7, 11, 13, 17, 19, 23, 29}) split += theta_in_progression(t, 100'000, 30, a);
    const real_t small = std::log(2.0L) + std::log(3.0L) + std::log(5.0L);
    EXPECT_NEAR(static_cast<double>(split + small), static_cast<double>(theta_in_progression(t, 100'000, 1, 0)),
                1e-9);
}

TEST(Gaps, ScanInvariants) {
    const auto t = sieve(10'000);
    for (const auto& g : scan_gaps(t, 10)) {
        EXPECT_TRUE(oracle::trial_division(g.lower_prime));
        EXPECT_TRUE(oracle::trial_division(g.upper_prime));
        EXPECT_EQ(g.gap, g.upper_prime - g.lower_prime);
        for (auto n = g.lower_prime + 1; n < g.upper_prime; ++n) EXPECT_FALSE(oracle::trial_division(n));
    }
    const auto first14 = scan_gaps(t, 14);
    ASSERT_FALSE(first14.empty());
    EXPECT_EQ(first14.front(), (GapRecord{113, 127, 14}));
}

TEST(Gaps, MaximalTableMatchesOracle) {
    const auto t = sieve(1'000'000);
    const auto mine = maximal_gaps(t);
    const auto ref = oracle::maximal_gaps(1'000'000);
    ASSERT_EQ(mine.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_EQ(mine[i].lower_prime, ref[i].lower);
        EXPECT_EQ(mine[i].upper_prime, ref[i].upper);
    }
    EXPECT_EQ(mine.back(), (GapRecord{492113, 492227, 114}));
}

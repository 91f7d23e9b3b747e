#include "psgap/sieve.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace psgap;

namespace {

std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (auto p : oracle::plain_sieve(hi)) {
        if (p > lo) out.push_back(p);
    }
    return out;
}

}  // namespace

TEST(Rho, Examples) {
    EXPECT_EQ(rho(5, 2, 2), 2u);
    EXPECT_EQ(rho(3, 2, 2), 0u);
    for (std::uint64_t p : {2ull, 3ull, 7ull, 101ull}) {
        for (unsigned k : {1u, 2u, 5u}) EXPECT_EQ(rho(p, 1, k), 1u);
    }
    EXPECT_EQ(rho_criterion(1'000'003, 2, 2), oracle::crt_roots(1'000'003, 2, 2));
}

TEST(Rho, CriterionMatchesExhaustion) {
    for (auto p : oracle::plain_sieve(500)) {
        for (unsigned k = 1; k <= 6; ++k) {
            for (std::uint64_t v = 1; v <= 50; ++v) {
                const auto brute = oracle::crt_roots(p, v, k);
                ASSERT_EQ(rho_exhaustive(p, v, k), brute);
                ASSERT_EQ(rho_criterion(p, v, k), brute) << p << " " << k << " " << v;
                if ((1 + p - v % p) % p != 0) {
                    ASSERT_LE(brute, std::gcd<std::uint64_t>(k, p - 1));
                }
            }
        }
    }
}

TEST(Rho, Multiplicative) {
    EXPECT_EQ(rho_multiplicative(std::vector<std::uint64_t>{3, 5}, 2, 2), 0u);
    EXPECT_EQ(rho_multiplicative(std::vector<std::uint64_t>{}, 2, 2), 1u);
    EXPECT_EQ(rho_multiplicative(std::vector<std::uint64_t>{5, 7}, 2, 2), oracle::crt_roots(35, 2, 2));
    EXPECT_THROW(rho_multiplicative(std::vector<std::uint64_t>{3, 3}, 2, 2), DomainError);
    for (std::uint64_t tau = 2; tau <= 3000; ++tau) {
        const auto f = factorize(tau);
        if (!std::all_of(f.begin(), f.end(), [](const auto& pp) { return pp.exponent == 1; })) continue;
        std::vector<std::uint64_t> ps;
        for (const auto& pp : f) ps.push_back(pp.prime);
        for (unsigned k : {2u, 3u}) {
            const auto hist = oracle::power_histogram(tau, k);
            for (std::uint64_t v = 1; v <= 50; ++v) {
                ASSERT_EQ(rho_multiplicative(ps, v, k), hist[(1 + tau - v % tau) % tau]) << tau;
            }
        }
    }
}

TEST(RootCounter, Caches) {
    RootCounter rc(2);
    EXPECT_FALSE(rc.cached(5, 2));
    EXPECT_EQ(rc.count(5, 2), 2u);
    EXPECT_EQ(rc.cached(5, 7), 2u);  // same class mod 5
}

TEST(Lambda, EmptySetIsDegenerate) {
    const auto set = build_lambda(2, 100, {}, SieveSign::plus);
    ASSERT_EQ(set.weights.size(), 1u);
    EXPECT_EQ(set.weight(0), 1);
}

TEST(Lambda, Preconditions) {
    EXPECT_THROW(build_lambda(2, 1, {3}, SieveSign::plus), DomainError);
    EXPECT_THROW(build_lambda(2, 10, {11}, SieveSign::plus), DomainError);
    EXPECT_THROW(build_lambda(0, 10, {3}, SieveSign::plus), DomainError);
}

TEST(Lambda, LegendreRegimeIsFullMoebius) {
    const std::vector<std::uint64_t> ps{13, 17, 19, 23};
    const std::uint64_t y = 13ull * 17 * 19 * 23 * 23 * 23 * 23 * 23 * 23 + 1;  // beyond every truncation
    for (auto sign : {SieveSign::plus, SieveSign::minus}) {
        const auto set = build_lambda(2, y, ps, sign);
        EXPECT_EQ(set.weights.size(), 16u);
        for (std::uint64_t n = 0; n < 16; ++n) EXPECT_EQ(divisor_sum(set, n), n == 0 ? 1 : 0);
        const auto g = lambda_g_sum(set, [](std::uint64_t p) { return 1.0L / static_cast<real_t>(p); });
        EXPECT_NEAR(static_cast<double>(g.weighted_sum - g.product), 0.0, 1e-15);
    }
    const auto leg = legendre_weights(ps);
    for (std::uint64_t n = 1; n < 16; ++n) EXPECT_EQ(divisor_sum(leg, n), 0);
}

TEST(Lambda, SinglePrimeDivisorSum) {
    const auto ps = primes_between(11, 60);
    const auto set = build_lambda(2, 5000, ps, SieveSign::plus);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const real_t w = set.weight(std::uint64_t{1} << i);
        EXPECT_TRUE(w == 0 || w == -1);
        EXPECT_GE(divisor_sum(set, std::uint64_t{1} << i), 0);
    }
}

TEST(Lambda, PropertiesHoldForBothSigns) {
    for (real_t kappa : {1.0L, 2.0L, 3.0L, 2.5L}) {
        for (std::uint64_t y : {100ull, 10'000ull, 1'000'000ull, 100'000'000ull, 10'000'000'000ull}) {
            const auto ps = primes_between(11, 60);
            for (auto sign : {SieveSign::plus, SieveSign::minus}) {
                const auto set = build_lambda(kappa, y, ps, sign);
                ASSERT_NO_THROW(verify_lambda_properties(set)) << kappa << " " << y;
            }
        }
    }
}

TEST(Lambda, RandomSquarefreeDivisorSums) {
    const auto ps = primes_between(11, 50);  // 10 primes
    ASSERT_EQ(ps.size(), 10u);
    std::mt19937_64 rng(5);
    const auto plus = build_lambda(2, 1'000'000, ps, SieveSign::plus);
    const auto minus = build_lambda(2, 1'000'000, ps, SieveSign::minus);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t n = rng() % 1023 + 1;
        EXPECT_GE(divisor_sum(plus, n), 0);
        EXPECT_LE(divisor_sum(minus, n), 0);
    }
}

TEST(Lambda, DetectsBrokenWeights) {
    auto set = build_lambda(2, 1'000'000, primes_between(11, 40), SieveSign::plus);
    set.weights[1] = 2;
    EXPECT_THROW(verify_lambda_properties(set), ConsistencyError);
}

TEST(LambdaGSum, ZeroDensityAndDomain) {
    const auto set = build_lambda(2, 1'000'000, primes_between(11, 50), SieveSign::plus);
    const auto z = lambda_g_sum(set, [](std::uint64_t) { return 0.0L; });
    EXPECT_EQ(z.weighted_sum, 1);
    EXPECT_EQ(z.product, 1);
    EXPECT_THROW(lambda_g_sum(set, [](std::uint64_t) { return 1.0L; }), DomainError);
}

TEST(LambdaGSum, CalibrationAtSThree) {
    const auto ps = primes_between(11, 50);
    const std::uint64_t z = ps.back() + 1;
    const auto y = static_cast<std::uint64_t>(std::pow(static_cast<double>(z), 3.0));
    const auto set = build_lambda(2, y, ps, SieveSign::plus);
    const auto g = lambda_g_sum(set, rho_density(2, 2));
    EXPECT_NEAR(static_cast<double>(g.s), 3.0, 0.01);
    EXPECT_GE(g.ratio, 0.5L);
    EXPECT_LE(g.ratio, 2.0L);
    RecordProperty("ratio", std::to_string(static_cast<double>(g.ratio)));
}

class SieveCount : public ::testing::Test {
protected:
    static const MatrixSpec& spec() {
        static const MatrixSpec s(build_covering(RankinParameters::explicit_y(11, 20), 2), PSParameters::parse("1.05"),
                                  3000);
        return s;
    }
};

TEST_F(SieveCount, EmptySieve) {
    const auto est = legendre_count(spec(), 7, 11);
    EXPECT_TRUE(est.sieving_primes.empty());
    EXPECT_EQ(est.exact, est.r1_rows);
    EXPECT_EQ(est.upper_bound, static_cast<real_t>(est.r1_rows));
}

TEST_F(SieveCount, OnePrime) {
    const auto est = legendre_count(spec(), 7, 13);
    ASSERT_EQ(est.sieving_primes, (std::vector<std::uint64_t>{13}));
    std::uint64_t hit = 0;
    for (std::uint64_t r = 1; r <= spec().r_max(); ++r) {
        const auto l = to_u64(spec().row_base(r));
        if (!is_prime_u64(l) || !ps_member(l, spec().params())) continue;
        hit += mpz_divisible_ui_p(row_entry(spec(), r, 7).get_mpz_t(), 13) != 0;
    }
    EXPECT_EQ(est.exact, est.r1_rows - hit);
}

TEST_F(SieveCount, DominanceAcrossV) {
    for (auto v : spec().plan().V) {
        for (std::uint64_t z : {20ull, 35ull, 50ull}) {
            const auto est = legendre_count(spec(), v, z);
            EXPECT_LE(static_cast<real_t>(est.exact), est.upper_bound) << v << " " << z;
            EXPECT_FALSE(est.truncated);
            EXPECT_TRUE(est.closer_normalisation == "p" || est.closer_normalisation == "phi");
        }
    }
}

TEST_F(SieveCount, AnalyticPathWithTable) {
    const auto table = sieve(to_u64(spec().row_base(spec().r_max())));
    SieveCountOptions opts;
    opts.table = &table;
    const auto est = legendre_count(spec(), 7, 13, opts);
    ASSERT_TRUE(est.analytic_upper_bound.has_value());
    EXPECT_NEAR(static_cast<double>(*est.analytic_upper_bound / est.upper_bound), 1.0, 0.15);
    const auto plain = legendre_count(spec(), 7, 13);
    EXPECT_EQ(plain.exact, est.exact);
    EXPECT_FALSE(plain.analytic_upper_bound.has_value());
}

#include "psgap/rankin.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace psgap;

TEST(PowerResidues, Squares) {
    EXPECT_EQ(kth_power_residues(7, 2), (std::vector<std::uint64_t>{0, 1, 2, 4}));
    EXPECT_EQ(kth_power_residues(7, 3), (std::vector<std::uint64_t>{0, 1, 6}));
    EXPECT_EQ(kth_power_residues(5, 1).size(), 5u);
}

TEST(RankinParameters, Derived) {
    EXPECT_THROW(RankinParameters::derived(11, 1), DomainError);  // log_3 11 < 0
    const auto p = RankinParameters::derived(100, 1);
    const double l1 = std::log(100.0), l2 = std::log(l1), l3 = std::log(l2);
    EXPECT_EQ(p.y, static_cast<std::uint64_t>(std::floor(100 * l1 * l3 / l2)));
    EXPECT_FALSE(p.y_explicit);
    EXPECT_TRUE(RankinParameters::explicit_y(29, 200).y_explicit);
}

TEST(Covering, X29Y200) {
    const auto plan = build_covering(RankinParameters::explicit_y(29, 200), 2);
    const auto rep = verify_covering(plan);
    EXPECT_EQ(rep.mismatches, 0u);
    EXPECT_TRUE(rep.m0_in_range);
    EXPECT_TRUE(rep.congruences_hold);
    EXPECT_LE(plan.V.size() * 2, plan.y);
    const BigInt P = primorial(29).value;
    const BigInt base = plan.m0 + 1;
    for (std::uint64_t u = 2; u <= 200; ++u) {
        if (std::binary_search(plan.V.begin(), plan.V.end(), u)) continue;
        BigInt value = base * base + (u - 1), g;
        mpz_gcd(g.get_mpz_t(), value.get_mpz_t(), P.get_mpz_t());
        EXPECT_GT(g, 1) << u;
    }
}

TEST(Covering, ExceptionalSetComesFromStruckClasses) {
    for (unsigned k : {1u, 2u, 3u}) {
        for (std::uint64_t x : {11ull, 13ull, 17ull, 23ull, 31ull}) {
            const auto plan = build_covering(RankinParameters::explicit_y(x, 3 * x), k);
            ASSERT_NO_THROW(verify_covering(plan)) << x << " " << k;
            const auto unstruck = unstruck_offsets(plan);
            EXPECT_TRUE(std::includes(unstruck.begin(), unstruck.end(), plan.V.begin(), plan.V.end()));
        }
    }
}

TEST(Covering, DroppingAChoiceNeverShrinksTheUnstruckSet) {
    const auto plan = build_covering(RankinParameters::explicit_y(37, 150), 2);
    const auto base = unstruck_offsets(plan);
    for (const auto& c : plan.choices) EXPECT_GE(unstruck_offsets(plan, c.p).size(), base.size()) << c.p;
}

TEST(Covering, Deterministic) {
    const auto a = build_covering(RankinParameters::explicit_y(29, 200), 2);
    const auto b = build_covering(RankinParameters::explicit_y(29, 200), 2);
    EXPECT_EQ(a, b);
}

TEST(Covering, ChoicesSatisfyResidueCondition) {
    const auto plan = build_covering(RankinParameters::explicit_y(41, 300), 3);
    for (const auto& c : plan.choices) {
        EXPECT_NE(c.w % c.p, 0u);
        EXPECT_EQ(pow_mod(c.w, 3, c.p), (1 + c.p - c.b) % c.p);
    }
}

TEST(Covering, CrtMatchesExhaustionForSmallModulus) {
    // x = 11: P = 210, so m0 can be checked against every residue
    const auto plan = build_covering(RankinParameters::explicit_y(11, 20), 2);
    std::vector<std::uint64_t> solutions;
    for (std::uint64_t m = 0; m < 210; ++m) {
        bool ok = true;
        for (const auto& [p, r] : detail::congruences_of(plan)) ok = ok && (m + 1) % p == r % p;
        if (ok) solutions.push_back(m);
    }
    ASSERT_EQ(solutions.size(), 1u);
    EXPECT_EQ(plan.m0, solutions[0]);
}

TEST(Covering, TamperedPlanIsRejected) {
    auto plan = build_covering(RankinParameters::explicit_y(29, 200), 2);
    plan.m0 += 1;
    EXPECT_THROW(verify_covering(plan), CoveringMismatch);
}

TEST(Covering, BadParameters) {
    EXPECT_THROW(build_covering(RankinParameters::explicit_y(7, 20), 2), DomainError);
    EXPECT_THROW(build_covering(RankinParameters::explicit_y(11, 1), 2), DomainError);
}

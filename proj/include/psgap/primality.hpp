#pragma once

// Deterministic Miller-Rabin below 2^64 and a reproducible probabilistic
// test for larger integers.

#include "psgap/core.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace psgap {

namespace detail {

inline bool mr_round_u64(std::uint64_t n, std::uint64_t a, std::uint64_t d, unsigned s) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline const std::vector<std::uint64_t>& trial_primes() {
    static const std::vector<std::uint64_t> primes = [] {
        std::vector<std::uint8_t> comp(100001, 0);
        std::vector<std::uint64_t> out;
        for (std::uint64_t i = 2; i <= 100000; ++i) {
            if (comp[i]) continue;
            out.push_back(i);
            for (std::uint64_t j = i * i; j <= 100000; j += i) comp[j] = 1;
        }
        return out;
    }();
    return primes;
}

}  // namespace detail

/// Exact primality for every 64-bit n (first twelve prime bases).
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    static constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : bases) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (auto a : bases) {
        if (!detail::mr_round_u64(n, a, d, s)) return false;
    }
    return true;
}

/// Smallest prime factor below 10^5, or 0 if there is none (or n is itself that prime).
inline std::uint64_t small_factor(const BigInt& n) {
    for (auto p : detail::trial_primes()) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
            return cmp(n, p) == 0 ? 0 : p;
        }
    }
    return 0;
}

struct PrimalityOptions {
    unsigned rounds = 64;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// Stateless primality tester. Inputs below 2^64 are decided exactly; larger
/// inputs get trial division to 10^5 and then Miller-Rabin rounds with bases
/// drawn from a generator reseeded on every call, so results are reproducible
/// and the tester can be shared between threads.
class PrimalityTester {
public:
    explicit PrimalityTester(PrimalityOptions opts = {}) : opts_(opts) {}

    bool operator()(const BigInt& n) const {
        if (sgn(n) <= 0) return false;
        if (fits_u64(n)) return is_prime_u64(to_u64(n));
        for (auto p : detail::trial_primes()) {
            if (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) return false;
        }
        return miller_rabin(n);
    }

    bool operator()(std::uint64_t n) const { return is_prime_u64(n); }

    const PrimalityOptions& options() const { return opts_; }

private:
    bool miller_rabin(const BigInt& n) const {
        const BigInt n_minus_1 = n - 1;
        BigInt d = n_minus_1;
        const auto s = mpz_scan1(d.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

        std::mt19937_64 rng(opts_.seed);
        const BigInt span = n - 3;  // bases in [2, n-2]
        BigInt a, x;
        std::vector<std::uint64_t> limbs(mpz_size(n.get_mpz_t()) + 1);
        for (unsigned round = 0; round < opts_.rounds; ++round) {
            for (auto& w : limbs) w = rng();
            mpz_import(a.get_mpz_t(), limbs.size(), -1, sizeof(std::uint64_t), 0, 0, limbs.data());
            a %= span;
            a += 2;
            mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
            if (x == 1 || x == n_minus_1) continue;
            bool passed = false;
            for (unsigned long i = 1; i < s; ++i) {
                mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
                if (x == n_minus_1) {
                    passed = true;
                    break;
                }
            }
            if (!passed) return false;
        }
        return true;
    }

    PrimalityOptions opts_;
};

}  // namespace psgap

#pragma once

// Erdos-Rankin style covering of the offsets u in [2, y] by residue classes
// of primes p < x, adapted to shifted k-th powers (m0 + 1)^k + u - 1.

#include "psgap/core.hpp"
#include "psgap/primes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace psgap {

/// { w^k mod p : 0 <= w < p }, sorted.
inline std::vector<std::uint64_t> kth_power_residues(std::uint64_t p, unsigned k) {
    if (p < 2) throw DomainError("kth_power_residues: p must be prime");
    std::vector<std::uint8_t> hit(p, 0);
    for (std::uint64_t w = 0; w < p; ++w) hit[pow_mod(w, k, p)] = 1;
    std::vector<std::uint64_t> out;
    for (std::uint64_t r = 0; r < p; ++r) {
        if (hit[r]) out.push_back(r);
    }
    return out;
}

struct RankinParameters {
    std::uint64_t x = 0;
    real_t c10 = 1;
    std::uint64_t y = 0;
    /// y was given explicitly rather than derived from x and c10.
    bool y_explicit = false;

    /// y = floor(c10 x log x log_3 x / log_2 x); needs log_3 x > 0, i.e. x > e^e.
    static RankinParameters derived(std::uint64_t x, real_t c10) {
        const real_t l1 = std::log(static_cast<real_t>(x));
        const real_t l2 = l1 > 0 ? std::log(l1) : 0;
        const real_t l3 = l2 > 0 ? std::log(l2) : 0;
        if (!(l3 > 0)) {
            throw DomainError("x = " + std::to_string(x) + " is too small for log_3 x > 0; give y explicitly");
        }
        const real_t y = std::floor(c10 * static_cast<real_t>(x) * l1 * l3 / l2);
        if (y < 2) throw DomainError("derived y is below 2; raise c10 or give y explicitly");
        return {x, c10, static_cast<std::uint64_t>(y), false};
    }

    static RankinParameters explicit_y(std::uint64_t x, std::uint64_t y) { return {x, 0, y, true}; }
};

struct CoveringChoice {
    std::uint64_t p = 0;
    std::uint64_t b = 0;  // struck class: u = b (mod p)
    std::uint64_t w = 0;  // (m0 + 1) = w (mod p), with w^k = 1 - b (mod p)
    std::uint64_t newly_covered = 0;

    friend bool operator==(const CoveringChoice&, const CoveringChoice&) = default;
};

struct CoveringPlan {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    unsigned k = 2;
    /// Active choices in construction order (decreasing p). Primes below x
    /// without a choice have m0 + 1 = 1 (mod p).
    std::vector<CoveringChoice> choices;
    BigInt m0;
    std::vector<std::uint64_t> V;

    friend bool operator==(const CoveringPlan&, const CoveringPlan&) = default;
};

struct CoveringOptions {
    /// Admit b with 1 - b = 0 (mod p), i.e. p | m0 + 1. Off by default: it
    /// would make every matrix row l(r) divisible by p.
    bool allow_zero_witness = false;
};

namespace detail {

inline std::vector<std::uint64_t> primes_below(std::uint64_t x) {
    return x <= 2 ? std::vector<std::uint64_t>{} : small_sieve(x - 1);
}

inline std::optional<std::uint64_t> smallest_root(std::uint64_t target, unsigned k, std::uint64_t p, bool allow_zero) {
    for (std::uint64_t w = allow_zero ? 0 : 1; w < p; ++w) {
        if (pow_mod(w, k, p) == target % p) return w;
    }
    return std::nullopt;
}

// m0 + 1 = residue (mod p) for each listed prime; returns m0 in [0, P).
inline BigInt crt_m0(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& congruences) {
    BigInt value = 0, modulus = 1;
    for (const auto& [p, r] : congruences) {
        // value + modulus * t = r (mod p)
        const std::uint64_t cur = mod_u64(value, p);
        const std::uint64_t mp = mod_u64(modulus, p);
        BigInt inv;
        const BigInt bp = to_big(p);
        mpz_invert(inv.get_mpz_t(), to_big(mp).get_mpz_t(), bp.get_mpz_t());
        const std::uint64_t t = mul_mod((r + p - cur) % p, to_u64(inv), p);
        value += modulus * to_big(t);
        modulus *= to_big(p);
    }
    BigInt m0 = value - 1;
    mpz_mod(m0.get_mpz_t(), m0.get_mpz_t(), modulus.get_mpz_t());
    return m0;
}

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> congruences_of(const CoveringPlan& plan) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (auto p : primes_below(plan.x)) {
        auto it = std::find_if(plan.choices.begin(), plan.choices.end(), [p](const auto& c) { return c.p == p; });
        out.emplace_back(p, it == plan.choices.end() ? 1 : it->w);
    }
    return out;
}

// Offsets in [2, y] whose entry is not certified composite by a prime below x.
inline std::vector<std::uint64_t> uncovered_offsets(const BigInt& m0, unsigned k, std::uint64_t x, std::uint64_t y) {
    BigInt base = m0 + 1, power;
    mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), k);
    const auto primes = primes_below(x);
    std::vector<std::uint64_t> out;
    BigInt value;
    for (std::uint64_t u = 2; u <= y; ++u) {
        value = power + to_big(u - 1);
        bool covered = false;
        for (auto p : primes) {
            if (mpz_divisible_ui_p(value.get_mpz_t(), p) != 0 && cmp(value, p) > 0) {
                covered = true;
                break;
            }
        }
        if (!covered) out.push_back(u);
    }
    return out;
}

}  // namespace detail

/// Greedy covering over primes p < x in decreasing order. Each prime takes
/// the class b maximising the number of still-uncovered u = b (mod p),
/// subject to 1 - b being a nonzero k-th power residue; ties go to the
/// smallest b. m0 follows by CRT with m0 + 1 = w_p (mod p).
inline CoveringPlan build_covering(const RankinParameters& params, unsigned k, const CoveringOptions& opts = {}) {
    if (params.x < 11) throw DomainError("build_covering: x must be >= 11");
    if (params.y < 2) throw DomainError("build_covering: y must be >= 2");
    if (k == 0) throw DomainError("build_covering: k must be >= 1");

    CoveringPlan plan;
    plan.x = params.x;
    plan.y = params.y;
    plan.k = k;

    std::vector<std::uint8_t> covered(params.y + 1, 0);
    auto primes = detail::primes_below(params.x);
    std::reverse(primes.begin(), primes.end());

    std::vector<std::uint64_t> hist;
    for (auto p : primes) {
        const auto residues = kth_power_residues(p, k);
        hist.assign(p, 0);
        for (std::uint64_t u = 2; u <= params.y; ++u) {
            if (!covered[u]) ++hist[u % p];
        }
        std::optional<std::uint64_t> best;
        for (std::uint64_t b = 0; b < p; ++b) {
            const std::uint64_t target = (1 + p - b) % p;
            if (target == 0 && !opts.allow_zero_witness) continue;
            if (!std::binary_search(residues.begin(), residues.end(), target)) continue;
            if (!best || hist[b] > hist[*best]) best = b;
        }
        if (!best || hist[*best] == 0) continue;
        const std::uint64_t b = *best;
        const auto w = detail::smallest_root((1 + p - b) % p, k, p, opts.allow_zero_witness);
        plan.choices.push_back({p, b, *w, hist[b]});
        for (std::uint64_t u = b; u <= params.y; u += p) {
            if (u >= 2) covered[u] = 1;
        }
    }

    auto congruences = detail::congruences_of(plan);
    plan.m0 = detail::crt_m0(congruences);
    if (sgn(plan.m0) == 0) {
        // Every residue is 1, so m0 + 1 = 1 (mod P(x)). In order of preference:
        // give an idle odd prime the witness 2; switch a choice to another root
        // of the same class; move the smallest odd choice to its next best class.
        auto set_residue = [&](std::uint64_t p, std::uint64_t w) {
            for (auto& [q, r] : congruences) {
                if (q == p) r = w;
            }
        };
        bool moved = false;
        for (auto p : detail::primes_below(params.x)) {
            const bool idle =
                std::none_of(plan.choices.begin(), plan.choices.end(), [p](const auto& c) { return c.p == p; });
            if (!idle || p < 3) continue;
            set_residue(p, 2);
            plan.choices.push_back({p, (1 + p - pow_mod(2, k, p)) % p, 2, 0});
            moved = true;
            break;
        }
        for (auto it = plan.choices.rbegin(); !moved && it != plan.choices.rend(); ++it) {
            for (std::uint64_t w = it->w + 1; w < it->p; ++w) {
                if (pow_mod(w, k, it->p) == (1 + it->p - it->b) % it->p) {
                    it->w = w;
                    set_residue(it->p, w);
                    moved = true;
                    break;
                }
            }
        }
        for (auto it = plan.choices.rbegin(); !moved && it != plan.choices.rend(); ++it) {
            if (it->p < 3) continue;
            for (std::uint64_t b = 1; b < it->p; ++b) {
                const auto w = detail::smallest_root((1 + it->p - b) % it->p, k, it->p, false);
                if (!w || *w == 1) continue;
                it->b = b;
                it->w = *w;
                it->newly_covered = 0;
                set_residue(it->p, *w);
                moved = true;
                break;
            }
        }
        if (!moved) throw DomainError("build_covering: degenerate plan, m0 would be 0");
        plan.m0 = detail::crt_m0(congruences);
    }
    plan.V = detail::uncovered_offsets(plan.m0, k, params.x, params.y);
    return plan;
}

struct CoveringReport {
    std::uint64_t y = 0;
    std::vector<std::uint64_t> V;
    std::uint64_t mismatches = 0;
    real_t v_fraction = 0;           // |V| / y
    real_t v_over_sqrt_x = 0;        // |V| / x^(1/2)
    bool m0_in_range = false;        // 1 <= m0 < P(x)
    bool congruences_hold = false;   // (m0+1) = w_p and (m0+1)^k = 1 - b_p (mod p)
    bool values_exceed_primes = false;  // (m0+1)^k + 1 > every p < x
};

class CoveringMismatch : public ConsistencyError {
public:
    using ConsistencyError::ConsistencyError;
};

/// Recomputes the exceptional set by direct reduction of (m0+1)^k + u - 1
/// modulo every prime below x and checks the plan's algebraic invariants.
/// Any disagreement raises CoveringMismatch.
inline CoveringReport verify_covering(const CoveringPlan& plan) {
    CoveringReport rep;
    rep.y = plan.y;
    rep.V = detail::uncovered_offsets(plan.m0, plan.k, plan.x, plan.y);

    std::vector<std::uint64_t> diff;
    std::set_symmetric_difference(rep.V.begin(), rep.V.end(), plan.V.begin(), plan.V.end(), std::back_inserter(diff));
    rep.mismatches = diff.size();

    const auto P = primorial(plan.x);
    rep.m0_in_range = sgn(plan.m0) > 0 && plan.m0 < P.value;

    rep.congruences_hold = true;
    const BigInt base = plan.m0 + 1;
    for (const auto& c : plan.choices) {
        const auto r = mod_u64(base, c.p);
        if (r != c.w || pow_mod(r, plan.k, c.p) != (1 + c.p - c.b) % c.p) rep.congruences_hold = false;
    }
    for (auto p : detail::primes_below(plan.x)) {
        const bool chosen =
            std::any_of(plan.choices.begin(), plan.choices.end(), [p](const auto& c) { return c.p == p; });
        if (!chosen && mod_u64(base, p) != 1) rep.congruences_hold = false;
    }

    BigInt power;
    mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), plan.k);
    rep.values_exceed_primes = cmp(power + 1, plan.x) > 0;

    rep.v_fraction = static_cast<real_t>(rep.V.size()) / static_cast<real_t>(plan.y);
    rep.v_over_sqrt_x = static_cast<real_t>(rep.V.size()) / std::sqrt(static_cast<real_t>(plan.x));

    if (rep.mismatches != 0 || !rep.m0_in_range || !rep.congruences_hold) {
        throw CoveringMismatch("covering plan failed verification: " + std::to_string(rep.mismatches) +
                               " exceptional-set mismatches, m0 in range = " + (rep.m0_in_range ? "yes" : "no") +
                               ", congruences hold = " + (rep.congruences_hold ? "yes" : "no"));
    }
    return rep;
}

/// Offsets in [2, y] lying in none of the struck classes b_p of the plan's
/// choices, skipping the choice for `dropped` (0 keeps every choice).
inline std::vector<std::uint64_t> unstruck_offsets(const CoveringPlan& plan, std::uint64_t dropped = 0) {
    std::vector<std::uint8_t> struck(plan.y + 1, 0);
    for (const auto& c : plan.choices) {
        if (c.p == dropped) continue;
        for (std::uint64_t u = c.b; u <= plan.y; u += c.p) struck[u] = 1;
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t u = 2; u <= plan.y; ++u) {
        if (!struck[u]) out.push_back(u);
    }
    return out;
}

}  // namespace psgap

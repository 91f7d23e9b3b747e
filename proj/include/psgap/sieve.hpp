#pragma once

// Root counts rho(tau, v) of w^k + v - 1 = 0 (mod tau), beta-sieve weights
// lambda^+ / lambda^- with their defining properties, and exact versus
// sieve-bounded counts of matrix rows coprime to a product of primes.

#include "psgap/core.hpp"
#include "psgap/matrix.hpp"
#include "psgap/primes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psgap {

// -----------------------------------------------------------------------------
// Root counting
// -----------------------------------------------------------------------------

/// #{w in [0, p) : w^k = 1 - v (mod p)} by exhaustion.
inline std::uint64_t rho_exhaustive(std::uint64_t p, std::uint64_t v, unsigned k) {
    const std::uint64_t target = (1 + p - v % p) % p;
    std::uint64_t count = 0;
    for (std::uint64_t w = 0; w < p; ++w) count += pow_mod(w, k, p) == target;
    return count;
}

/// Same count via the power-residue criterion: for t = 1 - v != 0 there are
/// gcd(k, p-1) roots if t^((p-1)/gcd) = 1 and none otherwise; t = 0 has w = 0 only.
inline std::uint64_t rho_criterion(std::uint64_t p, std::uint64_t v, unsigned k) {
    const std::uint64_t target = (1 + p - v % p) % p;
    if (target == 0) return 1;
    const std::uint64_t g = std::gcd<std::uint64_t>(k, p - 1);
    return pow_mod(target, (p - 1) / g, p) == 1 ? g : 0;
}

inline constexpr std::uint64_t kRhoExhaustiveLimit = 1'000'000;

inline std::uint64_t rho(std::uint64_t p, std::uint64_t v, unsigned k) {
    return p <= kRhoExhaustiveLimit ? rho_exhaustive(p, v, k) : rho_criterion(p, v, k);
}

/// Caches rho(p, v) per (p, v mod p). Fill it sequentially; concurrent
/// readers are safe only after filling has finished.
class RootCounter {
public:
    explicit RootCounter(unsigned k) : k_(k) {}

    unsigned k() const { return k_; }

    std::uint64_t count(std::uint64_t p, std::uint64_t v) {
        const auto key = std::make_pair(p, v % p);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const auto c = rho(p, v, k_);
        cache_.emplace(key, c);
        return c;
    }

    std::optional<std::uint64_t> cached(std::uint64_t p, std::uint64_t v) const {
        if (auto it = cache_.find({p, v % p}); it != cache_.end()) return it->second;
        return std::nullopt;
    }

private:
    unsigned k_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> cache_;
};

/// rho(tau, v) for squarefree tau given by its prime factors.
inline std::uint64_t rho_multiplicative(std::span<const std::uint64_t> tau_primes, std::uint64_t v, unsigned k) {
    std::vector<std::uint64_t> sorted(tau_primes.begin(), tau_primes.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError("rho_multiplicative: tau is not squarefree");
    }
    std::uint64_t out = 1;
    for (auto p : sorted) {
        out *= rho(p, v, k);
        if (out == 0) break;
    }
    return out;
}

// -----------------------------------------------------------------------------
// Beta-sieve weights
// -----------------------------------------------------------------------------

enum class SieveSign { plus, minus };

inline constexpr std::size_t kMaxSievingPrimes = 64;

/// Truncated Moebius weights over squarefree products of the sieving primes.
/// A divisor is encoded as a bit mask over `primes` (sorted descending).
struct SieveWeightSet {
    real_t kappa = 1;
    real_t beta = 2;
    std::uint64_t y_level = 2;
    SieveSign sign = SieveSign::plus;
    std::vector<std::uint64_t> primes;
    std::map<std::uint64_t, real_t> weights;  // support only

    real_t weight(std::uint64_t mask) const {
        auto it = weights.find(mask);
        return it == weights.end() ? 0 : it->second;
    }

    BigInt divisor_value(std::uint64_t mask) const {
        BigInt d = 1;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if (mask >> i & 1) d *= static_cast<unsigned long>(primes[i]);
        }
        return d;
    }
};

/// beta = max(2, 2 kappa + 1).
inline real_t beta_parameter(real_t kappa) { return std::max<real_t>(2, 2 * kappa + 1); }

namespace detail {

// p_1 ... p_m * p_m^beta < y, exactly when beta is an integer.
inline bool truncation_holds(const BigInt& prefix, std::uint64_t pm, real_t beta, std::uint64_t y) {
    if (beta == std::floor(beta)) {
        BigInt lhs;
        mpz_pow_ui(lhs.get_mpz_t(), to_big(pm).get_mpz_t(), static_cast<unsigned long>(beta));
        lhs *= prefix;
        return cmp(lhs, to_big(y)) < 0;
    }
    return log_big(prefix) + beta * std::log(static_cast<real_t>(pm)) < std::log(static_cast<real_t>(y));
}

}  // namespace detail

/// Beta-sieve weights: lambda_d = mu(d) on d = p_1 p_2 ... p_j (p_1 > p_2 > ...)
/// with p_1 ... p_m p_m^beta < y_level for every m <= j that is odd (upper
/// sieve) or even (lower sieve), and 0 elsewhere. Every sieving prime must lie
/// below y_level.
inline SieveWeightSet build_lambda(real_t kappa, std::uint64_t y_level, std::vector<std::uint64_t> sieving_primes,
                                   SieveSign sign) {
    if (y_level <= 1) throw DomainError("build_lambda: y_level must exceed 1");
    if (!(kappa > 0)) throw DomainError("build_lambda: kappa must be positive");
    std::sort(sieving_primes.begin(), sieving_primes.end(), std::greater<>());
    sieving_primes.erase(std::unique(sieving_primes.begin(), sieving_primes.end()), sieving_primes.end());
    if (sieving_primes.size() > kMaxSievingPrimes) {
        throw ResourceError("build_lambda: at most " + std::to_string(kMaxSievingPrimes) + " sieving primes");
    }
    if (!sieving_primes.empty() && sieving_primes.front() >= y_level) {
        throw DomainError("build_lambda: sieving prime " + std::to_string(sieving_primes.front()) +
                          " is not below y_level");
    }

    SieveWeightSet set;
    set.kappa = kappa;
    set.beta = beta_parameter(kappa);
    set.y_level = y_level;
    set.sign = sign;
    set.primes = std::move(sieving_primes);
    set.weights[0] = 1;

    const std::size_t n = set.primes.size();
    const unsigned checked_parity = sign == SieveSign::plus ? 1 : 0;
    // depth-first over prefixes p_1 > p_2 > ...; the admitted set is prefix-closed
    std::function<void(std::uint64_t, std::size_t, unsigned, const BigInt&)> extend =
        [&](std::uint64_t mask, std::size_t next, unsigned m, const BigInt& prefix) {
            for (std::size_t t = next; t < n; ++t) {
                const std::uint64_t p = set.primes[t];
                const BigInt d = prefix * static_cast<unsigned long>(p);
                if (cmp(d, to_big(y_level)) >= 0) continue;
                const unsigned depth = m + 1;
                if (depth % 2 == checked_parity && !detail::truncation_holds(d, p, set.beta, y_level)) continue;
                const std::uint64_t child = mask | (std::uint64_t{1} << t);
                set.weights[child] = depth % 2 == 1 ? -1 : 1;
                extend(child, t + 1, depth, d);
            }
        };
    extend(0, 0, 0, BigInt(1));
    return set;
}

/// Full Moebius weights on every divisor of the product of the primes.
inline SieveWeightSet legendre_weights(std::vector<std::uint64_t> sieving_primes) {
    std::sort(sieving_primes.begin(), sieving_primes.end(), std::greater<>());
    sieving_primes.erase(std::unique(sieving_primes.begin(), sieving_primes.end()), sieving_primes.end());
    if (sieving_primes.size() > 30) throw ResourceError("legendre_weights: too many primes to enumerate");
    SieveWeightSet set;
    set.primes = std::move(sieving_primes);
    set.kappa = 0;
    set.beta = 0;
    set.y_level = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << set.primes.size()); ++mask) {
        set.weights[mask] = std::popcount(mask) % 2 == 0 ? 1 : -1;
    }
    return set;
}

struct LambdaPropertyReport {
    std::uint64_t divisors_checked = 0;
    std::uint64_t support_size = 0;
    real_t min_divisor_sum = 0;  // over n > 1
    real_t max_divisor_sum = 0;
};

/// Exhaustively checks lambda_1 = 1, |lambda_d| <= 1 for d < y, lambda_d = 0
/// for d >= y, and the sign of sum_{d | n} lambda_d for every squarefree n > 1
/// composed of the sieving primes (all 3^n divisor pairs). Throws
/// ConsistencyError on the first violation.
inline LambdaPropertyReport verify_lambda_properties(const SieveWeightSet& set) {
    const std::size_t n = set.primes.size();
    if (n > 20) throw ResourceError("verify_lambda_properties: too many primes for exhaustive checking");
    LambdaPropertyReport rep;
    rep.support_size = set.weights.size();
    if (set.weight(0) != 1) throw ConsistencyError("lambda_1 != 1");

    const std::uint64_t full = std::uint64_t{1} << n;
    std::vector<real_t> dense(full, 0);
    for (const auto& [mask, w] : set.weights) {
        if (mask >= full) throw ConsistencyError("weight on a divisor outside the sieving set");
        dense[mask] = w;
        if (std::fabs(w) > 1) throw ConsistencyError("|lambda_d| exceeds 1");
        if (set.y_level > 0 && cmp(set.divisor_value(mask), to_big(set.y_level)) >= 0 && w != 0) {
            throw ConsistencyError("lambda_d nonzero for d >= y");
        }
    }
    rep.min_divisor_sum = std::numeric_limits<real_t>::infinity();
    rep.max_divisor_sum = -std::numeric_limits<real_t>::infinity();
    for (std::uint64_t nmask = 1; nmask < full; ++nmask) {
        real_t sum = dense[0];
        for (std::uint64_t d = nmask; d != 0; d = (d - 1) & nmask) sum += dense[d];
        ++rep.divisors_checked;
        rep.min_divisor_sum = std::min(rep.min_divisor_sum, sum);
        rep.max_divisor_sum = std::max(rep.max_divisor_sum, sum);
        const bool ok = set.sign == SieveSign::plus ? sum >= 0 : sum <= 0;
        if (!ok) {
            throw ConsistencyError("divisor-sum sign condition fails for n = " + set.divisor_value(nmask).get_str());
        }
    }
    return rep;
}

/// sum_{d | n} lambda_d for n given as a mask.
inline real_t divisor_sum(const SieveWeightSet& set, std::uint64_t nmask) {
    real_t sum = 0;
    for (const auto& [mask, w] : set.weights) {
        if ((mask & ~nmask) == 0) sum += w;
    }
    return sum;
}

struct LambdaGSum {
    real_t weighted_sum = 0;  // sum_d lambda_d g(d)
    real_t product = 1;       // prod_p (1 - g(p))
    real_t ratio = 0;
    real_t s = 0;             // log y_level / log z, z = largest sieving prime + 1
    real_t envelope = 0;      // e^{-s}
};

/// sum_d lambda_d g(d) for multiplicative g given on primes, against prod (1 - g(p)).
inline LambdaGSum lambda_g_sum(const SieveWeightSet& set, const std::function<real_t(std::uint64_t)>& g) {
    std::vector<real_t> gp(set.primes.size());
    LambdaGSum out;
    for (std::size_t i = 0; i < set.primes.size(); ++i) {
        gp[i] = g(set.primes[i]);
        if (!(gp[i] >= 0 && gp[i] < 1)) {
            throw DomainError("lambda_g_sum: g(" + std::to_string(set.primes[i]) + ") outside [0, 1)");
        }
        out.product *= 1 - gp[i];
    }
    CompensatedSum acc;
    for (const auto& [mask, w] : set.weights) {
        real_t gd = 1;
        for (std::size_t i = 0; i < gp.size(); ++i) {
            if (mask >> i & 1) gd *= gp[i];
        }
        acc.add(w * gd);
    }
    out.weighted_sum = acc.value();
    out.ratio = out.product != 0 ? out.weighted_sum / out.product : 0;
    if (!set.primes.empty() && set.y_level > 1) {
        out.s = std::log(static_cast<real_t>(set.y_level)) / std::log(static_cast<real_t>(set.primes.front() + 1));
        out.envelope = std::exp(-out.s);
    }
    return out;
}

/// g(p) = rho(p, v) / p.
inline std::function<real_t(std::uint64_t)> rho_density(std::uint64_t v, unsigned k) {
    return [v, k](std::uint64_t p) { return static_cast<real_t>(rho(p, v, k)) / static_cast<real_t>(p); };
}

// -----------------------------------------------------------------------------
// Sieve counts over the matrix rows
// -----------------------------------------------------------------------------

struct SieveCountOptions {
    /// Sieve dimension; defaults to k.
    std::optional<real_t> kappa;
    /// Support bound y = P(x)^E given directly; defaults to z^(beta + 1).
    std::optional<std::uint64_t> y_level;
    /// Support bound through its exponent E; ignored when y_level is set.
    std::optional<real_t> E;
    std::uint64_t operation_budget = 10'000'000;
    /// When given and covering l_max, the analytic bound is evaluated alongside:
    /// the same weights applied to all prime rows, each counted with the
    /// PS-prime density gamma l^(gamma-1) rather than by membership.
    const PrimeTable* table = nullptr;
};

struct SieveEstimate {
    std::uint64_t v = 0;
    std::uint64_t z = 0;
    std::vector<std::uint64_t> sieving_primes;
    std::uint64_t rows_scanned = 0;
    bool truncated = false;
    std::uint64_t r1_rows = 0;
    std::uint64_t exact = 0;
    real_t upper_bound = 0;
    /// |R1-prefix| prod (1 - rho(p, v)/p)
    real_t main_product = 0;
    /// |R1-prefix| prod (1 - rho(p, v)/(p - 1))
    real_t main_product_phi = 0;
    /// "p" or "phi": whichever normalisation lies closer to `exact`.
    std::string closer_normalisation;
    std::optional<real_t> analytic_upper_bound;
    std::uint64_t y_level = 0;
    real_t E = 0;
    real_t s = 0;
    std::size_t support_size = 0;
};

namespace detail {

inline std::uint64_t pow_floor_u64(real_t base_log, real_t exponent) {
    const real_t v = std::exp(base_log * exponent);
    if (v >= 9.2e18L) return std::uint64_t{1} << 62;
    return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace detail

/// N(v) restricted to the scanned rows: rows r <= r_max with l(r) a PS prime
/// and gcd(l(r)^k + v - 1, prod_{x < p <= z} p) = 1. The exact value comes from
/// a per-row gcd; the upper bound sums lambda^+_tau times the number of such
/// rows with tau | l(r)^k + v - 1. exact <= upper_bound is enforced.
inline SieveEstimate legendre_count(const MatrixSpec& spec, std::uint64_t v, std::uint64_t z,
                                    const SieveCountOptions& opts = {}) {
    const auto& plan = spec.plan();
    SieveEstimate est;
    est.v = v;
    est.z = z;
    if (z > plan.x) {
        for (auto p : detail::small_sieve(z)) {
            if (p > plan.x) est.sieving_primes.push_back(p);
        }
    }
    if (est.sieving_primes.size() > kMaxSievingPrimes) throw ResourceError("legendre_count: too many sieving primes");

    const real_t kappa = opts.kappa.value_or(static_cast<real_t>(plan.k));
    const real_t beta = beta_parameter(kappa);
    const real_t log_P = log_big(spec.primorial_value());
    if (opts.y_level) {
        est.y_level = *opts.y_level;
    } else if (opts.E) {
        est.y_level = detail::pow_floor_u64(log_P, *opts.E);
    } else {
        est.y_level = detail::pow_floor_u64(std::log(static_cast<real_t>(std::max<std::uint64_t>(z, 2))), beta + 1);
    }
    est.y_level = std::max<std::uint64_t>(est.y_level, est.sieving_primes.empty() ? 2 : est.sieving_primes.back() + 1);
    if (!est.sieving_primes.empty()) est.y_level = std::max(est.y_level, est.sieving_primes.back() + 1);
    est.E = std::log(static_cast<real_t>(est.y_level)) / log_P;
    est.s = z > 1 ? std::log(static_cast<real_t>(est.y_level)) / std::log(static_cast<real_t>(z)) : 0;

    const auto weights = build_lambda(kappa, est.y_level, est.sieving_primes, SieveSign::plus);
    est.support_size = weights.weights.size();

    BigInt Q = 1;
    for (auto p : weights.primes) Q *= static_cast<unsigned long>(p);

    const std::uint64_t rows = std::min(spec.r_max(), opts.operation_budget);
    est.rows_scanned = rows;
    est.truncated = rows < spec.r_max();
    if (!fits_u64(spec.row_base(rows)) || spec.row_base(rows) >= BigInt("9223372036854775808")) {
        throw RangeError("legendre_count: l(r) exceeds 2^63");
    }

    const bool analytic = opts.table != nullptr && opts.table->limit() >= to_u64(spec.row_base(rows));
    const real_t gamma = spec.params().gamma();
    // row masks over the sieving primes (weights.primes order)
    std::map<std::uint64_t, std::pair<std::uint64_t, real_t>> by_mask;  // mask -> (rows, PS weight)
    BigInt power, entry, g;
    for (std::uint64_t r = 1; r <= rows; ++r) {
        const std::uint64_t l = to_u64(spec.row_base(r));
        if (analytic ? !opts.table->is_prime(l) : !is_prime_u64(l)) continue;
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < weights.primes.size(); ++i) {
            const std::uint64_t p = weights.primes[i];
            if ((pow_mod(l % p, plan.k, p) + (v % p) + p - 1) % p == 0) mask |= std::uint64_t{1} << i;
        }
        auto& slot = by_mask[mask];
        // every prime row enters the analytic sum with the PS density gamma l^(gamma-1)
        if (analytic) slot.second += gamma * std::pow(static_cast<real_t>(l), gamma - 1);
        if (!ps_member(l, spec.params())) continue;

        ++est.r1_rows;
        ++slot.first;
        const BigInt lb = to_big(l);
        mpz_pow_ui(power.get_mpz_t(), lb.get_mpz_t(), plan.k);
        entry = power + to_big(v) - 1;
        mpz_gcd(g.get_mpz_t(), entry.get_mpz_t(), Q.get_mpz_t());
        if (g == 1) ++est.exact;
    }

    CompensatedSum upper, analytic_sum;
    for (const auto& [tau, w] : weights.weights) {
        std::uint64_t hits = 0;
        real_t hit_weight = 0;
        for (const auto& [mask, slot] : by_mask) {
            if ((tau & ~mask) == 0) {
                hits += slot.first;
                hit_weight += slot.second;
            }
        }
        upper.add(w * static_cast<real_t>(hits));
        analytic_sum.add(w * hit_weight);
    }
    est.upper_bound = upper.value();
    if (analytic) est.analytic_upper_bound = analytic_sum.value();

    real_t prod_p = 1, prod_phi = 1;
    for (auto p : weights.primes) {
        const auto roots = static_cast<real_t>(rho(p, v, plan.k));
        prod_p *= 1 - roots / static_cast<real_t>(p);
        prod_phi *= 1 - roots / static_cast<real_t>(p - 1);
    }
    est.main_product = static_cast<real_t>(est.r1_rows) * prod_p;
    est.main_product_phi = static_cast<real_t>(est.r1_rows) * prod_phi;
    const real_t exact = static_cast<real_t>(est.exact);
    est.closer_normalisation =
        std::fabs(est.main_product - exact) <= std::fabs(est.main_product_phi - exact) ? "p" : "phi";

    if (exact > est.upper_bound + 1e-9L) {
        throw ConsistencyError("upper-bound sieve violated: exact " + std::to_string(est.exact) + " > bound " +
                               std::to_string(static_cast<double>(est.upper_bound)));
    }
    return est;
}

}  // namespace psgap

#pragma once

// Prime tables built by a segmented sieve, primorials, counting functions
// over arithmetic progressions and gap scanning.

#include "psgap/core.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace psgap {

struct SieveOptions {
    std::uint64_t segment_size = std::uint64_t{1} << 20;
    /// Upper bound on the bytes the finished table plus one segment may use.
    std::uint64_t memory_budget_bytes = std::uint64_t{1} << 30;
};

/// Every prime <= limit, strictly increasing. Immutable after construction
/// and safe to share across threads.
class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
        : limit_(limit), primes_(std::move(primes)) {}

    std::uint64_t limit() const { return limit_; }
    std::span<const std::uint64_t> primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }
    bool empty() const { return primes_.empty(); }

    bool is_prime(std::uint64_t n) const {
        if (n > limit_) throw RangeError("is_prime: " + std::to_string(n) + " exceeds table limit " +
                                         std::to_string(limit_));
        return std::binary_search(primes_.begin(), primes_.end(), n);
    }

    /// pi(u): number of primes <= u.
    std::size_t pi(std::uint64_t u) const {
        return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), u) - primes_.begin());
    }

    /// Primes <= u as a view into the table.
    std::span<const std::uint64_t> up_to(std::uint64_t u) const { return primes().first(pi(u)); }

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint64_t> primes_;
};

namespace detail {

inline std::vector<std::uint64_t> small_sieve(std::uint64_t limit) {
    std::vector<std::uint8_t> composite(limit + 1, 0);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return out;
}

// Generous upper bound on pi(n) (Rosser-Schoenfeld style), used for budgeting.
inline std::uint64_t pi_upper_estimate(std::uint64_t n) {
    if (n < 17) return 7;
    const double x = static_cast<double>(n);
    return static_cast<std::uint64_t>(1.26 * x / std::log(x)) + 1;
}

}  // namespace detail

/// Segmented sieve of Eratosthenes over [2, limit].
inline PrimeTable sieve(std::uint64_t limit, const SieveOptions& opts = {}) {
    if (limit < 2) throw DomainError("sieve: limit must be >= 2");
    if (opts.segment_size == 0) throw DomainError("sieve: segment size must be positive");

    const std::uint64_t needed = detail::pi_upper_estimate(limit) * sizeof(std::uint64_t) + opts.segment_size;
    if (needed > opts.memory_budget_bytes) {
        throw ResourceError("sieve: limit " + std::to_string(limit) + " needs about " + std::to_string(needed) +
                            " bytes, exceeding the memory budget of " + std::to_string(opts.memory_budget_bytes) +
                            " bytes");
    }

    const std::uint64_t root = isqrt(limit);
    const auto base = detail::small_sieve(root);

    std::vector<std::uint64_t> primes;
    primes.reserve(detail::pi_upper_estimate(limit));

    std::vector<std::uint8_t> composite(opts.segment_size);
    std::vector<std::uint64_t> next_multiple(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) next_multiple[i] = base[i] * base[i];

    for (std::uint64_t low = 2; low <= limit; low += opts.segment_size) {
        const std::uint64_t high = std::min(limit, low + opts.segment_size - 1);
        const std::uint64_t span = high - low + 1;
        std::fill(composite.begin(), composite.begin() + static_cast<std::ptrdiff_t>(span), 0);

        for (std::size_t i = 0; i < base.size(); ++i) {
            const std::uint64_t p = base[i];
            std::uint64_t j = next_multiple[i];
            for (; j <= high; j += p) composite[j - low] = 1;
            next_multiple[i] = j;
        }
        for (std::uint64_t n = low; n <= high; ++n) {
            if (!composite[n - low]) primes.push_back(n);
        }
        if (high == limit) break;
    }
    return PrimeTable(limit, std::move(primes));
}

// -----------------------------------------------------------------------------
// Primorials
// -----------------------------------------------------------------------------

struct Primorial {
    std::uint64_t x = 0;
    BigInt value{1};
};

/// P(x): product of all primes strictly below x.
inline Primorial primorial(std::uint64_t x) {
    Primorial out{x, BigInt(1)};
    if (x <= 2) return out;
    for (auto p : detail::small_sieve(x - 1)) out.value *= static_cast<unsigned long>(p);
    return out;
}

/// Q(x) kept in factored form: the primes in (x, P(x)].
struct FactoredCoprimorial {
    std::uint64_t x = 0;
    std::vector<std::uint64_t> primes;
    /// Set when P(x) exceeded the enumeration bound; primes then stop at the bound.
    bool truncated = false;
    std::uint64_t bound = 0;
};

inline FactoredCoprimorial coprimorial(std::uint64_t x, const Primorial& P, std::uint64_t enumeration_bound) {
    if (x < 2) throw DomainError("coprimorial: x must be >= 2");
    if (P.x != x) throw DomainError("coprimorial: primorial was computed for a different x");

    FactoredCoprimorial out;
    out.x = x;
    std::uint64_t top = enumeration_bound;
    if (fits_u64(P.value) && to_u64(P.value) <= enumeration_bound) {
        top = to_u64(P.value);
    } else {
        out.truncated = true;
    }
    out.bound = top;
    if (top <= x) return out;
    const auto table = sieve(top);
    for (auto p : table.primes()) {
        if (p > x) out.primes.push_back(p);
    }
    return out;
}

// -----------------------------------------------------------------------------
// Counting functions in progressions
// -----------------------------------------------------------------------------

namespace detail {

inline void check_progression(const PrimeTable& table, std::uint64_t u, std::uint64_t d, std::uint64_t a) {
    if (u > table.limit()) {
        throw RangeError("u = " + std::to_string(u) + " exceeds the table limit " + std::to_string(table.limit()));
    }
    if (d == 0) throw DomainError("modulus d must be >= 1");
    if (d > 1 && std::gcd(a % d, d) != 1) throw DomainError("residue a must be coprime to d");
}

}  // namespace detail

/// pi(u; d, a). d = 1 counts all primes regardless of a.
inline std::uint64_t count_primes_in_progression(const PrimeTable& table, std::uint64_t u, std::uint64_t d,
                                                 std::uint64_t a) {
    detail::check_progression(table, u, d, a);
    const auto ps = table.up_to(u);
    if (d == 1) return ps.size();
    const std::uint64_t r = a % d;
    return static_cast<std::uint64_t>(std::count_if(ps.begin(), ps.end(), [&](auto p) { return p % d == r; }));
}

/// Neumaier-compensated extended-precision accumulator.
class CompensatedSum {
public:
    void add(real_t v) {
        const real_t t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    real_t value() const { return sum_ + comp_; }

private:
    real_t sum_ = 0;
    real_t comp_ = 0;
};

/// theta(u; d, a): sum of log p over primes p <= u with p = a (mod d).
inline real_t theta_in_progression(const PrimeTable& table, std::uint64_t u, std::uint64_t d, std::uint64_t a) {
    detail::check_progression(table, u, d, a);
    CompensatedSum acc;
    const std::uint64_t r = d == 1 ? 0 : a % d;
    for (auto p : table.up_to(u)) {
        if (d == 1 || p % d == r) acc.add(std::log(static_cast<real_t>(p)));
    }
    return acc.value();
}

// -----------------------------------------------------------------------------
// Gaps
// -----------------------------------------------------------------------------

struct GapRecord {
    std::uint64_t lower_prime = 0;
    std::uint64_t upper_prime = 0;
    std::uint64_t gap = 0;

    friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

/// All consecutive-prime pairs in the table whose gap is at least min_gap.
inline std::vector<GapRecord> scan_gaps(const PrimeTable& table, std::uint64_t min_gap) {
    if (table.empty()) throw DomainError("scan_gaps: empty prime table");
    std::vector<GapRecord> out;
    const auto ps = table.primes();
    for (std::size_t i = 1; i < ps.size(); ++i) {
        const std::uint64_t g = ps[i] - ps[i - 1];
        if (g >= min_gap) out.push_back({ps[i - 1], ps[i], g});
    }
    return out;
}

/// Record-setting gaps: each strictly larger than every earlier gap.
inline std::vector<GapRecord> maximal_gaps(const PrimeTable& table) {
    std::vector<GapRecord> out;
    std::uint64_t best = 0;
    for (const auto& rec : scan_gaps(table, 1)) {
        if (rec.gap > best) {
            best = rec.gap;
            out.push_back(rec);
        }
    }
    return out;
}

}  // namespace psgap

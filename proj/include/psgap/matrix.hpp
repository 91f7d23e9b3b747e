#pragma once

// The avoidance matrix a_{r,u} = (m0 + 1 + r P(x))^k + u - 1 built on a
// covering plan, row classification into R1 (PS-prime base) and R2 (row
// contains a prime), gap-scale functions g1/g2 and avoidance checks.

#include "psgap/core.hpp"
#include "psgap/primality.hpp"
#include "psgap/primes.hpp"
#include "psgap/ps.hpp"
#include "psgap/rankin.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace psgap {

class MatrixSpec {
public:
    MatrixSpec(CoveringPlan plan, PSParameters params, std::uint64_t r_max)
        : plan_(std::move(plan)), params_(params), r_max_(r_max), P_(primorial(plan_.x)) {
        if (r_max_ == 0) throw DomainError("MatrixSpec: r_max must be >= 1");
        phi_P_ = 1;
        for (auto p : detail::primes_below(plan_.x)) phi_P_ *= static_cast<unsigned long>(p - 1);
    }

    const CoveringPlan& plan() const { return plan_; }
    const PSParameters& params() const { return params_; }
    std::uint64_t r_max() const { return r_max_; }
    std::uint64_t y() const { return plan_.y; }
    unsigned k() const { return plan_.k; }
    const BigInt& primorial_value() const { return P_.value; }
    const BigInt& phi_primorial() const { return phi_P_; }

    /// 1 + log(r_max) / log P(x): the exponent D for which P(x)^(D-1) rows are scanned.
    real_t d_effective() const {
        return 1 + std::log(static_cast<real_t>(r_max_)) / log_big(P_.value);
    }

    /// l(r) = m0 + 1 + r P(x).
    BigInt row_base(std::uint64_t r) const { return plan_.m0 + 1 + to_big(r) * P_.value; }

private:
    CoveringPlan plan_;
    PSParameters params_;
    std::uint64_t r_max_;
    Primorial P_;
    BigInt phi_P_;
};

inline BigInt row_entry(const MatrixSpec& spec, std::uint64_t r, std::uint64_t u) {
    if (r < 1 || r > spec.r_max()) throw RangeError("row_entry: r out of range");
    if (u < 1 || u > spec.y()) throw RangeError("row_entry: u out of range");
    BigInt out;
    const BigInt l = spec.row_base(r);
    mpz_pow_ui(out.get_mpz_t(), l.get_mpz_t(), spec.k());
    out += to_big(u - 1);
    return out;
}

// -----------------------------------------------------------------------------
// Classification
// -----------------------------------------------------------------------------

struct CompositeEvidence {
    std::uint64_t u = 0;
    /// Smallest prime factor below 10^5, or 0 when compositeness came from Miller-Rabin.
    std::uint64_t factor = 0;

    friend bool operator==(const CompositeEvidence&, const CompositeEvidence&) = default;
};

struct WitnessRow {
    std::uint64_t r = 0;
    std::uint64_t l = 0;
    std::vector<CompositeEvidence> certificate;

    friend bool operator==(const WitnessRow&, const WitnessRow&) = default;
};

struct RowClassification {
    std::uint64_t r_begin = 1;
    std::uint64_t r_end = 0;  // inclusive
    std::vector<std::uint64_t> r1;
    std::vector<std::uint64_t> r2;
    std::vector<WitnessRow> witnesses;  // rows in R1 \ R2

    friend bool operator==(const RowClassification&, const RowClassification&) = default;
};

struct MatrixReport {
    std::uint64_t r_scanned = 0;
    bool truncated = false;
    std::uint64_t r1_count = 0;
    std::uint64_t r2_count = 0;
    std::uint64_t r1_minus_r2_count = 0;
    std::vector<WitnessRow> witnesses;
    real_t prediction = 0;
    real_t ratio = 0;
    /// prediction / log l_max: the count a prime density 1/log gives. Diagnostic only.
    real_t log_corrected_prediction = 0;
    real_t log_corrected_ratio = 0;
    real_t d_effective = 0;

    friend bool operator==(const MatrixReport&, const MatrixReport&) = default;
};

struct ClassifyOptions {
    /// Maximum number of rows scanned; larger r_max gives a truncated report.
    std::uint64_t operation_budget = 10'000'000;
    PrimalityOptions primality{};
};

/// Classifies rows r_begin..r_end. R1: l(r) prime and a PS number. R2: rows of
/// R1 with a prime a_{r,u} for some u in [2, y]; a_{r,1} = l(r)^k is a perfect
/// power and is asserted composite rather than scanned.
inline RowClassification classify_range(const MatrixSpec& spec, std::uint64_t r_begin, std::uint64_t r_end,
                                        const ClassifyOptions& opts = {}) {
    if (r_begin < 1 || r_end > spec.r_max()) throw RangeError("classify_range: rows out of range");
    if (!fits_u64(spec.row_base(r_end)) || spec.row_base(r_end) >= BigInt("9223372036854775808")) {
        throw RangeError("classify_range: l(r) exceeds 2^63, beyond PS membership support");
    }
    const PrimalityTester is_prime(opts.primality);
    RowClassification out;
    out.r_begin = r_begin;
    out.r_end = r_end;

    BigInt power, entry;
    for (std::uint64_t r = r_begin; r <= r_end; ++r) {
        const std::uint64_t l = to_u64(spec.row_base(r));
        if (!is_prime_u64(l) || !ps_member(l, spec.params())) continue;
        out.r1.push_back(r);

        const BigInt lb = to_big(l);
        mpz_pow_ui(power.get_mpz_t(), lb.get_mpz_t(), spec.k());
        if (spec.k() >= 2 && l > 1 && is_prime(power)) {
            throw ConsistencyError("perfect power l(r)^k classified prime at r = " + std::to_string(r));
        }

        bool has_prime = false;
        WitnessRow w{r, l, {}};
        for (std::uint64_t u = 2; u <= spec.y(); ++u) {
            entry = power + to_big(u - 1);
            if (is_prime(entry)) {
                has_prime = true;
                break;
            }
            w.certificate.push_back({u, small_factor(entry)});
        }
        if (has_prime) {
            out.r2.push_back(r);
        } else {
            out.witnesses.push_back(std::move(w));
        }
    }
    return out;
}

/// (l_max)^gamma / phi(P(x)) with l_max = m0 + 1 + rows P(x).
inline real_t density_prediction(const MatrixSpec& spec, std::uint64_t rows) {
    const BigInt l_max = spec.row_base(rows);
    return std::exp(spec.params().gamma() * log_big(l_max) - log_big(spec.phi_primorial()));
}

inline real_t density_prediction(const MatrixSpec& spec) { return density_prediction(spec, spec.r_max()); }

/// Ordered merge of consecutive range classifications into a report.
inline MatrixReport assemble_report(const MatrixSpec& spec, const std::vector<RowClassification>& parts,
                                    bool truncated) {
    MatrixReport rep;
    rep.truncated = truncated;
    std::uint64_t expected_begin = 1;
    for (const auto& part : parts) {
        if (part.r_begin != expected_begin) throw ConsistencyError("row ranges are not consecutive");
        expected_begin = part.r_end + 1;
        rep.r1_count += part.r1.size();
        rep.r2_count += part.r2.size();
        rep.witnesses.insert(rep.witnesses.end(), part.witnesses.begin(), part.witnesses.end());
    }
    rep.r_scanned = expected_begin - 1;
    rep.r1_minus_r2_count = rep.r1_count - rep.r2_count;
    if (rep.r1_minus_r2_count != rep.witnesses.size()) throw ConsistencyError("witness count differs from |R1 \\ R2|");
    rep.d_effective = spec.d_effective();
    if (rep.r_scanned > 0) {
        rep.prediction = density_prediction(spec, rep.r_scanned);
        rep.ratio = static_cast<real_t>(rep.r1_count) / rep.prediction;
        rep.log_corrected_prediction = rep.prediction / log_big(spec.row_base(rep.r_scanned));
        rep.log_corrected_ratio = static_cast<real_t>(rep.r1_count) / rep.log_corrected_prediction;
    }
    return rep;
}

inline MatrixReport classify_rows(const MatrixSpec& spec, const ClassifyOptions& opts = {}) {
    const std::uint64_t rows = std::min(spec.r_max(), opts.operation_budget);
    std::vector<RowClassification> parts;
    if (rows > 0) parts.push_back(classify_range(spec, 1, rows, opts));
    return assemble_report(spec, parts, rows < spec.r_max());
}

// -----------------------------------------------------------------------------
// Gap-scale functions
// -----------------------------------------------------------------------------

enum class GFunction { g1, g2, custom };

/// g1 = log m log_2 m log_4 m / (log_3 m)^2 needs log_4 m > 0;
/// g2 = log m log_2 m log_4 m / log_3 m needs log_3 m > 0.
inline real_t g_from_log(real_t log_m, GFunction id) {
    if (!(log_m > 0)) throw DomainError("g function: log m must be positive");
    const real_t l2 = std::log(log_m);
    if (!(l2 > 0)) throw DomainError("g function: log_2 m must be positive");
    const real_t l3 = std::log(l2);
    if (!(l3 > 0)) throw DomainError("g function: m below the log_3 threshold");
    const real_t l4 = std::log(l3);
    switch (id) {
        case GFunction::g1:
            if (!(l4 > 0)) throw DomainError("g1: m below the log_4 threshold");
            return log_m * l2 * l4 / (l3 * l3);
        case GFunction::g2:
            return log_m * l2 * l4 / l3;
        case GFunction::custom:
            break;
    }
    throw DomainError("g function: custom functions have no closed form");
}

inline real_t g_function(const BigInt& m, GFunction id) {
    if (cmp(m, 1) <= 0) throw DomainError("g function: m must exceed 1");
    return g_from_log(log_big(m), id);
}

// -----------------------------------------------------------------------------
// Avoidance
// -----------------------------------------------------------------------------

enum class Side { left, right, both };

struct AvoidanceQuery {
    BigInt m;
    Side side = Side::right;
    real_t constant = 1;
    GFunction function_id = GFunction::custom;
    /// h(m) for GFunction::custom; defaults to h = 1, so the window is `constant`.
    std::function<real_t(const BigInt&)> custom;
};

struct AvoidanceResult {
    bool avoiding = false;
    std::int64_t window = 0;
    /// Offset u of the first prime m + u found, scanning offsets in increasing order.
    std::optional<std::int64_t> prime_offset;
};

inline std::int64_t avoidance_window(const AvoidanceQuery& q) {
    real_t h = 1;
    if (q.function_id == GFunction::custom) {
        if (q.custom) h = q.custom(q.m);
    } else {
        h = g_function(q.m, q.function_id);
    }
    const real_t w = std::floor(q.constant * h);
    if (!(w >= 0)) throw DomainError("avoidance window is negative");
    if (w > 1e15L) throw ResourceError("avoidance window too large to scan");
    return static_cast<std::int64_t>(w);
}

/// True iff m + u is not prime for every u in the window fixed by side,
/// constant and function. Tester: callable BigInt -> bool.
template <class Tester>
AvoidanceResult check_avoidance(const AvoidanceQuery& q, const Tester& is_prime) {
    AvoidanceResult res;
    res.window = avoidance_window(q);
    const std::int64_t lo = q.side == Side::right ? 0 : -res.window;
    const std::int64_t hi = q.side == Side::left ? 0 : res.window;
    BigInt v;
    for (std::int64_t u = lo; u <= hi; ++u) {
        v = q.m + BigInt(static_cast<long>(u));
        if (is_prime(v)) {
            res.prime_offset = u;
            return res;
        }
    }
    res.avoiding = true;
    return res;
}

inline AvoidanceResult check_avoidance(const AvoidanceQuery& q) { return check_avoidance(q, PrimalityTester{}); }

// -----------------------------------------------------------------------------
// Witness search
// -----------------------------------------------------------------------------

struct TheoremWitness {
    std::uint64_t ps_prime = 0;   // p~
    std::uint64_t power = 0;      // p~^k
    std::uint64_t lower = 0;      // p_n
    std::uint64_t upper = 0;      // p_{n+1}
    std::uint64_t gap = 0;
    /// gap / g2(p_n), present when g2(p_n) is defined and positive.
    std::optional<real_t> g2_ratio;
    /// gap / log p_n.
    real_t merit = 0;
};

/// Observational scan: for each PS prime p~ with p~^k <= limit, the primes
/// p_n <= p~^k < p_{n+1} around it. Ranked by g2_ratio (descending) where
/// defined, then by merit; only the first `top` entries are kept (0 = all).
inline std::vector<TheoremWitness> theorem_witness_search(const PSParameters& params, unsigned k,
                                                          const PrimeTable& table, std::size_t top = 0) {
    if (k < 1) throw DomainError("theorem_witness_search: k must be >= 1");
    std::uint64_t root = 1;
    while (true) {
        const auto next = static_cast<unsigned __int128>(root + 1);
        unsigned __int128 pw = 1;
        for (unsigned i = 0; i < k && pw <= table.limit(); ++i) pw *= next;
        if (pw > table.limit()) break;
        ++root;
    }
    std::vector<TheoremWitness> out;
    const auto primes = table.primes();
    for (auto pt : ps_primes_up_to(root, params, table)) {
        std::uint64_t q = 1;
        for (unsigned i = 0; i < k; ++i) q *= pt;
        const std::size_t n = table.pi(q);
        if (n == 0 || n >= primes.size()) continue;
        TheoremWitness w{pt, q, primes[n - 1], primes[n], primes[n] - primes[n - 1], std::nullopt, 0};
        const real_t lp = std::log(static_cast<real_t>(w.lower));
        w.merit = static_cast<real_t>(w.gap) / lp;
        if (lp > 0 && std::log(lp) > 0 && std::log(std::log(lp)) > 0) {
            const real_t g2 = g_from_log(lp, GFunction::g2);
            if (g2 > 0) w.g2_ratio = static_cast<real_t>(w.gap) / g2;
        }
        out.push_back(w);
    }
    std::stable_sort(out.begin(), out.end(), [](const TheoremWitness& a, const TheoremWitness& b) {
        if (a.g2_ratio.has_value() != b.g2_ratio.has_value()) return a.g2_ratio.has_value();
        if (a.g2_ratio && *a.g2_ratio != *b.g2_ratio) return *a.g2_ratio > *b.g2_ratio;
        return a.merit > b.merit;
    });
    if (top > 0 && out.size() > top) out.resize(top);
    return out;
}

}  // namespace psgap

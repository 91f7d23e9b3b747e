#pragma once

// Dirichlet character groups mod q built from the CRT decomposition of
// (Z/q)^x into cyclic components. A character is addressed by its exponent
// vector j (one entry per component) and its values are exact roots of unity
// zeta_N^k with N the exponent of the group.

#include "psgap/core.hpp"
#include "psgap/primes.hpp"

#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psgap {

namespace detail {

inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        const auto q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw DomainError("mod_inverse: not invertible");
    return mod_floor(t, m);
}

inline std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
    if (p == 2) return 1;
    const auto factors = distinct_prime_factors(p - 1);
    for (std::uint64_t g = 2;; ++g) {
        bool ok = true;
        for (auto r : factors) {
            if (pow_mod(g, (p - 1) / r, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

}  // namespace detail

/// One cyclic factor of (Z/q)^x, living inside the prime-power block p^e.
struct CyclicComponent {
    std::uint64_t prime = 0;
    unsigned exponent = 0;
    std::uint64_t block_modulus = 0;  // p^e
    std::uint64_t order = 0;
    std::uint64_t generator = 0;         // mod block_modulus
    std::uint64_t generator_mod_q = 0;   // = generator mod the block, 1 mod the other blocks
    std::vector<std::uint32_t> dlog;     // residue mod block_modulus -> exponent, kNoLog for non-units
};

inline constexpr std::uint32_t kNoLog = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::uint64_t kMaxCharacterModulus = 10'000'000;

class CharacterTable {
public:
    std::uint64_t modulus() const { return q_; }
    std::uint64_t size() const { return phi_; }
    /// Common root-of-unity order N: every value is zeta_N^k.
    std::uint64_t order() const { return order_; }
    const std::vector<CyclicComponent>& components() const { return components_; }

    std::vector<std::uint64_t> exponents_of_index(std::uint64_t index) const {
        std::vector<std::uint64_t> j(components_.size());
        for (std::size_t i = 0; i < components_.size(); ++i) {
            j[i] = index % components_[i].order;
            index /= components_[i].order;
        }
        return j;
    }

    std::uint64_t index_of_exponents(const std::vector<std::uint64_t>& j) const {
        std::uint64_t index = 0;
        for (std::size_t i = components_.size(); i-- > 0;) index = index * components_[i].order + j[i];
        return index;
    }

    /// Discrete logs of a unit a, one per component; nullopt when gcd(a, q) > 1.
    std::optional<std::vector<std::uint64_t>> dlogs(std::uint64_t a) const {
        a %= q_;
        if (std::gcd(a, q_) != 1) return std::nullopt;
        std::vector<std::uint64_t> e(components_.size());
        for (std::size_t i = 0; i < components_.size(); ++i) {
            const auto& c = components_[i];
            e[i] = c.dlog[a % c.block_modulus];
        }
        return e;
    }

    /// Exponent step contributed by one unit of dlog in component i.
    std::uint64_t step(std::size_t i) const { return order_ / components_[i].order; }

    /// chi_index(a) as k with chi(a) = zeta_N^k, or nullopt when chi(a) = 0.
    std::optional<std::uint64_t> value(std::uint64_t index, std::uint64_t a) const {
        const auto e = dlogs(a);
        if (!e) return std::nullopt;
        return value_from(exponents_of_index(index), *e);
    }

    std::uint64_t value_from(const std::vector<std::uint64_t>& j, const std::vector<std::uint64_t>& e) const {
        unsigned __int128 k = 0;
        for (std::size_t i = 0; i < components_.size(); ++i) {
            k += static_cast<unsigned __int128>(j[i] * e[i] % components_[i].order) * step(i);
        }
        return static_cast<std::uint64_t>(k % order_);
    }

    std::complex<real_t> complex_value(std::uint64_t index, std::uint64_t a) const {
        const auto k = value(index, a);
        if (!k) return {0, 0};
        const real_t angle = 2 * std::numbers::pi_v<real_t> * static_cast<real_t>(*k) / static_cast<real_t>(order_);
        return {std::cos(angle), std::sin(angle)};
    }

    /// Index of the conjugate character.
    std::uint64_t conjugate(std::uint64_t index) const {
        auto j = exponents_of_index(index);
        for (std::size_t i = 0; i < j.size(); ++i) j[i] = (components_[i].order - j[i]) % components_[i].order;
        return index_of_exponents(j);
    }

    /// Index of the pointwise product chi_a * chi_b.
    std::uint64_t product(std::uint64_t a, std::uint64_t b) const {
        auto ja = exponents_of_index(a);
        const auto jb = exponents_of_index(b);
        for (std::size_t i = 0; i < ja.size(); ++i) ja[i] = (ja[i] + jb[i]) % components_[i].order;
        return index_of_exponents(ja);
    }

private:
    friend CharacterTable build_characters(std::uint64_t q);

    std::uint64_t q_ = 1;
    std::uint64_t phi_ = 1;
    std::uint64_t order_ = 1;
    std::vector<CyclicComponent> components_;
};

/// Complete character group mod q. Index 0 is always the principal character.
inline CharacterTable build_characters(std::uint64_t q) {
    if (q == 0) throw DomainError("build_characters: modulus must be >= 1");
    if (q > kMaxCharacterModulus) {
        throw ResourceError("build_characters: modulus " + std::to_string(q) + " exceeds the table bound " +
                            std::to_string(kMaxCharacterModulus));
    }
    CharacterTable t;
    t.q_ = q;
    t.phi_ = euler_phi(q);

    auto lift = [q](std::uint64_t residue, std::uint64_t block) {
        const std::uint64_t rest = q / block;
        if (rest == 1) return residue % q;
        // x = residue (mod block), x = 1 (mod rest)
        const std::uint64_t a = mul_mod(mul_mod(residue, rest, q), detail::mod_inverse(rest % block, block), q);
        const std::uint64_t b = mul_mod(block, detail::mod_inverse(block % rest, rest), q);
        return (a + b) % q;
    };

    for (const auto& pp : factorize(q)) {
        const std::uint64_t m = pp.value;
        if (pp.prime == 2) {
            if (pp.exponent == 1) continue;
            if (pp.exponent == 2) {
                CyclicComponent c{2, 2, 4, 2, 3, lift(3, 4), std::vector<std::uint32_t>(4, kNoLog)};
                c.dlog[1] = 0;
                c.dlog[3] = 1;
                t.components_.push_back(std::move(c));
                continue;
            }
            // (Z/2^e)^x = <-1> x <5>
            CyclicComponent sign{2, pp.exponent, m, 2, m - 1, lift(m - 1, m), std::vector<std::uint32_t>(m, kNoLog)};
            CyclicComponent five{2, pp.exponent, m, m / 4, 5, lift(5, m), std::vector<std::uint32_t>(m, kNoLog)};
            std::uint64_t x = 1;
            for (std::uint64_t s = 0; s < m / 4; ++s) {
                sign.dlog[x] = 0;
                five.dlog[x] = static_cast<std::uint32_t>(s);
                sign.dlog[m - x] = 1;
                five.dlog[m - x] = static_cast<std::uint32_t>(s);
                x = x * 5 % m;
            }
            t.components_.push_back(std::move(sign));
            t.components_.push_back(std::move(five));
            continue;
        }
        std::uint64_t g = detail::primitive_root_mod_prime(pp.prime);
        if (pp.exponent > 1 && pow_mod(g, pp.prime - 1, pp.prime * pp.prime) == 1) g += pp.prime;
        const std::uint64_t order = m / pp.prime * (pp.prime - 1);
        CyclicComponent c{pp.prime, pp.exponent, m, order, g, lift(g, m), std::vector<std::uint32_t>(m, kNoLog)};
        std::uint64_t x = 1;
        for (std::uint64_t s = 0; s < order; ++s) {
            c.dlog[x] = static_cast<std::uint32_t>(s);
            x = mul_mod(x, g, m);
        }
        t.components_.push_back(std::move(c));
    }

    for (const auto& c : t.components_) t.order_ = std::lcm(t.order_, c.order);
    return t;
}

// -----------------------------------------------------------------------------
// Exact group-structure and orthogonality checks
// -----------------------------------------------------------------------------

/// Proves, by exhaustion over the units mod q, that the dlog map is a group
/// isomorphism onto the product of the cyclic components: it is a bijection
/// and multiplying by the i-th generator adds one to the i-th coordinate only.
/// Closure, distinctness and both orthogonality relations for every pair of
/// characters follow exactly from this. Throws ConsistencyError on failure.
inline void verify_group_structure(const CharacterTable& t) {
    const std::uint64_t q = t.modulus();
    const auto& comps = t.components();
    std::uint64_t prod = 1;
    for (const auto& c : comps) prod *= c.order;
    if (prod != t.size()) throw ConsistencyError("component orders do not multiply to phi(q)");

    std::vector<std::uint8_t> seen(t.size(), 0);
    std::uint64_t units = 0;
    for (std::uint64_t a = 0; a < q; ++a) {
        const auto e = t.dlogs(a);
        if (!e) continue;
        ++units;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if ((*e)[i] >= comps[i].order) throw ConsistencyError("dlog out of range");
        }
        const auto idx = t.index_of_exponents(*e);
        if (seen[idx]) throw ConsistencyError("dlog map is not injective mod " + std::to_string(q));
        seen[idx] = 1;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto shifted = t.dlogs(mul_mod(a, comps[i].generator_mod_q, q));
            if (!shifted) throw ConsistencyError("generator is not a unit");
            for (std::size_t k = 0; k < comps.size(); ++k) {
                const auto expect = k == i ? ((*e)[k] + 1) % comps[k].order : (*e)[k];
                if ((*shifted)[k] != expect) {
                    throw ConsistencyError("generator shift breaks the dlog homomorphism mod " + std::to_string(q));
                }
            }
        }
    }
    if (units != t.size()) throw ConsistencyError("unit count differs from phi(q)");
}

/// sum_a zeta_N^{k(a)} for an exponent histogram, decided exactly: the
/// histogram of a character is uniform on a subgroup of the N-th roots of
/// unity, whose sum is |subgroup| * [subgroup trivial] * multiplicity.
/// Returns nullopt when the histogram is not of that shape.
inline std::optional<std::uint64_t> exact_root_sum(const std::vector<std::uint64_t>& histogram) {
    const std::uint64_t n = histogram.size();
    std::uint64_t step = n;
    std::uint64_t total = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        if (histogram[k] == 0) continue;
        step = std::gcd(step, k);
        total += histogram[k];
    }
    if (total == 0) return 0;
    const std::uint64_t classes = n / step;
    if (total % classes != 0) return std::nullopt;
    for (std::uint64_t k = 0; k < n; ++k) {
        const bool in_subgroup = k % step == 0;
        if (histogram[k] != (in_subgroup ? total / classes : 0)) return std::nullopt;
    }
    return classes == 1 ? total : 0;
}

/// Literal Gram matrix: sum_a chi(a) conj(chi'(a)) = phi(q) [chi = chi'] for
/// every ordered pair, summed over all units. Cost phi(q)^3.
inline void verify_orthogonality_exhaustive(const CharacterTable& t) {
    const std::uint64_t q = t.modulus();
    std::vector<std::vector<std::uint64_t>> values(t.size());
    for (std::uint64_t idx = 0; idx < t.size(); ++idx) {
        values[idx].reserve(t.size());
        for (std::uint64_t a = 0; a < q; ++a) {
            if (auto v = t.value(idx, a)) values[idx].push_back(*v);
        }
    }
    const std::uint64_t n = t.order();
    std::vector<std::uint64_t> hist(n);
    for (std::uint64_t i = 0; i < t.size(); ++i) {
        for (std::uint64_t k = 0; k < t.size(); ++k) {
            std::fill(hist.begin(), hist.end(), 0);
            for (std::size_t r = 0; r < values[i].size(); ++r) ++hist[(values[i][r] + n - values[k][r]) % n];
            const auto sum = exact_root_sum(hist);
            const std::uint64_t expect = i == k ? t.size() : 0;
            if (!sum || *sum != expect) {
                throw ConsistencyError("orthogonality fails mod " + std::to_string(q) + " for characters " +
                                       std::to_string(i) + ", " + std::to_string(k));
            }
        }
    }
}

// -----------------------------------------------------------------------------
// Theta decomposition
// -----------------------------------------------------------------------------

struct ThetaDecomposition {
    std::uint64_t q = 1;
    std::uint64_t a = 0;
    std::uint64_t u = 0;
    real_t theta_direct = 0;
    real_t theta_via_characters = 0;
    real_t residual = 0;
};

class IdentityViolation : public ConsistencyError {
public:
    using ConsistencyError::ConsistencyError;
};

inline constexpr real_t kThetaIdentityTolerance = 1e-9L;

/// theta(u; q, a) directly and as (1/phi) sum_chi conj(chi(a)) sum_{p <= u} chi(p) log p.
/// chi(p) = 0 for p | q, so the principal term runs over p not dividing q.
inline ThetaDecomposition evaluate_theta_decomposition(const PrimeTable& table, const CharacterTable& chars,
                                                       std::uint64_t u, std::uint64_t a) {
    const std::uint64_t q = chars.modulus();
    if (std::gcd(a % q, q) != 1) throw DomainError("theta decomposition: a must be coprime to q");
    if (u > table.limit()) throw RangeError("theta decomposition: u exceeds table limit");

    ThetaDecomposition out{q, a % q, u, 0, 0, 0};
    out.theta_direct = theta_in_progression(table, u, q, a % q);

    // log-weight per residue class, then per-character sums over the occupied classes
    std::vector<real_t> class_weight(q, 0);
    for (auto p : table.up_to(u)) class_weight[p % q] += std::log(static_cast<real_t>(p));
    struct Occupied {
        real_t weight;
        std::vector<std::uint64_t> steps;
        std::uint64_t current;
    };
    std::vector<Occupied> occupied;
    const std::uint64_t n = chars.order();
    for (std::uint64_t b = 0; b < q; ++b) {
        if (class_weight[b] == 0) continue;
        const auto e = chars.dlogs(b);
        if (!e) continue;
        Occupied o{class_weight[b], {}, 0};
        for (std::size_t i = 0; i < e->size(); ++i) o.steps.push_back((*e)[i] * chars.step(i) % n);
        occupied.push_back(std::move(o));
    }
    const auto ea = chars.dlogs(a);
    std::vector<std::uint64_t> steps_a;
    for (std::size_t i = 0; i < ea->size(); ++i) steps_a.push_back((*ea)[i] * chars.step(i) % n);

    std::vector<real_t> cos_table(n), sin_table(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const real_t angle = 2 * std::numbers::pi_v<real_t> * static_cast<real_t>(k) / static_cast<real_t>(n);
        cos_table[k] = std::cos(angle);
        sin_table[k] = std::sin(angle);
    }

    // Walk characters in mixed-radix order, updating each exponent incrementally.
    const auto& comps = chars.components();
    std::vector<std::uint64_t> j(comps.size(), 0);
    std::uint64_t current_a = 0;
    CompensatedSum total_re;
    for (std::uint64_t idx = 0; idx < chars.size(); ++idx) {
        CompensatedSum re, im;
        for (const auto& o : occupied) {
            re.add(o.weight * cos_table[o.current]);
            im.add(o.weight * sin_table[o.current]);
        }
        // conj(chi(a)) * S_chi, real part
        total_re.add(cos_table[current_a] * re.value() + sin_table[current_a] * im.value());

        for (std::size_t i = 0; i < comps.size(); ++i) {
            for (auto& o : occupied) o.current = (o.current + o.steps[i]) % n;
            current_a = (current_a + steps_a[i]) % n;
            if (++j[i] < comps[i].order) break;
            j[i] = 0;
        }
    }
    out.theta_via_characters = total_re.value() / static_cast<real_t>(chars.size());
    out.residual = std::fabs(out.theta_direct - out.theta_via_characters);
    return out;
}

/// As evaluate_theta_decomposition, throwing IdentityViolation when the
/// residual exceeds 1e-9 * max(1, theta).
inline ThetaDecomposition verify_theta_decomposition(const PrimeTable& table, const CharacterTable& chars,
                                                     std::uint64_t u, std::uint64_t a) {
    auto out = evaluate_theta_decomposition(table, chars, u, a);
    if (out.residual > kThetaIdentityTolerance * std::max<real_t>(1, out.theta_direct)) {
        throw IdentityViolation("theta decomposition residual " + std::to_string(static_cast<double>(out.residual)) +
                                " exceeds tolerance for q = " + std::to_string(out.q));
    }
    return out;
}

// -----------------------------------------------------------------------------
// Primitive characters
// -----------------------------------------------------------------------------

struct PrimitiveDecomposition {
    std::uint64_t index = 0;
    std::uint64_t conductor = 1;
    std::uint64_t primitive_index = 0;
    CharacterTable primitive_table;
};

namespace detail {

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> small, large;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

// Smallest a = r (mod f) with gcd(a, q) = 1.
inline std::uint64_t coprime_lift(std::uint64_t r, std::uint64_t f, std::uint64_t q) {
    for (std::uint64_t a = r % f; a < q + f; a += f) {
        if (std::gcd(a, q) == 1) return a % q;
    }
    throw ConsistencyError("no coprime lift exists");
}

}  // namespace detail

/// True iff chi_index is trivial on the units congruent to 1 mod f.
inline bool factors_through(const CharacterTable& chars, std::uint64_t index, std::uint64_t f) {
    const std::uint64_t q = chars.modulus();
    for (std::uint64_t a = 1; a <= q; a += f) {
        const auto v = chars.value(index, a);
        if (v && *v != 0) return false;
    }
    return true;
}

/// Conductor and primitive character inducing chi_index. Agreement on every
/// unit mod q is verified; a mismatch raises ConsistencyError.
inline PrimitiveDecomposition primitive_ancestor(const CharacterTable& chars, std::uint64_t index) {
    if (index >= chars.size()) throw RangeError("primitive_ancestor: character index out of range");
    const std::uint64_t q = chars.modulus();
    PrimitiveDecomposition out;
    out.index = index;
    for (auto f : detail::divisors(q)) {
        if (factors_through(chars, index, f)) {
            out.conductor = f;
            break;
        }
    }
    const std::uint64_t f = out.conductor;
    out.primitive_table = build_characters(f);
    const auto& prim = out.primitive_table;

    std::vector<std::uint64_t> j(prim.components().size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& c = prim.components()[i];
        const auto k = chars.value(index, detail::coprime_lift(c.generator_mod_q, f, q));
        const unsigned __int128 scaled = static_cast<unsigned __int128>(*k) * c.order;
        if (scaled % chars.order() != 0) throw ConsistencyError("induced character is not defined mod conductor");
        j[i] = static_cast<std::uint64_t>(scaled / chars.order());
    }
    out.primitive_index = prim.index_of_exponents(j);

    for (std::uint64_t a = 0; a < q; ++a) {
        const auto k = chars.value(index, a);
        if (!k) continue;
        const auto k_star = prim.value(out.primitive_index, a % f);
        if (!k_star || static_cast<unsigned __int128>(*k) * prim.order() !=
                           static_cast<unsigned __int128>(*k_star) * chars.order()) {
            throw ConsistencyError("primitive character disagrees with chi on residue " + std::to_string(a));
        }
    }
    return out;
}

/// sum_{p <= u} |chi(p) - chi*(p)| log p, summed literally over all primes <= u.
inline real_t induced_discrepancy(const CharacterTable& chars, const PrimitiveDecomposition& dec,
                                  const PrimeTable& table, std::uint64_t u) {
    if (u > table.limit()) throw RangeError("induced_discrepancy: u exceeds table limit");
    CompensatedSum acc;
    for (auto p : table.up_to(u)) {
        const auto diff = chars.complex_value(dec.index, p) -
                          dec.primitive_table.complex_value(dec.primitive_index, p % dec.conductor);
        const real_t mag = std::abs(diff);
        if (mag > 1e-15L) acc.add(mag * std::log(static_cast<real_t>(p)));
    }
    return acc.value();
}

}  // namespace psgap

#pragma once

// JSON and CSV forms of plans, reports and estimates.

#include "psgap/characters.hpp"
#include "psgap/matrix.hpp"
#include "psgap/primes.hpp"
#include "psgap/ps.hpp"
#include "psgap/rankin.hpp"
#include "psgap/sieve.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <string>

namespace psgap {

using json = nlohmann::json;

// long double is written as double; JSON has no wider number type.
inline double to_json_number(real_t v) { return static_cast<double>(v); }

// -- covering plans -----------------------------------------------------------

inline json plan_to_json(const CoveringPlan& plan) {
    json choices = json::array();
    for (const auto& c : plan.choices) choices.push_back({{"p", c.p}, {"b", c.b}, {"w", c.w}});
    return {{"x", plan.x}, {"k", plan.k},       {"y", plan.y},
            {"m0", plan.m0.get_str()}, {"choices", choices}, {"V", plan.V}};
}

inline CoveringPlan plan_from_json(const json& j) {
    CoveringPlan plan;
    try {
        plan.x = j.at("x").get<std::uint64_t>();
        plan.k = j.at("k").get<unsigned>();
        plan.y = j.at("y").get<std::uint64_t>();
        plan.m0 = BigInt(j.at("m0").get<std::string>());
        for (const auto& c : j.at("choices")) {
            plan.choices.push_back({c.at("p").get<std::uint64_t>(), c.at("b").get<std::uint64_t>(),
                                    c.at("w").get<std::uint64_t>(), 0});
        }
        plan.V = j.at("V").get<std::vector<std::uint64_t>>();
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed plan: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw DomainError("malformed plan: m0 is not a decimal integer");
    }
    return plan;
}

// -- matrix reports -----------------------------------------------------------

inline json report_to_json(const MatrixReport& rep) {
    json witnesses = json::array();
    for (const auto& w : rep.witnesses) {
        json cert = json::array();
        for (const auto& e : w.certificate) cert.push_back({{"u", e.u}, {"factor", e.factor}});
        witnesses.push_back({{"r", w.r}, {"l", w.l}, {"certificate", cert}});
    }
    return {{"r1_count", rep.r1_count},
            {"r2_count", rep.r2_count},
            {"r1_minus_r2_count", rep.r1_minus_r2_count},
            {"r_scanned", rep.r_scanned},
            {"truncated", rep.truncated},
            {"d_effective", to_json_number(rep.d_effective)},
            {"witnesses", witnesses},
            {"prediction", to_json_number(rep.prediction)},
            {"ratio", to_json_number(rep.ratio)},
            {"log_corrected_prediction", to_json_number(rep.log_corrected_prediction)},
            {"log_corrected_ratio", to_json_number(rep.log_corrected_ratio)}};
}

// -- primes -------------------------------------------------------------------

inline json gaps_to_json(const std::vector<GapRecord>& gaps) {
    json out = json::array();
    for (const auto& g : gaps) out.push_back({{"lower", g.lower_prime}, {"upper", g.upper_prime}, {"gap", g.gap}});
    return out;
}

inline void write_primes_csv(std::ostream& os, std::span<const std::uint64_t> primes) {
    os << "p\n";
    for (auto p : primes) os << p << '\n';
}

// -- counts, identities, estimates -------------------------------------------

inline json comparison_to_json(const PSCountComparison& c) {
    return {{"w", c.w},
            {"d", c.d},
            {"a", c.a},
            {"exact_count", c.exact_count},
            {"main_term", to_json_number(c.main_term)},
            {"integral_term", to_json_number(c.integral_term)},
            {"relative_error", to_json_number(c.relative_error)},
            {"reference_error_scale", to_json_number(c.reference_error_scale)}};
}

inline json theta_to_json(const ThetaDecomposition& t) {
    return {{"q", t.q},
            {"a", t.a},
            {"u", t.u},
            {"theta_direct", to_json_number(t.theta_direct)},
            {"theta_via_characters", to_json_number(t.theta_via_characters)},
            {"residual", to_json_number(t.residual)}};
}

inline json estimate_to_json(const SieveEstimate& e) {
    json out = {{"v", e.v},
                {"z", e.z},
                {"sieving_primes", e.sieving_primes},
                {"rows_scanned", e.rows_scanned},
                {"truncated", e.truncated},
                {"r1_rows", e.r1_rows},
                {"exact", e.exact},
                {"upper_bound", to_json_number(e.upper_bound)},
                {"main_product", to_json_number(e.main_product)},
                {"main_product_phi", to_json_number(e.main_product_phi)},
                {"closer_normalisation", e.closer_normalisation},
                {"y_level", e.y_level},
                {"E", to_json_number(e.E)},
                {"s", to_json_number(e.s)},
                {"support_size", e.support_size}};
    out["analytic_upper_bound"] = e.analytic_upper_bound ? json(to_json_number(*e.analytic_upper_bound)) : json(nullptr);
    return out;
}

inline json witness_to_json(const TheoremWitness& w) {
    json out = {{"ps_prime", w.ps_prime}, {"power", w.power}, {"lower", w.lower},
                {"upper", w.upper},       {"gap", w.gap},     {"merit", to_json_number(w.merit)}};
    out["g2_ratio"] = w.g2_ratio ? json(to_json_number(*w.g2_ratio)) : json(nullptr);
    return out;
}

// -- files --------------------------------------------------------------------

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace psgap

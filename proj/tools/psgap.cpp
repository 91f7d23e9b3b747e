// psgap command-line front end. Results go to stdout as JSON (or CSV for
// prime lists) unless --out names a file. Exit status: 0 success, 1 library
// error, 2 usage error, 3 a verification that ran but failed.

#include "psgap/psgap.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace psgap;

namespace {

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(out, j);
    }
}

Side parse_side(const std::string& s) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    if (s == "both") return Side::both;
    throw DomainError("side must be left, right or both");
}

GFunction parse_fn(const std::string& s) {
    if (s == "g1") return GFunction::g1;
    if (s == "g2") return GFunction::g2;
    throw DomainError("function must be g1 or g2");
}

PrimeTable table_for(std::uint64_t limit) { return sieve(std::max<std::uint64_t>(limit, 2)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"psgap: prime gaps, PS primes, Erdos-Rankin coverings and sieve weights"};
    app.require_subcommand(1);
    int status = 0;

    // primes ------------------------------------------------------------------
    auto* primes_cmd = app.add_subcommand("primes", "prime tables and gaps")->require_subcommand(1);
    std::uint64_t limit = 0, min_gap = 0;
    std::string out;

    auto* p_sieve = primes_cmd->add_subcommand("sieve", "list primes up to a limit as CSV");
    p_sieve->add_option("--limit", limit)->required();
    p_sieve->add_option("--out", out);
    p_sieve->callback([&] {
        const auto t = sieve(limit);
        if (out.empty()) {
            write_primes_csv(std::cout, t.primes());
        } else {
            std::ofstream f(out);
            if (!f) throw Error("cannot write " + out);
            write_primes_csv(f, t.primes());
        }
    });

    auto* p_gaps = primes_cmd->add_subcommand("gaps", "gaps of at least a given size");
    p_gaps->add_option("--limit", limit)->required();
    p_gaps->add_option("--min-gap", min_gap)->default_val(1);
    p_gaps->add_option("--out", out);
    bool maximal_only = false;
    p_gaps->add_flag("--maximal", maximal_only, "only record-setting gaps");
    p_gaps->callback([&] {
        const auto t = sieve(limit);
        emit(gaps_to_json(maximal_only ? maximal_gaps(t) : scan_gaps(t, min_gap)), out);
    });

    // ps ----------------------------------------------------------------------
    auto* ps_cmd = app.add_subcommand("ps", "Piatetski-Shapiro primes")->require_subcommand(1);
    std::string c_text = "1.05";
    std::uint64_t w = 0, d = 1, a = 0;
    bool compare = false;

    auto* ps_list = ps_cmd->add_subcommand("list", "PS primes up to W, one per line");
    ps_list->add_option("--c", c_text)->required();
    ps_list->add_option("--limit", w)->required();
    ps_list->callback([&] {
        const auto params = PSParameters::parse(c_text);
        const auto t = table_for(w);
        for (auto p : ps_primes_up_to(w, params, t)) std::cout << p << '\n';
    });

    auto* ps_count = ps_cmd->add_subcommand("count", "PS primes in a progression");
    ps_count->add_option("--c", c_text)->required();
    ps_count->add_option("--w", w)->required();
    ps_count->add_option("--d", d)->default_val(1);
    ps_count->add_option("--a", a)->default_val(0);
    ps_count->add_flag("--compare", compare, "add the asymptotic main and integral terms");
    ps_count->callback([&] {
        const auto params = PSParameters::parse(c_text);
        const auto t = table_for(w);
        if (compare) {
            std::cout << comparison_to_json(ps_asymptotic_terms(w, d, a, params, t)).dump(2) << '\n';
        } else {
            std::cout << json{{"w", w}, {"d", d}, {"a", a}, {"exact_count", ps_count_in_progression(w, d, a, params, t)}}
                             .dump(2)
                      << '\n';
        }
    });

    // chars -------------------------------------------------------------------
    auto* chars_cmd = app.add_subcommand("chars", "Dirichlet characters")->require_subcommand(1);
    std::uint64_t q = 0, u = 0;
    auto* ch_verify = chars_cmd->add_subcommand("verify", "theta(u; q, a) directly and through characters");
    ch_verify->add_option("--q", q)->required();
    ch_verify->add_option("--a", a)->required();
    ch_verify->add_option("--u", u)->required();
    ch_verify->callback([&] {
        const auto t = table_for(u);
        const auto chars = build_characters(q);
        const auto res = evaluate_theta_decomposition(t, chars, u, a);
        std::cout << theta_to_json(res).dump(2) << '\n';
        if (res.residual > kThetaIdentityTolerance * std::max<real_t>(1, res.theta_direct)) status = 3;
    });

    // rankin ------------------------------------------------------------------
    auto* rankin_cmd = app.add_subcommand("rankin", "Erdos-Rankin covering plans")->require_subcommand(1);
    std::uint64_t x = 0, y = 0;
    unsigned k = 2;
    double c10 = 1;
    std::string plan_path;

    auto* r_build = rankin_cmd->add_subcommand("build", "greedy covering of [2, y]");
    r_build->add_option("--x", x)->required();
    r_build->add_option("--k", k)->required();
    auto* y_opt = r_build->add_option("--y", y);
    auto* c10_opt = r_build->add_option("--c10", c10);
    y_opt->excludes(c10_opt);
    r_build->add_option("--out", out);
    r_build->callback([&] {
        const auto params = *y_opt ? RankinParameters::explicit_y(x, y) : RankinParameters::derived(x, c10);
        emit(plan_to_json(build_covering(params, k)), out);
    });

    auto* r_verify = rankin_cmd->add_subcommand("verify", "recompute the exceptional set of a plan");
    r_verify->add_option("--plan", plan_path)->required();
    r_verify->callback([&] {
        const auto plan = plan_from_json(read_json_file(plan_path));
        try {
            const auto rep = verify_covering(plan);
            std::cout << json{{"y", rep.y},
                              {"V", rep.V},
                              {"mismatches", rep.mismatches},
                              {"v_fraction", to_json_number(rep.v_fraction)},
                              {"v_over_sqrt_x", to_json_number(rep.v_over_sqrt_x)},
                              {"m0_in_range", rep.m0_in_range},
                              {"congruences_hold", rep.congruences_hold},
                              {"values_exceed_primes", rep.values_exceed_primes}}
                             .dump(2)
                      << '\n';
        } catch (const CoveringMismatch& e) {
            std::cerr << e.what() << '\n';
            status = 3;
        }
    });

    // matrix ------------------------------------------------------------------
    auto* matrix_cmd = app.add_subcommand("matrix", "avoidance matrix")->require_subcommand(1);
    std::uint64_t r_max = 0, budget = 10'000'000;
    auto* m_run = matrix_cmd->add_subcommand("run", "classify rows into R1 and R2");
    m_run->add_option("--plan", plan_path)->required();
    m_run->add_option("--c", c_text)->required();
    m_run->add_option("--rmax", r_max)->required();
    m_run->add_option("--budget", budget, "maximum rows scanned");
    m_run->add_option("--out", out);
    m_run->callback([&] {
        const MatrixSpec spec(plan_from_json(read_json_file(plan_path)), PSParameters::parse(c_text), r_max);
        ClassifyOptions opts;
        opts.operation_budget = budget;
        emit(report_to_json(classify_rows(spec, opts)), out);
    });

    // avoid -------------------------------------------------------------------
    auto* avoid_cmd = app.add_subcommand("avoid", "prime-avoidance checks")->require_subcommand(1);
    std::string m_text, fn = "g1", side = "both";
    double constant = 1;
    auto* a_check = avoid_cmd->add_subcommand("check", "is m + u composite across the window?");
    a_check->add_option("--m", m_text)->required();
    a_check->add_option("--fn", fn)->check(CLI::IsMember({"g1", "g2"}));
    a_check->add_option("--const", constant);
    a_check->add_option("--side", side)->check(CLI::IsMember({"left", "right", "both"}));
    a_check->callback([&] {
        AvoidanceQuery query;
        try {
            query.m = BigInt(m_text);
        } catch (const std::invalid_argument&) {
            throw DomainError("--m is not a decimal integer");
        }
        query.side = parse_side(side);
        query.constant = constant;
        query.function_id = parse_fn(fn);
        const auto res = check_avoidance(query);
        json j{{"m", m_text}, {"avoiding", res.avoiding}, {"window", res.window}};
        j["prime_offset"] = res.prime_offset ? json(*res.prime_offset) : json(nullptr);
        std::cout << j.dump(2) << '\n';
    });

    // theorem -----------------------------------------------------------------
    auto* thm_cmd = app.add_subcommand("theorem", "witness search")->require_subcommand(1);
    std::size_t top = 10;
    auto* t_scan = thm_cmd->add_subcommand("scan", "gaps around k-th powers of PS primes");
    t_scan->add_option("--c", c_text)->required();
    t_scan->add_option("--k", k)->required();
    t_scan->add_option("--limit", limit)->required();
    t_scan->add_option("--top", top);
    t_scan->callback([&] {
        const auto t = table_for(limit);
        json arr = json::array();
        for (const auto& wit : theorem_witness_search(PSParameters::parse(c_text), k, t, top)) {
            arr.push_back(witness_to_json(wit));
        }
        std::cout << arr.dump(2) << '\n';
    });

    // sieve -------------------------------------------------------------------
    auto* sieve_cmd = app.add_subcommand("sieve", "root counts and beta-sieve weights")->require_subcommand(1);
    std::uint64_t p = 0, v = 1, from = 0, to = 0, z = 0;
    double kappa = 2;
    std::string sign = "plus";
    bool verify = false;

    auto* s_rho = sieve_cmd->add_subcommand("rho", "roots of w^k + v - 1 mod p");
    s_rho->add_option("--p", p)->required();
    s_rho->add_option("--k", k)->required();
    s_rho->add_option("--v", v)->required();
    s_rho->callback([&] {
        if (!is_prime_u64(p)) throw DomainError("--p must be prime");
        std::cout << json{{"p", p}, {"k", k}, {"v", v}, {"rho", rho(p, v, k)}}.dump(2) << '\n';
    });

    auto* s_lambda = sieve_cmd->add_subcommand("lambda", "beta-sieve weights over primes in (from, to]");
    s_lambda->add_option("--kappa", kappa)->required();
    s_lambda->add_option("--y", y)->required();
    s_lambda->add_option("--primes-from", from)->required();
    s_lambda->add_option("--to", to)->required();
    s_lambda->add_option("--sign", sign)->check(CLI::IsMember({"plus", "minus"}));
    s_lambda->add_flag("--verify", verify);
    s_lambda->callback([&] {
        std::vector<std::uint64_t> primes;
        for (auto pr : detail::small_sieve(to)) {
            if (pr > from) primes.push_back(pr);
        }
        const auto set = build_lambda(kappa, y, primes, sign == "plus" ? SieveSign::plus : SieveSign::minus);
        json weights = json::array();
        for (const auto& [mask, wt] : set.weights) {
            weights.push_back({{"d", set.divisor_value(mask).get_str()}, {"lambda", to_json_number(wt)}});
        }
        json j{{"kappa", kappa}, {"beta", to_json_number(set.beta)}, {"y", y},       {"sign", sign},
               {"primes", set.primes}, {"support_size", set.weights.size()}, {"weights", weights}};
        if (verify) {
            try {
                const auto rep = verify_lambda_properties(set);
                j["verified"] = true;
                j["divisors_checked"] = rep.divisors_checked;
                j["min_divisor_sum"] = to_json_number(rep.min_divisor_sum);
                j["max_divisor_sum"] = to_json_number(rep.max_divisor_sum);
            } catch (const ConsistencyError& e) {
                j["verified"] = false;
                j["failure"] = e.what();
                status = 3;
            }
        }
        std::cout << j.dump(2) << '\n';
    });

    auto* s_count = sieve_cmd->add_subcommand("count", "exact and sieve-bounded row counts");
    double E = 0;
    s_count->add_option("--plan", plan_path)->required();
    s_count->add_option("--c", c_text)->required();
    s_count->add_option("--rmax", r_max)->required();
    s_count->add_option("--v", v)->required();
    s_count->add_option("--z", z)->required();
    auto* e_opt = s_count->add_option("--E", E, "support bound y = P(x)^E");
    s_count->add_option("--out", out);
    s_count->callback([&] {
        const MatrixSpec spec(plan_from_json(read_json_file(plan_path)), PSParameters::parse(c_text), r_max);
        SieveCountOptions opts;
        if (*e_opt) opts.E = E;
        emit(estimate_to_json(legendre_count(spec, v, z, opts)), out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "psgap: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "psgap: " << e.what() << '\n';
        return 1;
    }
    return status;
}

// Builds a covering for x = 11, runs the toy matrix and prints a summary.

#include "psgap/psgap.hpp"

#include <iostream>

int main() {
    using namespace psgap;
    const auto plan = build_covering(RankinParameters::explicit_y(11, 20), 2);
    const auto cover = verify_covering(plan);
    std::cout << "m0 = " << plan.m0 << ", |V| = " << cover.V.size() << " of y = " << plan.y << '\n';

    const MatrixSpec spec(plan, PSParameters::parse("1.05"), 10'000);
    const auto rep = classify_rows(spec);
    std::cout << "|R1| = " << rep.r1_count << ", |R2| = " << rep.r2_count
              << ", |R1 \\ R2| = " << rep.r1_minus_r2_count << '\n';
    std::cout << "prediction = " << static_cast<double>(rep.prediction)
              << ", ratio = " << static_cast<double>(rep.ratio) << '\n';

    for (std::uint64_t v : cover.V) {
        const auto est = legendre_count(spec, v, 50);
        std::cout << "v = " << v << ": exact " << est.exact << " <= bound "
                  << static_cast<double>(est.upper_bound) << '\n';
    }
}

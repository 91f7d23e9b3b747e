#include "psgap/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace psgap;

TEST(PlanJson, RoundTrip) {
    const auto plan = build_covering(RankinParameters::explicit_y(29, 200), 2);
    const auto j = plan_to_json(plan);
    EXPECT_TRUE(j.at("m0").is_string());
    for (const char* key : {"x", "k", "y", "m0", "choices", "V"}) EXPECT_TRUE(j.contains(key)) << key;
    auto back = plan_from_json(json::parse(j.dump()));
    for (auto& c : back.choices) {
        auto it = std::find_if(plan.choices.begin(), plan.choices.end(), [&](const auto& o) { return o.p == c.p; });
        c.newly_covered = it->newly_covered;
    }
    EXPECT_EQ(back, plan);
    EXPECT_NO_THROW(verify_covering(back));
}

TEST(PlanJson, Malformed) {
    EXPECT_THROW(plan_from_json(json::parse(R"({"x": 11})")), DomainError);
    EXPECT_THROW(plan_from_json(json::parse(R"({"x":11,"k":2,"y":20,"m0":"12a","choices":[],"V":[]})")),
                 DomainError);
}

TEST(ReportJson, Schema) {
    const MatrixSpec spec(build_covering(RankinParameters::explicit_y(11, 20), 2), PSParameters::parse("1.05"), 500);
    const auto j = report_to_json(classify_rows(spec));
    for (const char* key : {"r1_count", "r2_count", "witnesses", "prediction", "ratio"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    ASSERT_FALSE(j["witnesses"].empty());
    for (const char* key : {"r", "l", "certificate"}) EXPECT_TRUE(j["witnesses"][0].contains(key));
}

TEST(GapsJson, Shape) {
    const auto j = gaps_to_json(scan_gaps(sieve(200), 14));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0], json({{"lower", 113}, {"upper", 127}, {"gap", 14}}));
}

TEST(PrimesCsv, Header) {
    std::ostringstream os;
    write_primes_csv(os, sieve(10).primes());
    EXPECT_EQ(os.str(), "p\n2\n3\n5\n7\n");
}

TEST(Files, WriteAndRead) {
    const auto path = (std::filesystem::temp_directory_path() / "psgap_io_test.json").string();
    write_json_file(path, json{{"a", 1}});
    EXPECT_EQ(read_json_file(path)["a"], 1);
    std::filesystem::remove(path);
    EXPECT_THROW(read_json_file(path), Error);
}

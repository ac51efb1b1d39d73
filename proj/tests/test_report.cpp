#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abrsim/report.h"

using namespace abrsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

}  // namespace

TEST_CASE("run report summarizes a fair run") {
    const Scenario s = build_three_source();
    SwitchConfig cfg;
    const TraceSet t = run(s, cfg, 300000.0);
    const RunReport r = make_report(s, cfg, t);

    CHECK(r.bottleneck_port == "SW2->SW3");
    CHECK(r.jain_index > 0.0);
    CHECK(r.jain_index <= 1.0);
    CHECK(r.jain_index > 0.99);  // the greedy pair converges to equal shares
    REQUIRE(r.convergence_time_us.has_value());
    CHECK(*r.convergence_time_us <= 300000.0);
    CHECK(r.steady_send_rate[0] == doctest::Approx(10.0).epsilon(0.02));
    CHECK(r.mean_utilization == doctest::Approx(0.9).epsilon(0.03));

    const std::string text = format_report(r, s, cfg);
    CHECK(text.find("jain_index") != std::string::npos);
    CHECK(text.find("VC2") != std::string::npos);
}

TEST_CASE("unfair runs score a lower jain index") {
    const Scenario s = build_three_source();
    SwitchConfig cfg;
    cfg.variant = SwitchVariant::EricaBasic;
    const TraceSet t = run(s, cfg, 300000.0);
    const RunReport r = make_report(s, cfg, t);
    CHECK(r.jain_index < 0.99);
    CHECK(r.jain_index > 0.0);
}

TEST_CASE("csv files share the schema and reproduce byte for byte") {
    const Scenario s = build_two_source_transient();
    SwitchConfig cfg;
    const std::string dir_a = std::filesystem::temp_directory_path() /
                              "abrsim_csv_a";
    const std::string dir_b = std::filesystem::temp_directory_path() /
                              "abrsim_csv_b";
    std::filesystem::create_directories(dir_a);
    std::filesystem::create_directories(dir_b);
    write_csvs(run(s, cfg, 100000.0), dir_a);
    write_csvs(run(s, cfg, 100000.0), dir_b);

    for (const char* name : {"acr.csv", "queue.csv", "neff.csv", "util.csv"}) {
        const std::string a = slurp(dir_a + "/" + std::string(name));
        const std::string b = slurp(dir_b + "/" + std::string(name));
        CHECK(a == b);
        CHECK(a.substr(0, 7) == "time_ms");
        // 100 ms on the 0.1 ms grid: header plus 1001 rows
        CHECK(std::count(a.begin(), a.end(), '\n') == 1002);
    }
    const std::string acr = slurp(dir_a + "/acr.csv");
    CHECK(acr.substr(0, acr.find('\n')) == "time_ms,VC1,VC2");

    CHECK_THROWS_AS(write_csvs(run(s, cfg, 50000.0), "/nonexistent/nowhere"),
                    std::runtime_error);
}

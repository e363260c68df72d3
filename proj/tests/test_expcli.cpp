#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lab/expcli.hpp"

using namespace lab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("preset registry") {
    const auto& names = preset_names();
    CHECK(names.size() == 12);
    ExperimentConfig cfg;
    cfg.name = "no-such-preset";
    CHECK_THROWS_AS(run_preset(cfg), std::invalid_argument);
    cfg.name = "mela-sweep";
    cfg.delta = 0.0;
    CHECK_THROWS_AS(run_preset(cfg), std::invalid_argument);
    cfg.delta = 0.3;
    cfg.samples = 0;
    CHECK_THROWS_AS(run_preset(cfg), std::invalid_argument);
}

TEST_CASE("mela sweep preset passes and is deterministic") {
    ExperimentConfig cfg;
    cfg.name = "mela-sweep";
    cfg.seed = 5;
    Report a = run_preset(cfg);
    Report b = run_preset(cfg);
    CHECK(a.all_pass());
    CHECK(a.checks.size() == 4);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(a.elapsedSeconds > 0.0);
    // the timing field stays out of the serialized report
    CHECK(report_to_json(a).find("elapsed") == std::string::npos);
}

TEST_CASE("sub2 preset band") {
    ExperimentConfig cfg;
    cfg.name = "sub2";
    cfg.seed = 3;
    cfg.restarts = 4;
    Report r = run_preset(cfg);
    CHECK(r.all_pass());
}

TEST_CASE("matricial trace-norm preset") {
    ExperimentConfig cfg;
    cfg.name = "matricial-60";
    cfg.seed = 7;
    cfg.dims = 4;
    Report r = run_preset(cfg);
    CHECK(r.all_pass());
}

TEST_CASE("chevet preset") {
    ExperimentConfig cfg;
    cfg.name = "chevet";
    cfg.seed = 11;
    cfg.samples = 600;
    Report r = run_preset(cfg);
    CHECK(r.all_pass());
}

TEST_CASE("csv and json emission") {
    ExperimentConfig cfg;
    cfg.name = "mela-sweep";
    Report r = run_preset(cfg);

    std::string csv = report_to_csv(r);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == r.checks.size() + 1);
    CHECK(csv.rfind("check,lhs,rhs,tolerance,pass\n", 0) == 0);

    Report empty;
    CHECK(report_to_csv(empty) == "check,lhs,rhs,tolerance,pass\n");
    CHECK(empty.all_pass());

    nlohmann::json j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["checks"].size() == r.checks.size());
    CHECK(j["allPass"] == true);
    CHECK(j["config"]["name"] == "mela-sweep");

    std::string jsonPath = "expcli_test_report.json";
    std::string csvPath = "expcli_test_report.csv";
    emit_report(r, "json", jsonPath);
    emit_report(r, "csv", csvPath);
    CHECK(slurp(jsonPath) == report_to_json(r));
    CHECK(slurp(csvPath) == csv);
    std::remove(jsonPath.c_str());
    std::remove(csvPath.c_str());

    CHECK_THROWS_AS(emit_report(r, "xml", jsonPath), std::invalid_argument);
    CHECK_THROWS_AS(emit_report(r, "json", "/no/such/dir/report.json"), std::runtime_error);
}

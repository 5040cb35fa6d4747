#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "scenario.hpp"
#include "support.hpp"

using namespace hetnet;
using namespace hetnet::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hetnet_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json small_scenario(const fs::path& out) {
    return {{"name", "small"},
            {"config", "table1.json"},
            {"experiment", "SINR_VS_SNR"},
            {"grid", {{"threshold_db", {-10, 0, 10}}, {"tier_counts", {1, 3}}}},
            {"monte_carlo", {{"drops", 3000}, {"seed", 7}, {"chunks", 3}}},
            {"output_dir", out.string()}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int exit_code(const std::string& args) {
    const std::string cmd = std::string(HETNET_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("scenario parsing") {
    const fs::path data = testing::data_path("");
    const Scenario sc = parse_scenario(small_scenario("/tmp/x"), data);
    CHECK(sc.name == "small");
    CHECK(sc.experiment == Experiment::SinrVsSnr);
    CHECK(sc.config_path == data / "table1.json");
    REQUIRE(sc.monte_carlo.has_value());
    CHECK(sc.monte_carlo->drops == 3000);
    CHECK(sc.options.mode == CoverageMode::SinrFull);
    CHECK(sc.options.exclusion == ExclusionZone::WithGains);

    json doc = small_scenario("/tmp/x");
    doc["mode"] = "snr";
    doc["exclusion_zone"] = "without_gains";
    const Scenario alt = parse_scenario(doc, data);
    CHECK(alt.options.mode == CoverageMode::SnrOnly);
    CHECK(alt.options.exclusion == ExclusionZone::WithoutGains);

    for (const char* bad : {"experiment", "name", "config"}) {
        json d = small_scenario("/tmp/x");
        d.erase(bad);
        CHECK_THROWS_AS(parse_scenario(d, data), ScenarioError);
    }
    doc = small_scenario("/tmp/x");
    doc["experiment"] = "FIG_42";
    CHECK_THROWS_AS(parse_scenario(doc, data), ScenarioError);
    doc = small_scenario("/tmp/x");
    doc["monte_carlo"]["drops"] = 0;
    CHECK_THROWS_AS(parse_scenario(doc, data), ScenarioError);
    doc = small_scenario("/tmp/x");
    doc["mode"] = "exact";
    CHECK_THROWS_AS(parse_scenario(doc, data), ScenarioError);
}

TEST_CASE("empty or missing grids are rejected") {
    const fs::path data = testing::data_path("");
    json doc = small_scenario("/tmp/x");
    doc["grid"]["threshold_db"] = json::array();
    CHECK_THROWS_WITH_AS(evaluate(parse_scenario(doc, data)), doctest::Contains("empty"), ScenarioError);
    doc["grid"].erase("threshold_db");
    CHECK_THROWS_AS(evaluate(parse_scenario(doc, data)), ScenarioError);
    doc["grid"]["threshold_db"] = "0";
    CHECK_THROWS_AS(evaluate(parse_scenario(doc, data)), ScenarioError);
}

TEST_CASE("every shipped scenario parses") {
    for (const auto& entry : fs::directory_iterator(HETNET_SCENARIO_DIR)) {
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_scenario(entry.path()));
    }
}

TEST_CASE("runs are byte-identical across worker counts") {
    const fs::path data = testing::data_path("");
    const fs::path a = scratch("a");
    const fs::path b = scratch("b");
    Scenario sa = parse_scenario(small_scenario(a), data);
    Scenario sb = parse_scenario(small_scenario(b), data);
    sa.workers = 1;
    sb.workers = 5;
    const RunReport ra = run(sa);
    const RunReport rb = run(sb);
    CHECK(ra.flagged_rows == 0);
    REQUIRE(ra.files.size() == 5);  // four curves plus the manifest
    for (std::size_t i = 0; i + 1 < ra.files.size(); ++i) {
        CHECK(ra.files[i].filename() == rb.files[i].filename());
        CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
    }

    const std::string csv = slurp(a / "sinr_K3.csv");
    CHECK(csv.rfind("x,analytic,error,converged,monte_carlo,mc_stderr\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    json ma = json::parse(slurp(a / "manifest.json"));
    json mb = json::parse(slurp(b / "manifest.json"));
    ma.erase("wall_time_s");
    mb.erase("wall_time_s");
    ma.erase("curves");
    mb.erase("curves");
    CHECK(ma == mb);
    CHECK(ma["seed"] == 7);
    CHECK(ma["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(ma["mode"] == "sinr");
}

TEST_CASE("rows follow grid order and match the library") {
    const fs::path data = testing::data_path("");
    json doc = small_scenario("/tmp/unused");
    doc.erase("monte_carlo");
    const auto curves = evaluate(parse_scenario(doc, data));
    REQUIRE(curves.size() == 4);
    const Curve* k3 = nullptr;
    for (const Curve& c : curves) {
        if (c.name == "sinr_K3") k3 = &c;
    }
    REQUIRE(k3 != nullptr);
    const NetworkConfig cfg = testing::table1();
    const double xs[] = {-10.0, 0.0, 10.0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(k3->rows[i].x == xs[i]);
        const std::vector<double> th(3, db_to_linear(xs[i]));
        CHECK(k3->rows[i].analytic == doctest::Approx(sinr_coverage(cfg, th).total).epsilon(1e-12));
        CHECK_FALSE(k3->rows[i].monte_carlo.has_value());
    }
    CHECK(format_csv(*k3).rfind("x,analytic,error,converged\n", 0) == 0);
}

TEST_CASE("fnv1a") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch("exit");
    const std::string table1 = testing::data_path("table1.json").string();
    CHECK(exit_code("validate " + table1) == 0);
    CHECK(exit_code("validate " + (dir / "missing.json").string()) == 1);

    json bad = json::parse(slurp(table1));
    bad["tiers"][0]["balls"][0]["los_prob"] = 1.3;
    write(dir / "bad.json", bad.dump());
    CHECK(exit_code("validate " + (dir / "bad.json").string()) == 1);
    write(dir / "broken.json", "{ not json");
    CHECK(exit_code("validate " + (dir / "broken.json").string()) == 1);

    CHECK(exit_code("mc " + table1 + " --drops 200 --seed 3") == 0);
    CHECK(exit_code("mc " + table1 + " --drops 0") == 1);
    CHECK(exit_code("--mode bogus validate " + table1) == 1);
    CHECK(exit_code("frobnicate") == 1);

    json sc = small_scenario(dir / "out");
    sc["config"] = table1;
    sc.erase("monte_carlo");
    sc["grid"]["threshold_db"] = {0};
    write(dir / "ok.json", sc.dump());
    CHECK(exit_code("run " + (dir / "ok.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "manifest.json"));

    sc["grid"]["threshold_db"] = json::array();
    write(dir / "empty.json", sc.dump());
    CHECK(exit_code("run " + (dir / "empty.json").string()) == 1);

    // A one-panel budget with an unreachable tolerance cannot converge.
    sc["grid"]["threshold_db"] = {0};
    sc["tolerances"] = {{"outer", {{"abs", 1e-300}, {"rel", 1e-300}, {"max_panels", 1}}}};
    write(dir / "starved.json", sc.dump());
    CHECK(exit_code("run " + (dir / "starved.json").string()) == 2);
}

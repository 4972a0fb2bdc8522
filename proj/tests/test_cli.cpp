#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acim/artifacts.hpp"
#include "acim/config.hpp"

using namespace acim;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_dir(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "acim_cli_tests" / leaf;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

json base_config(const std::string& out) {
    json j;
    j["map"] = {{"example_id", "neutral1d"}, {"r0", 0.5}, {"region_radius", 0.25}, {"gamma", 2.0}};
    j["seed"] = 99;
    j["out"] = out;
    return j;
}

}  // namespace

TEST_CASE("config validation") {
    json j = base_config("x");
    j.erase("seed");
    ExperimentConfig cfg = parse_config(j);
    CHECK_THROWS_AS(validate_for_command(cfg, "induce-stats"), Error);  // seed mandatory

    json j2 = base_config("x");
    ExperimentConfig cfg2 = parse_config(j2);
    CHECK_THROWS_AS(validate_for_command(cfg2, "classify"), Error);  // missing blocks
    CHECK_THROWS_AS(validate_for_command(cfg2, "bogus"), Error);

    j2["induction"] = {{"n_max", 1000}, {"n_samples", 20000}};
    ExperimentConfig cfg3 = parse_config(j2);
    validate_for_command(cfg3, "induce-stats");
}

TEST_CASE("induce-stats writes the tail profile artifact") {
    std::string out = tmp_dir("tails");
    json j = base_config(out);
    j["induction"] = {{"n_max", 1000}, {"n_samples", 20000}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(run_command(cfg, "induce-stats") == 0);
    std::string csv = slurp(out + "/tails.csv");
    CHECK(csv.find("n,level_volume,tail_volume,stderr") != std::string::npos);
    CHECK(csv.find("# config_hash=" + cfg.config_hash()) != std::string::npos);
    CHECK(csv.find("# seed=99") != std::string::npos);
}

TEST_CASE("classify produces a verdict for the parabola components") {
    std::string out = tmp_dir("classify");
    json j = base_config(out);
    j["map"] = {{"example_id", 4}};
    j["induction"] = {{"n_max", 20000},       {"n_samples", 200000},
                      {"component", 2},       {"margin", 0.15},
                      {"detect_window", {8, 100}}, {"asymptotic_window", {50, 400}}};
    j["transfer"] = {{"resolution", 32}, {"samples_per_cell", 32}, {"tol", 1e-8}, {"max_iter", 4000}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(run_command(cfg, "classify") == 0);
    json cls = json::parse(slurp(out + "/classification.json"));
    CHECK(cls["verdict"] == "SigmaFinite");
    CHECK(cls["component"] == 2);
    CHECK(cls["kprime"].get<int>() == 13);
    CHECK(cls["hhat_sup"].get<double>() > 0.0);
}

TEST_CASE("density artifact carries the extension") {
    std::string out = tmp_dir("density");
    json j = base_config(out);
    j["transfer"] = {{"resolution", 64},  {"samples_per_cell", 128}, {"tol", 1e-11},
                     {"max_iter", 20000}, {"n_levels", 200},         {"jitter", 1.0}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(run_command(cfg, "density") == 0);
    std::string csv = slurp(out + "/density.csv");
    CHECK(csv.find("cell,x0,h,in_region") != std::string::npos);
    CHECK(slurp(out + "/transfer.csv").find("row,col,value") != std::string::npos);
}

TEST_CASE("asymptotics and audit artifacts") {
    std::string out = tmp_dir("asym");
    json j = base_config(out);
    j["map"] = {{"example_id", 1}};
    j["asymptotics"] = {{"orbit_length", 2000}, {"fit_window", {200, 2000}}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(run_command(cfg, "asymptotics") == 0);
    json rep = json::parse(slurp(out + "/asymptotics.json"));
    CHECK(rep["claims"].size() >= 5);
    for (const auto& c : rep["claims"]) CHECK(c.contains("pass"));

    std::string out2 = tmp_dir("audit");
    json j2 = base_config(out2);
    j2["map"] = {{"example_id", 1}};
    j2["audit"] = {{"grid", 32},      {"probe_radius", 0.004},    {"probe_samples", 64},
                   {"n_centers", 32}, {"samples_per_center", 32}, {"n_pairs", 200}};
    ExperimentConfig cfg2 = parse_config(j2);
    CHECK(run_command(cfg2, "audit") == 0);
    json audit = json::parse(slurp(out2 + "/audit.json"));
    CHECK(audit["s_hat"].get<double>() < 1.0);
}

TEST_CASE("determinism: identical config and seed give byte-identical artifacts") {
    std::string out_a = tmp_dir("det_a"), out_b = tmp_dir("det_b");
    for (const std::string& out : {out_a, out_b}) {
        json j = base_config(out);
        j["induction"] = {{"n_max", 500}, {"n_samples", 20000}};
        j["out"] = out;
        ExperimentConfig cfg = parse_config(j);
        REQUIRE(run_command(cfg, "induce-stats") == 0);
    }
    std::string a = slurp(out_a + "/tails.csv"), b = slurp(out_b + "/tails.csv");
    CHECK(a == b);

    // different seed changes the artifact
    json j = base_config(out_a);
    j["induction"] = {{"n_max", 500}, {"n_samples", 20000}};
    j["seed"] = 100;
    ExperimentConfig cfg = parse_config(j);
    REQUIRE(run_command(cfg, "induce-stats") == 0);
    CHECK(slurp(out_a + "/tails.csv") != b);
}

TEST_CASE("seminorm command emits the coefficient report") {
    std::string out = tmp_dir("semi");
    json j = base_config(out);
    j["transfer"] = {{"resolution", 128}, {"samples_per_cell", 64}, {"tol", 1e-10}, {"max_iter", 8000}};
    j["quasi_holder"] = {{"alpha", 0.5}, {"eps0", 0.1}, {"k_max", 5}, {"n_indicators", 12}, {"n_trig", 4}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(run_command(cfg, "seminorm") == 0);
    json rep = json::parse(slurp(out + "/ly_report.json"));
    CHECK(rep.contains("eta_hat"));
    CHECK(rep.contains("D_hat"));
    CHECK(rep["rows"].size() == 16);
}

#include "qmd/experiments.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>

using namespace qmd;
using namespace qmd::cli;
using nlohmann::json;

namespace {

struct EnvGuard {
    explicit EnvGuard(const char* name) : name_(name) { unsetenv(name); }
    ~EnvGuard() { unsetenv(name_); }
    void set(const char* value) { setenv(name_, value, 1); }
    const char* name_;
};

json base_config() {
    return json{{"n", 8},
                {"start", 0},
                {"steps", 7},
                {"magnus", {{"kind", "ruler"}}},
                {"derek", {{"kind", "strategy1"}}}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("configs parse with defaults and validate their fields") {
    EnvGuard seed_env("QMD_SEED");

    ExperimentConfig cfg = parse_config(base_config());
    CHECK(cfg.n == 8);
    CHECK(cfg.steps == 7);
    CHECK(cfg.magnus.kind == "ruler");
    CHECK(cfg.derek.kind == "strategy1");
    CHECK(cfg.tolerances.visit == visit_tol);
    CHECK(cfg.tolerances.attain == attain_tol);
    CHECK(cfg.outputs.trace_csv.empty());

    json j = base_config();
    j.erase("start");  // optional, defaults to 0
    CHECK(parse_config(j).start == 0);

    j = base_config();
    j["magnus"] = {{"kind", "list"}, {"magnitudes", {4, 2, 1}}};
    j["derek"] = {{"kind", "strategy3"}, {"p", 5}, {"hadamard_steps", {1, 2}}};
    j["n"] = 25;
    j["tolerances"] = {{"visit", 1e-8}};
    cfg = parse_config(j);
    CHECK(cfg.magnus.magnitudes == std::vector<int>{4, 2, 1});
    CHECK(cfg.derek.hadamard_steps == std::set<int>{1, 2});
    CHECK(cfg.tolerances.visit == 1e-8);
    CHECK(cfg.tolerances.attain == attain_tol);  // untouched default
}

TEST_CASE("bad configs are rejected with config errors") {
    EnvGuard seed_env("QMD_SEED");
    auto reject = [](json j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };

    json j = base_config();
    j.erase("n");
    reject(j);

    j = base_config();
    j["n"] = 1;
    reject(j);

    j = base_config();
    j["start"] = 8;
    reject(j);

    j = base_config();
    j["steps"] = -1;
    reject(j);

    j = base_config();
    j["n"] = 6;  // ruler needs a power of two
    reject(j);

    j = base_config();
    j["magnus"] = {{"kind", "list"}, {"magnitudes", json::array()}};
    reject(j);

    j = base_config();
    j["magnus"] = {{"kind", "list"}, {"magnitudes", {5}}};  // > floor(8/2)
    reject(j);

    j = base_config();
    j["magnus"] = {{"kind", "constant"}, {"magnitude", 0}};
    reject(j);

    j = base_config();
    j["magnus"] = {{"kind", "fibonacci"}};
    reject(j);

    j = base_config();
    j["magnus"] = {{"kind", "list"}, {"magnitudes", "three"}};
    reject(j);

    j = base_config();
    j["derek"] = {{"kind", "strategy9"}};
    reject(j);

    j = base_config();
    j["derek"] = {{"kind", "strategy2"}, {"p", 3}};  // q missing
    reject(j);

    // parameters that pass the schema but are rejected by the responder
    j = base_config();
    j["derek"] = {{"kind", "strategy2"}, {"p", 3}, {"q", 5}};  // 15 does not divide 8
    CHECK_THROWS_AS(make_responder(parse_config(j)), ConfigError);
}

TEST_CASE("the seed override wins over the configured seed") {
    EnvGuard seed_env("QMD_SEED");
    json j = base_config();
    j["magnus"] = {{"kind", "random"}, {"seed", 11}, {"allowed", {1, 2}}};

    CHECK(parse_config(j).magnus.seed == 11);

    seed_env.set("777");
    CHECK(parse_config(j).magnus.seed == 777);

    seed_env.set("not-a-number");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("simulation results carry visits, attainment and bounds") {
    EnvGuard seed_env("QMD_SEED");
    json j = base_config();
    j["n"] = 4;
    j["steps"] = 3;
    SimulationResult result = simulate_experiment(parse_config(j));

    REQUIRE(result.visited.size() == 2);
    CHECK(result.visited[0] == VisitedEntry{0, 0});
    CHECK(result.visited[1] == VisitedEntry{2, 1});
    REQUIRE(result.attained_rounds.size() == 4);
    CHECK(result.attained_rounds.at(0) == 0);
    CHECK(result.attained_rounds.at(1) == 3);
    CHECK(result.attained_rounds.at(2) == 1);
    CHECK(result.attained_rounds.at(3) == 3);
    CHECK_FALSE(result.restricted.has_value());
    CHECK(result.bounds.claimed == 4);
    CHECK(result.bounds.observed == 4);
}

TEST_CASE("committed defenses surface their class in the summary") {
    json j{{"n", 15},
           {"start", 7},
           {"steps", 20},
           {"magnus", {{"kind", "list"}, {"magnitudes", {3, 6, 3, 1, 7, 2, 5, 4}}}},
           {"derek", {{"kind", "strategy2"}, {"p", 3}, {"q", 5}}}};
    SimulationResult result = simulate_experiment(parse_config(j));
    REQUIRE(result.restricted.has_value());
    CHECK(result.restricted->modulus == 5);
    CHECK(result.restricted->members == std::vector<int>{2, 12});
    CHECK(result.restricted->max_marginal <= 1e-12);
    CHECK(result.bounds.claimed == 13);
    CHECK(result.bounds.observed <= 13);

    nlohmann::ordered_json summary = summary_to_json(result);
    std::vector<std::string> keys;
    for (auto it = summary.begin(); it != summary.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"n", "start", "steps", "visited", "attained",
                                           "restricted", "bounds"});
    CHECK(summary["visited"][0]["position"] == 7);
    CHECK(summary["visited"][0]["step"] == 0);
    CHECK(summary["restricted"]["members"] == json({2, 12}));
    CHECK(summary["bounds"]["claimed"] == 13);
}

TEST_CASE("trace tables print every step-position cell") {
    json j{{"n", 2},
           {"steps", 1},
           {"magnus", {{"kind", "constant"}, {"magnitude", 1}}},
           {"derek", {{"kind", "identity"}}}};
    Trace trace = trace_experiment(parse_config(j));
    CHECK(trace_to_csv(trace) ==
          "step,position,probability\n"
          "0,0,1\n"
          "0,1,0\n"
          "1,0,0\n"
          "1,1,1\n");
}

TEST_CASE("heatmaps grey out probability and blacken visits") {
    Trace trace{GameDims(4), 0, {{0.25, 0.25, 0.25, 0.25}, {1.0, 0.0, 0.0, 0.0}}, {}, {}};
    CHECK(heatmap_to_pgm(trace) ==
          "P2\n4 2\n255\n"
          "191 191 191 191\n"
          "0 255 255 255\n");

    json j = base_config();
    j["n"] = 4;
    j["steps"] = 3;
    Trace walk = trace_experiment(parse_config(j));
    CHECK(heatmap_to_pgm(walk) ==
          "P2\n4 4\n255\n"
          "0 255 255 255\n"
          "255 255 0 255\n"
          "255 128 255 128\n"
          "255 128 255 128\n");
}

TEST_CASE("attain tables list rounds and leftovers") {
    json j{{"n", 15},
           {"start", 7},
           {"steps", 12},
           {"magnus", {{"kind", "list"}, {"magnitudes", {3, 6, 3, 1, 7, 2, 5, 4}}}},
           {"derek", {{"kind", "strategy2"}, {"p", 3}, {"q", 5}}}};
    SimulationResult result = simulate_experiment(parse_config(j));
    std::string table = attain_table_text(result.script);
    CHECK(table.find("position  first_attaining_round  final_stop_probability\n") == 0);
    CHECK(table.find("never(12)") != std::string::npos);  // class members stay out
    CHECK(table.find("       7                      0  1\n") != std::string::npos);
}

TEST_CASE("classical reports freeze the small-cycle facts") {
    CHECK(classical_report_text(15) ==
          "n: 15\n"
          "f_star: 10\n"
          "smallest_odd_prime_factor: 3\n"
          "hurkens_bound: 40\n"
          "minimax_oracle: skipped (n > 9)\n");
    CHECK(classical_report_text(8) ==
          "n: 8\n"
          "f_star: 8\n"
          "smallest_odd_prime_factor: none\n"
          "optimal_moves: 7\n"
          "hurkens_bound: n/a (power of two)\n"
          "minimax_oracle: 8 (horizon 7)\n");
}

TEST_CASE("runs are deterministic and file outputs round-trip") {
    EnvGuard seed_env("QMD_SEED");
    json j{{"n", 15},
           {"start", 7},
           {"steps", 25},
           {"magnus", {{"kind", "random"}, {"seed", 5}, {"allowed", {1, 2, 3, 6, 7}}}},
           {"derek", {{"kind", "strategy2"}, {"p", 3}, {"q", 5}}},
           {"outputs",
            {{"trace_csv", "t.csv"}, {"summary_json", "s.json"}, {"heatmap_pgm", "h.pgm"}}}};
    ExperimentConfig cfg = parse_config(j);
    SimulationResult a = simulate_experiment(cfg);
    SimulationResult b = simulate_experiment(cfg);
    CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
    CHECK(summary_to_json(a).dump(2) == summary_to_json(b).dump(2));
    CHECK(heatmap_to_pgm(a.trace) == heatmap_to_pgm(b.trace));

    auto dir = std::filesystem::temp_directory_path() / "qmd_experiments_test";
    std::filesystem::remove_all(dir);
    auto written = write_outputs(a, dir);
    REQUIRE(written.size() == 3);
    CHECK(slurp(dir / "t.csv") == trace_to_csv(a.trace));
    CHECK(slurp(dir / "s.json") == summary_to_json(a).dump(2) + "\n");
    CHECK(slurp(dir / "h.pgm") == heatmap_to_pgm(a.trace));
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("reference run reproduces the stored heatmap byte for byte") {
    ExperimentConfig cfg =
        load_config(std::filesystem::path(QMD_CONFIG_DIR) / "strategy2_n15.json");
    Trace trace = trace_experiment(cfg);
    CHECK(heatmap_to_pgm(trace, cfg.tolerances.visit) ==
          slurp(std::filesystem::path(QMD_GOLDEN_DIR) / "strategy2_n15.pgm"));
}

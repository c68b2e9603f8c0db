#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qmd/verify.hpp"

// Config-driven experiment runs: load a JSON description of one game, play
// it, and emit the trace table, a summary document and optionally a
// probability heatmap.  All emitters format deterministically so repeated
// runs are byte-identical.

namespace qmd::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MagnusConfig {
    std::string kind;            // ruler | list | constant | random
    std::vector<int> magnitudes; // list
    int magnitude = 0;           // constant
    uint64_t seed = 0;           // random
    int length = 0;              // random; 0 = use the walk length
    std::vector<int> allowed;    // random; empty = 1..floor(n/2)
};

struct DerekConfig {
    std::string kind;  // identity | strategy1 | single_h | strategy2 | strategy3 | classical_greedy
    int p = 0;
    int q = 0;
    int c = 0;
    std::set<int> hadamard_steps;  // strategy3; empty = {1}
};

struct ToleranceConfig {
    double visit = visit_tol;
    double attain = attain_tol;
    double restricted = restricted_tol;
};

struct OutputConfig {
    std::string trace_csv;
    std::string summary_json;
    std::string heatmap_pgm;
};

struct ExperimentConfig {
    int n = 0;
    int start = 0;
    int steps = 0;
    MagnusConfig magnus;
    DerekConfig derek;
    ToleranceConfig tolerances;
    OutputConfig outputs;
};

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required field: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("field has the wrong type: ") + key);
    }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("field has the wrong type: ") + key);
    }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.n = detail::require<int>(j, "n");
    if (cfg.n < 2) throw ConfigError("n must be at least 2");
    cfg.start = detail::field_or<int>(j, "start", 0);
    if (cfg.start < 0 || cfg.start >= cfg.n) throw ConfigError("start must lie in 0..n-1");
    cfg.steps = detail::require<int>(j, "steps");
    if (cfg.steps < 0) throw ConfigError("steps must be nonnegative");

    nlohmann::json mj = detail::require<nlohmann::json>(j, "magnus");
    cfg.magnus.kind = detail::require<std::string>(mj, "kind");
    if (cfg.magnus.kind == "ruler") {
        if ((cfg.n & (cfg.n - 1)) != 0) throw ConfigError("ruler plans need n = 2^k");
    } else if (cfg.magnus.kind == "list") {
        cfg.magnus.magnitudes = detail::require<std::vector<int>>(mj, "magnitudes");
        if (cfg.magnus.magnitudes.empty()) throw ConfigError("magnitude list must not be empty");
    } else if (cfg.magnus.kind == "constant") {
        cfg.magnus.magnitude = detail::require<int>(mj, "magnitude");
    } else if (cfg.magnus.kind == "random") {
        cfg.magnus.seed = detail::require<uint64_t>(mj, "seed");
        cfg.magnus.length = detail::field_or<int>(mj, "length", 0);
        cfg.magnus.allowed = detail::field_or<std::vector<int>>(mj, "allowed", {});
    } else {
        throw ConfigError("unknown magnus kind: " + cfg.magnus.kind);
    }
    auto check_mag = [&](int m) {
        if (m < 1 || m > cfg.n / 2) throw ConfigError("magnitudes must lie in 1..floor(n/2)");
    };
    for (int m : cfg.magnus.magnitudes) check_mag(m);
    for (int m : cfg.magnus.allowed) check_mag(m);
    if (cfg.magnus.kind == "constant") check_mag(cfg.magnus.magnitude);

    nlohmann::json dj = detail::require<nlohmann::json>(j, "derek");
    cfg.derek.kind = detail::require<std::string>(dj, "kind");
    if (cfg.derek.kind == "strategy2") {
        cfg.derek.p = detail::require<int>(dj, "p");
        cfg.derek.q = detail::require<int>(dj, "q");
    } else if (cfg.derek.kind == "strategy3") {
        cfg.derek.p = detail::require<int>(dj, "p");
        std::vector<int> hs = detail::field_or<std::vector<int>>(dj, "hadamard_steps", {1});
        cfg.derek.hadamard_steps.insert(hs.begin(), hs.end());
    } else if (cfg.derek.kind == "classical_greedy") {
        cfg.derek.p = detail::require<int>(dj, "p");
        cfg.derek.c = detail::require<int>(dj, "c");
    } else if (cfg.derek.kind != "identity" && cfg.derek.kind != "strategy1" &&
               cfg.derek.kind != "single_h") {
        throw ConfigError("unknown derek kind: " + cfg.derek.kind);
    }

    if (j.contains("tolerances")) {
        const nlohmann::json& tj = j.at("tolerances");
        cfg.tolerances.visit = detail::field_or<double>(tj, "visit", visit_tol);
        cfg.tolerances.attain = detail::field_or<double>(tj, "attain", attain_tol);
        cfg.tolerances.restricted = detail::field_or<double>(tj, "restricted", restricted_tol);
    }
    if (j.contains("outputs")) {
        const nlohmann::json& oj = j.at("outputs");
        cfg.outputs.trace_csv = detail::field_or<std::string>(oj, "trace_csv", "");
        cfg.outputs.summary_json = detail::field_or<std::string>(oj, "summary_json", "");
        cfg.outputs.heatmap_pgm = detail::field_or<std::string>(oj, "heatmap_pgm", "");
    }

    if (const char* env = std::getenv("QMD_SEED")) {
        try {
            cfg.magnus.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("QMD_SEED must be an unsigned integer");
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

inline MagnusPlan make_plan(const ExperimentConfig& cfg) {
    const MagnusConfig& m = cfg.magnus;
    if (m.kind == "ruler") return MagnusPlan::ruler(cfg.n);
    if (m.kind == "list") return MagnusPlan::explicit_list(m.magnitudes);
    if (m.kind == "constant") return MagnusPlan::constant(m.magnitude);
    std::vector<int> allowed = m.allowed.empty() ? all_magnitudes(cfg.n) : m.allowed;
    int length = m.length > 0 ? m.length : std::max(cfg.steps, 1);
    return MagnusPlan::seeded_random(m.seed, length, allowed);
}

inline std::unique_ptr<DerekResponder> make_responder(const ExperimentConfig& cfg) {
    const DerekConfig& d = cfg.derek;
    try {
        if (d.kind == "identity") return make_identity_derek();
        if (d.kind == "strategy1") return make_strategy1_derek();
        if (d.kind == "single_h") return make_single_hadamard_derek();
        if (d.kind == "strategy2") return derek_strategy2(d.p, d.q, cfg.start, cfg.n);
        if (d.kind == "strategy3") {
            std::set<int> hs = d.hadamard_steps.empty() ? std::set<int>{1} : d.hadamard_steps;
            return derek_strategy3(d.p, cfg.start, hs, cfg.n);
        }
        return derek_classical_greedy(cfg.n, d.p, d.c, cfg.start);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("derek parameters rejected: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(std::string("derek parameters rejected: ") + e.what());
    }
}

// --- results ----------------------------------------------------------------

struct RestrictedSummary {
    int modulus = 0;
    std::vector<int> members;
    double max_marginal = 0.0;
};

struct BoundsSummary {
    int claimed = 0;   // most positions this defense concedes
    int observed = 0;  // positions actually attained within the horizon
};

struct SimulationResult {
    ExperimentConfig config;
    GateScript script;
    Trace trace;
    std::vector<VisitedEntry> visited;
    std::map<int, int> attained_rounds;
    std::optional<RestrictedSummary> restricted;
    BoundsSummary bounds;
};

inline int claimed_bound(const ExperimentConfig& cfg) {
    const DerekConfig& d = cfg.derek;
    if (d.kind == "strategy2") return (d.p * (d.q - 1) + 1) * (cfg.n / (d.p * d.q));
    if (d.kind == "strategy3" || d.kind == "classical_greedy") return cfg.n - cfg.n / d.p;
    return cfg.n;
}

inline SimulationResult simulate_experiment(const ExperimentConfig& cfg) {
    GameDims dims(cfg.n);
    MagnusPlan plan = make_plan(cfg);
    std::unique_ptr<DerekResponder> derek = make_responder(cfg);
    SimulationResult result;
    result.config = cfg;
    result.script = generate_script(dims, cfg.start, plan, *derek, cfg.steps);
    result.trace = run_walk(result.script);
    result.visited = visited_set(result.trace, cfg.tolerances.visit);
    for (int x = 0; x < cfg.n; ++x)
        if (std::optional<int> round = attained(measured_walk(result.script, x), cfg.tolerances.attain))
            result.attained_rounds[x] = *round;
    if (std::optional<RestrictedSet> set = derek->restricted_set()) {
        RestrictedSummary rs;
        rs.modulus = set->modulus;
        rs.members = set->members();
        rs.max_marginal = restricted_marginal_max(result.trace, *set);
        result.restricted = rs;
    }
    result.bounds = {claimed_bound(cfg), static_cast<int>(result.attained_rounds.size())};
    return result;
}

// Trace only, for the heatmap path where attainment rounds are not needed.
inline Trace trace_experiment(const ExperimentConfig& cfg) {
    GameDims dims(cfg.n);
    MagnusPlan plan = make_plan(cfg);
    std::unique_ptr<DerekResponder> derek = make_responder(cfg);
    return run_walk(dims, cfg.start, plan, *derek, cfg.steps);
}

// --- emitters ---------------------------------------------------------------

inline std::string trace_to_csv(const Trace& trace) {
    std::string out = "step,position,probability\n";
    char buf[80];
    for (size_t t = 0; t < trace.marginals.size(); ++t)
        for (int x = 0; x < trace.dims.n; ++x) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.12g\n", t, x, trace.marginals[t][x]);
            out += buf;
        }
    return out;
}

inline nlohmann::ordered_json summary_to_json(const SimulationResult& result) {
    nlohmann::ordered_json j;
    j["n"] = result.config.n;
    j["start"] = result.config.start;
    j["steps"] = result.config.steps;
    nlohmann::ordered_json visited = nlohmann::ordered_json::array();
    for (const VisitedEntry& v : result.visited)
        visited.push_back({{"position", v.position}, {"step", v.step}});
    j["visited"] = visited;
    nlohmann::ordered_json attained = nlohmann::ordered_json::array();
    for (const auto& [x, round] : result.attained_rounds)
        attained.push_back({{"position", x}, {"round", round}});
    j["attained"] = attained;
    if (result.restricted) {
        j["restricted"] = {{"modulus", result.restricted->modulus},
                           {"members", result.restricted->members},
                           {"max_marginal", result.restricted->max_marginal}};
    }
    j["bounds"] = {{"claimed", result.bounds.claimed}, {"observed", result.bounds.observed}};
    return j;
}

// Plain PGM, one row per step: white = no probability, black = certainty.
inline std::string heatmap_to_pgm(const Trace& trace, double vtol = visit_tol) {
    std::string out = "P2\n" + std::to_string(trace.dims.n) + " " +
                      std::to_string(trace.marginals.size()) + "\n255\n";
    for (const std::vector<double>& row : trace.marginals) {
        for (int x = 0; x < trace.dims.n; ++x) {
            long pixel = 255 - std::lround(255.0 * row[x]);
            pixel = std::clamp(pixel, 0L, 255L);
            if (row[x] >= 1.0 - vtol) pixel = 0;
            if (x > 0) out += ' ';
            out += std::to_string(pixel);
        }
        out += '\n';
    }
    return out;
}

inline std::string attain_table_text(const GateScript& script, double atol = attain_tol) {
    std::string out = "position  first_attaining_round  final_stop_probability\n";
    char buf[96];
    for (int x = 0; x < script.dims.n; ++x) {
        MeasuredWalkResult mw = measured_walk(script, x);
        std::optional<int> round = attained(mw, atol);
        std::string label =
            round ? std::to_string(*round) : "never(" + std::to_string(script.steps.size()) + ")";
        std::snprintf(buf, sizeof buf, "%8d  %21s  %.12g\n", x, label.c_str(), mw.stop_prob.back());
        out += buf;
    }
    return out;
}

inline std::string classical_report_text(int n) {
    std::string out = "n: " + std::to_string(n) + "\n";
    out += "f_star: " + std::to_string(classical::f_star(n)) + "\n";
    std::optional<int> p = classical::smallest_odd_prime_factor(n);
    out += "smallest_odd_prime_factor: " + (p ? std::to_string(*p) : std::string("none")) + "\n";
    int horizon;
    if (classical::is_power_of_two(n)) {
        horizon = classical::r_opt_pow2(n);
        out += "optimal_moves: " + std::to_string(horizon) + "\n";
        out += "hurkens_bound: n/a (power of two)\n";
    } else {
        horizon = classical::hurkens_bound(n);
        out += "hurkens_bound: " + std::to_string(horizon) + "\n";
    }
    if (n <= 9)
        out += "minimax_oracle: " + std::to_string(classical::minimax_value(n, horizon)) +
               " (horizon " + std::to_string(horizon) + ")\n";
    else
        out += "minimax_oracle: skipped (n > 9)\n";
    return out;
}

// --- file output ------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Writes whatever the config asks for, prefixed by out_dir; returns the paths.
inline std::vector<std::filesystem::path> write_outputs(const SimulationResult& result,
                                                        const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    const OutputConfig& o = result.config.outputs;
    if (!o.trace_csv.empty()) {
        written.push_back(out_dir / o.trace_csv);
        write_text_file(written.back(), trace_to_csv(result.trace));
    }
    if (!o.summary_json.empty()) {
        written.push_back(out_dir / o.summary_json);
        write_text_file(written.back(), summary_to_json(result).dump(2) + "\n");
    }
    if (!o.heatmap_pgm.empty()) {
        written.push_back(out_dir / o.heatmap_pgm);
        write_text_file(written.back(), heatmap_to_pgm(result.trace, result.config.tolerances.visit));
    }
    return written;
}

}  // namespace qmd::cli

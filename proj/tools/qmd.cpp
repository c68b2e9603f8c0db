#include <iostream>

#include "CLI11.hpp"
#include "qmd/experiments.hpp"

// Command line front end.  Exit codes: 0 on success, 1 when a verification
// suite fails or an I/O problem occurs, 2 for configuration mistakes.

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    qmd::cli::ExperimentConfig cfg = qmd::cli::load_config(config_path);
    qmd::cli::SimulationResult result = qmd::cli::simulate_experiment(cfg);
    std::cout << "n=" << cfg.n << " start=" << cfg.start << " steps=" << cfg.steps
              << " magnus=" << cfg.magnus.kind << " derek=" << cfg.derek.kind << "\n";
    std::cout << "visited " << result.visited.size() << ", attained " << result.bounds.observed
              << " (defense concedes at most " << result.bounds.claimed << ")\n";
    if (result.restricted)
        std::cout << "restricted class mod " << result.restricted->modulus << " holds "
                  << result.restricted->members.size() << " positions, max marginal "
                  << result.restricted->max_marginal << "\n";
    std::vector<std::filesystem::path> written = qmd::cli::write_outputs(result, out_dir);
    for (const std::filesystem::path& p : written) std::cout << "wrote " << p.string() << "\n";
    if (written.empty()) std::cout << qmd::cli::summary_to_json(result).dump(2) << "\n";
    return 0;
}

int cmd_attain(const std::string& config_path) {
    qmd::cli::ExperimentConfig cfg = qmd::cli::load_config(config_path);
    qmd::GameDims dims(cfg.n);
    qmd::MagnusPlan plan = qmd::cli::make_plan(cfg);
    std::unique_ptr<qmd::DerekResponder> derek = qmd::cli::make_responder(cfg);
    qmd::GateScript script = qmd::generate_script(dims, cfg.start, plan, *derek, cfg.steps);
    std::cout << qmd::cli::attain_table_text(script, cfg.tolerances.attain);
    return 0;
}

int cmd_classical(int n) {
    std::cout << qmd::cli::classical_report_text(n);
    return 0;
}

int cmd_heatmap(const std::string& config_path, const std::string& out_path) {
    qmd::cli::ExperimentConfig cfg = qmd::cli::load_config(config_path);
    qmd::Trace trace = qmd::cli::trace_experiment(cfg);
    qmd::cli::write_text_file(out_path, qmd::cli::heatmap_to_pgm(trace, cfg.tolerances.visit));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, int n, int p, int q, int start, int seeds, int cases) {
    qmd::SuiteReport report;
    if (suite == "prop1") {
        report = qmd::verify_prop1(n > 0 ? n : 8);
    } else if (suite == "prop2") {
        report = qmd::verify_prop2(n > 0 ? n : 15, p > 0 ? p : 3, q > 0 ? q : 5,
                                   start >= 0 ? start : 7, seeds > 0 ? seeds : 20);
    } else if (suite == "prop3") {
        report = qmd::verify_prop3(n > 0 ? n : 25, p > 0 ? p : 5, start >= 0 ? start : 0,
                                   seeds > 0 ? seeds : 20);
    } else {
        report = qmd::verify_engine(cases > 0 ? cases : 1000);
    }
    std::cout << "suite " << report.suite << "\n";
    for (const qmd::CheckResult& check : report.checks) {
        std::cout << "  " << (check.pass ? "PASS" : "FAIL") << "  " << check.name;
        if (!check.detail.empty()) std::cout << "  [" << check.detail << "]";
        std::cout << "\n";
    }
    bool ok = report.all_pass();
    std::cout << "suite " << report.suite << (ok ? ": PASS" : ": FAIL") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnus-Derek games on a cycle: quantum walk simulator and verifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", out_path, suite;
    int n = 0, p = 0, q = 0, start = -1, seeds = 0, cases = 0;

    CLI::App* sim = app.add_subcommand("simulate", "play one configured game and write its artifacts");
    sim->add_option("--config", config_path, "JSON experiment description")->required();
    sim->add_option("--out-dir", out_dir, "directory receiving the configured output files");

    CLI::App* att = app.add_subcommand("attain", "per-position attainment rounds for one game");
    att->add_option("--config", config_path, "JSON experiment description")->required();

    CLI::App* cls = app.add_subcommand("classical", "closed-form values of the classical game");
    cls->add_option("--n", n, "cycle size")->required();

    CLI::App* ver = app.add_subcommand("verify", "run a property suite");
    ver->add_option("suite", suite, "prop1 | prop2 | prop3 | engine")
        ->required()
        ->check(CLI::IsMember({"prop1", "prop2", "prop3", "engine"}));
    ver->add_option("--n", n, "cycle size");
    ver->add_option("--p", p, "smaller odd prime");
    ver->add_option("--q", q, "larger odd prime");
    ver->add_option("--start", start, "start position");
    ver->add_option("--seeds", seeds, "number of seeded random plans");
    ver->add_option("--cases", cases, "random cases for the engine suite");

    CLI::App* heat = app.add_subcommand("heatmap", "render the position distribution over time");
    heat->add_option("--config", config_path, "JSON experiment description")->required();
    heat->add_option("--out", out_path, "output PGM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (att->parsed()) return cmd_attain(config_path);
        if (cls->parsed()) return cmd_classical(n);
        if (ver->parsed()) return cmd_verify(suite, n, p, q, start, seeds, cases);
        if (heat->parsed()) return cmd_heatmap(config_path, out_path);
    } catch (const qmd::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

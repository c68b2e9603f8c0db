// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Everything here goes through the public verification suites or the
// installed CLI binary, never through test-only shortcuts.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmd/experiments.hpp"
#include "qmd/verify.hpp"

namespace {

namespace fs = std::filesystem;

bool all_ok = true;

void report(int number, const std::string& text, bool pass, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number, text.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) all_ok = false;
}

const qmd::CheckResult* find_check(const qmd::SuiteReport& report, const std::string& prefix) {
    for (const qmd::CheckResult& c : report.checks)
        if (c.name.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

// AND together one named check across several suite reports.
bool gather(const std::vector<qmd::SuiteReport>& reports, const std::string& prefix,
            std::string& detail) {
    bool ok = true;
    for (const qmd::SuiteReport& r : reports) {
        const qmd::CheckResult* c = find_check(r, prefix);
        if (!c) {
            detail = "missing check: " + prefix;
            return false;
        }
        if (!c->pass) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += c->detail.empty() ? c->name : c->detail;
        }
    }
    return ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<unreadable: " + p.string() + ">";
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(QMD_BIN_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;

    std::vector<qmd::SuiteReport> prop1;
    for (int n : {4, 8, 16}) prop1.push_back(qmd::verify_prop1(n));

    {
        std::string detail;
        bool ok = gather(prop1, "ruler with identity coins", detail) &&
                  gather(prop1, "ruler covers the cycle for every classical direction word", detail);
        report(1, "ruler magnitudes visit all of n in {4,8,16} within n-1 steps, "
                  "for every one of the 2^(n-1) direction words", ok, detail);
    }
    {
        std::string detail;
        bool ok = gather(prop1, "parity coin keeps the visited set short", detail);
        report(2, "the parity coin defense keeps |visited| < n (n=4 pins {0@0, 2@1})", ok, detail);
    }
    {
        std::string detail;
        bool ok = gather(prop1, "every position is attained by round n-1", detail);
        report(3, "measured walks still attain every position by round n-1 "
                  "(n=4, x=1: stop probability 0.5 at round 2, certain at 3)", ok, detail);
    }
    {
        std::string detail;
        bool ok = gather(prop1, "a single opening Hadamard", detail);
        report(4, "a single opening Hadamard bounds the visited set by 2 over 4n steps", ok, detail);
    }

    {
        qmd::SuiteReport r = qmd::verify_prop2(15, 3, 5, 7, 100);
        std::string detail;
        for (const qmd::CheckResult& c : r.checks)
            if (!c.pass) detail += (detail.empty() ? "" : "; ") + c.name + ": " + c.detail;
        report(5, "pair defense on n=15 (start 7): start-only visits, empty class "
                  "from commitment on, >= 2 never-attained, <= 13 attained "
                  "(fixed run + 100 seeded plans, 60 steps)", r.all_pass(), detail);
    }
    {
        qmd::SuiteReport r = qmd::verify_prop2(45, 3, 5, 0, 100);
        const qmd::CheckResult* c = find_check(r, "attained positions stay within");
        bool ok = r.all_pass() && c != nullptr;
        report(6, "pair defense on n=45 leaves at least 6 positions never attained "
                  "under the same adversarial suite", ok, ok ? c->detail : "suite failed");
    }
    {
        qmd::SuiteReport r = qmd::verify_prop3(25, 5, 0, 100);
        std::string detail;
        for (const qmd::CheckResult& c : r.checks)
            if (!c.pass) detail += (detail.empty() ? "" : "; ") + c.name + ": " + c.detail;
        report(7, "controlled defense on n=25: class of 5 stays empty, coin pairs stay "
                  "balanced, never-attained >= 5; extra spreading Hadamards keep the "
                  "identical class", r.all_pass(), detail);
    }

    {
        auto t0 = clock::now();
        bool ok = true;
        std::string detail;
        for (int n = 2; n <= 9; ++n) {
            int horizon = qmd::classical::is_power_of_two(n) ? qmd::classical::r_opt_pow2(n)
                                                             : qmd::classical::hurkens_bound(n);
            int value = qmd::classical::minimax_value(n, horizon);
            if (value != qmd::classical::f_star(n)) {
                ok = false;
                detail += "n=" + std::to_string(n) + " gave " + std::to_string(value) + "; ";
            }
        }
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        if (secs >= 60.0) {
            ok = false;
            detail += "took " + std::to_string(secs) + "s";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2fs", secs);
        report(8, "exact minimax equals the closed-form count for n=2..9 within 60s",
               ok, ok ? std::string(buf) : detail);
    }
    {
        qmd::SuiteReport r = qmd::verify_engine(1000);
        std::string detail;
        for (const qmd::CheckResult& c : r.checks)
            if (!c.pass) detail += (detail.empty() ? "" : "; ") + c.name + ": " + c.detail;
        report(9, "1000 random gate applications hold the norm to 1e-12 and 1000 "
                  "permutation walks reproduce the classical game exactly",
               r.all_pass(), detail);
    }

    {
        fs::path work = fs::temp_directory_path() / "qmd_acceptance";
        fs::remove_all(work);
        bool ok = true;
        std::string detail;
        const char* configs[] = {"ruler_strategy1_n8.json", "strategy2_n15.json",
                                 "strategy3_n25.json", "strategy3_n25_spread.json"};
        for (const char* name : configs) {
            fs::path cfg = fs::path(QMD_CONFIG_DIR) / name;
            std::string stem = fs::path(name).stem().string();
            fs::path a = work / "a" / stem, b = work / "b" / stem;
            if (run_cli("simulate --config " + cfg.string() + " --out-dir " + a.string()) != 0 ||
                run_cli("simulate --config " + cfg.string() + " --out-dir " + b.string()) != 0) {
                ok = false;
                detail += std::string(name) + ": simulate failed; ";
                continue;
            }
            for (const fs::directory_entry& e : fs::directory_iterator(a)) {
                fs::path twin = b / e.path().filename();
                if (slurp(e.path()) != slurp(twin)) {
                    ok = false;
                    detail += e.path().filename().string() + " differs between runs; ";
                }
            }
        }
        std::string golden = slurp(fs::path(QMD_GOLDEN_DIR) / "strategy2_n15.pgm");
        if (slurp(work / "a" / "strategy2_n15" / "strategy2_n15.pgm") != golden) {
            ok = false;
            detail += "heatmap deviates from the stored reference; ";
        }
        if (run_cli("simulate --config " + (work / "no_such.json").string()) != 2) {
            ok = false;
            detail += "bad config should exit with status 2; ";
        }
        fs::remove_all(work);
        report(10, "repeated CLI runs on the reference configs are byte-identical, match "
                   "the stored heatmap, and bad configs exit with status 2", ok, detail);
    }

    return all_ok ? 0 : 1;
}

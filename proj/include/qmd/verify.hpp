#pragma once

#include <sstream>

#include "qmd/analysis.hpp"
#include "qmd/classical.hpp"
#include "qmd/random.hpp"

// Property suites behind `qmd verify` and the acceptance runner.  Each suite
// replays a family of adversarial walks and reports one line per claim.

namespace qmd {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

inline constexpr double restricted_tol = 1e-12;

// Fixed adversarial magnitude sequences for the adaptive suites, folded into
// 1..floor(n/2) so the same probes work on any admissible cycle.
inline const std::vector<int> probe_magnitudes_pq = {3, 6, 3, 1, 7, 2, 5, 4};
inline const std::vector<int> probe_magnitudes_p = {2, 3, 7, 5, 11, 4, 9, 6};

inline MagnusPlan fixed_probe_plan(int n, const std::vector<int>& base) {
    std::vector<int> seq;
    seq.reserve(base.size());
    for (int e : base) seq.push_back(1 + (e - 1) % (n / 2));
    return MagnusPlan::explicit_list(seq);
}

inline std::vector<int> all_magnitudes(int n) {
    std::vector<int> out(n / 2);
    for (int i = 0; i < n / 2; ++i) out[i] = i + 1;
    return out;
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

struct Claim {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

inline void push(SuiteReport& report, const std::string& name, const Claim& c,
                 const std::string& ok_detail = "") {
    report.checks.push_back({name, c.pass, c.pass ? ok_detail : c.detail});
}

}  // namespace detail

// --- cycle-covering suite: ruler magnitudes against the oblivious coins ----

inline SuiteReport verify_prop1(int n) {
    if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument("suite needs n = 2^k >= 4");
    SuiteReport report{"prop1", {}};
    GameDims dims(n);
    std::vector<int> ruler = ruler_sequence(n);

    {
        detail::Claim c;
        IdentityDerek derek;
        Trace trace = run_walk(dims, 0, MagnusPlan::ruler(n), derek, n - 1);
        std::vector<VisitedEntry> visited = visited_set(trace);
        if (static_cast<int>(visited.size()) != n) c.fail("visited only " + std::to_string(visited.size()));
        detail::push(report, "ruler with identity coins covers the cycle in n-1 steps", c,
                     std::to_string(visited.size()) + " positions");
    }
    {
        detail::Claim c;
        long long cases = 1LL << (n - 1);
        for (long long bits = 0; bits < cases; ++bits) {
            std::vector<int> dirs(n - 1);
            for (int i = 0; i < n - 1; ++i) dirs[i] = static_cast<int>((bits >> i) & 1);
            auto run = classical::simulate_classical(n, 0, ruler, dirs);
            if (static_cast<int>(run.visited.size()) != n) {
                c.fail("direction word " + std::to_string(bits) + " evades full coverage");
                break;
            }
        }
        detail::push(report, "ruler covers the cycle for every classical direction word", c,
                     std::to_string(cases) + " words checked");
    }
    {
        detail::Claim c;
        Strategy1Derek derek;
        Trace trace = run_walk(dims, 0, MagnusPlan::ruler(n), derek, n - 1);
        std::vector<VisitedEntry> visited = visited_set(trace);
        if (static_cast<int>(visited.size()) >= n) c.fail("parity coin failed to shrink the visited set");
        if (n == 4) {
            std::vector<VisitedEntry> want = {{0, 0}, {2, 1}};
            if (visited != want) c.fail("visited set differs from {0@0, 2@1}");
        }
        detail::push(report, "parity coin keeps the visited set short of the cycle", c,
                     std::to_string(visited.size()) + " of " + std::to_string(n));
    }
    {
        detail::Claim c;
        Strategy1Derek derek;
        GateScript script = generate_script(dims, 0, MagnusPlan::ruler(n), derek, n - 1);
        for (int x = 0; x < n && c.pass; ++x) {
            MeasuredWalkResult mw = measured_walk(script, x);
            std::optional<int> round = attained(mw);
            if (!round || *round > n - 1) c.fail("position " + std::to_string(x) + " not attained by round n-1");
            if (n == 4 && x == 1 && c.pass) {
                if (!round || *round != 3) c.fail("position 1 should attain at round 3");
                if (std::abs(mw.stop_prob[2] - 0.5) > 1e-9) c.fail("halfway stop probability should be 0.5");
                std::optional<int> half = concurrent_hitting_time(mw, 0.5);
                if (!half || *half != 2) c.fail("half-mass hitting time should be round 2");
            }
        }
        detail::push(report, "every position is attained by round n-1 despite the parity coin", c);
    }
    {
        detail::Claim c;
        SingleHadamardDerek derek;
        Trace trace = run_walk(dims, 0, MagnusPlan::ruler(n), derek, 4 * n);
        size_t count = visited_set(trace).size();
        if (count > 2) c.fail("visited " + std::to_string(count) + " positions");
        detail::push(report, "a single opening Hadamard pins the walk to two positions", c,
                     std::to_string(count) + " visited over " + std::to_string(4 * n) + " steps");
    }
    return report;
}

// --- residue-defense suite without position control ------------------------

namespace detail {

struct PairRunStats {
    std::optional<RestrictedSet> set;
    int commit_step = 0;  // first step whose magnitude pq does not divide
    std::vector<VisitedEntry> visited;
    double member_mass = 0.0;
    double class_mass_after_commit = 0.0;
    int attained_count = 0;
};

inline PairRunStats eval_strategy2_run(int n, int p, int q, int start, const MagnusPlan& plan, int T) {
    GameDims dims(n);
    Strategy2Derek derek(p, q, start, n);
    GateScript script = generate_script(dims, start, plan, derek, T);
    PairRunStats stats;
    stats.set = derek.restricted_set();
    for (int i = 1; i <= T; ++i)
        if (script.steps[i - 1].magnitude % (p * q) != 0) {
            stats.commit_step = i;
            break;
        }
    Trace trace = run_walk(script);
    stats.visited = visited_set(trace);
    if (stats.set) {
        stats.member_mass = restricted_marginal_max(trace, *stats.set);
        RestrictedSet full{n, stats.set->modulus, start, std::nullopt};
        std::vector<int> members = full.members();
        for (size_t t = stats.commit_step; t < trace.marginals.size(); ++t) {
            double mass = 0.0;
            for (int x : members) mass += trace.marginals[t][x];
            stats.class_mass_after_commit = std::max(stats.class_mass_after_commit, mass);
        }
    }
    for (int x = 0; x < n; ++x)
        if (attained(measured_walk(script, x))) ++stats.attained_count;
    return stats;
}

}  // namespace detail

inline SuiteReport verify_prop2(int n, int p, int q, int start, int seed_count) {
    SuiteReport report{"prop2", {}};
    const int T = 60;
    int pq = p * q;
    if (n % pq != 0) throw std::invalid_argument("pq must divide n");
    int min_members = n / q - n / pq;
    int max_attained = (p * (q - 1) + 1) * (n / pq);

    std::vector<std::pair<std::string, MagnusPlan>> plans;
    plans.emplace_back("fixed", fixed_probe_plan(n, probe_magnitudes_pq));
    for (int s = 1; s <= seed_count; ++s)
        plans.emplace_back("seed " + std::to_string(s), MagnusPlan::seeded_random(s, T, all_magnitudes(n)));

    detail::Claim committed, small_class, start_only, members_clear, class_clear, attain_box;
    double worst_member_mass = 0.0, worst_class_mass = 0.0;
    int min_never = n;
    for (const auto& [label, plan] : plans) {
        detail::PairRunStats stats = detail::eval_strategy2_run(n, p, q, start, plan, T);
        if (!stats.set) {
            committed.fail(label + ": no class committed");
            continue;
        }
        int member_count = static_cast<int>(stats.set->members().size());
        if (member_count < min_members)
            small_class.fail(label + ": class has only " + std::to_string(member_count) + " members");
        if (stats.visited.size() != 1 || stats.visited[0].position != start || stats.visited[0].step != 0)
            start_only.fail(label + ": walk certainly occupies more than the start");
        worst_member_mass = std::max(worst_member_mass, stats.member_mass);
        if (stats.member_mass > restricted_tol)
            members_clear.fail(label + ": member mass " + detail::fmt(stats.member_mass));
        worst_class_mass = std::max(worst_class_mass, stats.class_mass_after_commit);
        if (stats.class_mass_after_commit > restricted_tol)
            class_clear.fail(label + ": class mass " + detail::fmt(stats.class_mass_after_commit));
        int never = n - stats.attained_count;
        min_never = std::min(min_never, never);
        if (stats.attained_count > max_attained || never < member_count)
            attain_box.fail(label + ": " + std::to_string(stats.attained_count) + " attained");
    }

    std::string runs = std::to_string(plans.size()) + " runs";
    detail::push(report, "the defense commits to a residue class", committed, runs);
    detail::push(report, "the committed class holds at least n/q - n/pq positions", small_class,
                 ">= " + std::to_string(min_members));
    detail::push(report, "only the start is ever certainly occupied", start_only, runs);
    detail::push(report, "class members never carry probability mass", members_clear,
                 "worst mass " + detail::fmt(worst_member_mass));
    detail::push(report, "the whole residue class is empty from the commit step on", class_clear,
                 "worst mass " + detail::fmt(worst_class_mass));
    detail::push(report, "attained positions stay within the [p(q-1)+1]m bound", attain_box,
                 "<= " + std::to_string(max_attained) + ", never-attained >= " + std::to_string(min_never));
    return report;
}

// --- residue-defense suite with position control ----------------------------

namespace detail {

struct ControlledRunStats {
    std::optional<RestrictedSet> set;
    std::vector<VisitedEntry> visited;
    double member_mass = 0.0;
    double balance_defect = 0.0;  // worst violation of the equal-or-absent coin pair rule
    int attained_count = 0;
};

inline ControlledRunStats eval_strategy3_run(int n, int p, int start, const std::set<int>& hadamard_steps,
                                             const MagnusPlan& plan, int T) {
    GameDims dims(n);
    Strategy3Derek derek(p, start, hadamard_steps, n);
    GateScript script = generate_script(dims, start, plan, derek, T);
    ControlledRunStats stats;
    stats.set = derek.restricted_set();

    QState state = new_state(dims, start);
    Trace trace{dims, start, {position_marginal(state)}, {}, {}};
    auto scan_balance = [&] {
        for (int m = 0; m < dims.mag_dim; ++m)
            for (int x = 0; x < dims.n; ++x) {
                double a0 = std::abs(state.amp[dims.index(m, 0, x)]);
                double a1 = std::abs(state.amp[dims.index(m, 1, x)]);
                double defect = std::min(std::abs(a0 - a1), std::min(a0, a1));
                stats.balance_defect = std::max(stats.balance_defect, defect);
            }
    };
    scan_balance();
    for (const StepGates& sg : script.steps) {
        state = step(state, sg.gate, sg.coin);
        trace.marginals.push_back(position_marginal(state));
        scan_balance();
    }

    stats.visited = visited_set(trace);
    if (stats.set) stats.member_mass = restricted_marginal_max(trace, *stats.set);
    for (int x = 0; x < n; ++x)
        if (attained(measured_walk(script, x))) ++stats.attained_count;
    return stats;
}

}  // namespace detail

inline SuiteReport verify_prop3(int n, int p, int start, int seed_count) {
    SuiteReport report{"prop3", {}};
    const int T = 60;
    if (n % p != 0) throw std::invalid_argument("p must divide n");
    const std::set<int> opening_only = {1};
    const std::set<int> spread = {1, 2, 3, 4, 8, 9, 10, 11};

    std::vector<std::pair<std::string, MagnusPlan>> plans;
    plans.emplace_back("fixed", fixed_probe_plan(n, probe_magnitudes_p));
    for (int s = 1; s <= seed_count; ++s)
        plans.emplace_back("seed " + std::to_string(s), MagnusPlan::seeded_random(s, T, all_magnitudes(n)));

    detail::Claim committed, class_size, start_only, members_clear, balanced, attain_box, same_class;
    double worst_member_mass = 0.0, worst_balance = 0.0;
    int min_never = n;
    std::optional<RestrictedSet> fixed_class;
    for (const auto& [label, plan] : plans) {
        detail::ControlledRunStats stats =
            detail::eval_strategy3_run(n, p, start, opening_only, plan, T);
        if (!stats.set) {
            committed.fail(label + ": no class committed");
            continue;
        }
        if (label == "fixed") fixed_class = stats.set;
        if (static_cast<int>(stats.set->members().size()) != n / p)
            class_size.fail(label + ": class size " + std::to_string(stats.set->members().size()));
        if (stats.visited.size() != 1 || stats.visited[0].position != start || stats.visited[0].step != 0)
            start_only.fail(label + ": walk certainly occupies more than the start");
        worst_member_mass = std::max(worst_member_mass, stats.member_mass);
        if (stats.member_mass > restricted_tol)
            members_clear.fail(label + ": member mass " + detail::fmt(stats.member_mass));
        worst_balance = std::max(worst_balance, stats.balance_defect);
        if (stats.balance_defect > restricted_tol)
            balanced.fail(label + ": coin pair defect " + detail::fmt(stats.balance_defect));
        int never = n - stats.attained_count;
        min_never = std::min(min_never, never);
        if (never < n / p || stats.attained_count > n - n / p)
            attain_box.fail(label + ": " + std::to_string(stats.attained_count) + " attained");
    }
    {
        detail::ControlledRunStats stats = detail::eval_strategy3_run(
            n, p, start, spread, fixed_probe_plan(n, probe_magnitudes_p), T);
        if (!stats.set || !fixed_class || !(*stats.set == *fixed_class))
            same_class.fail("spreading Hadamards changed the committed class");
        if (stats.member_mass > restricted_tol)
            same_class.fail("spread run leaks mass " + detail::fmt(stats.member_mass));
        if (stats.balance_defect > restricted_tol)
            same_class.fail("spread run coin pair defect " + detail::fmt(stats.balance_defect));
        if (stats.visited.size() != 1) same_class.fail("spread run certainly occupies more than the start");
    }

    std::string runs = std::to_string(plans.size()) + " runs";
    detail::push(report, "the defense commits to a residue class", committed, runs);
    detail::push(report, "the committed class holds n/p positions", class_size,
                 std::to_string(n / p) + " members");
    detail::push(report, "only the start is ever certainly occupied", start_only, runs);
    detail::push(report, "class members never carry probability mass", members_clear,
                 "worst mass " + detail::fmt(worst_member_mass));
    detail::push(report, "coin amplitude pairs stay balanced or absent", balanced,
                 "worst defect " + detail::fmt(worst_balance));
    detail::push(report, "never-attained stays >= n/p and attained <= n - n/p", attain_box,
                 "never-attained >= " + std::to_string(min_never));
    detail::push(report, "extra spreading Hadamards keep the same class and guarantees", same_class);
    return report;
}

// --- engine suite -----------------------------------------------------------

inline SuiteReport verify_engine(int cases) {
    SuiteReport report{"engine", {}};
    {
        detail::Claim c;
        std::mt19937_64 rng(2026);
        double worst = 0.0;
        for (int k = 0; k < cases; ++k) {
            GameDims dims(2 + static_cast<int>(rng() % 15));
            QState state = random_state(dims, rng);
            switch (rng() % 4) {
                case 0:
                    state = apply_magnitude_gate(state, MagnitudeGate(random_unitary(dims.mag_dim, rng)));
                    break;
                case 1:
                    state = apply_coin(state, random_coin(rng));
                    break;
                case 2: {
                    PositionControlledCoin ctrl;
                    for (int x = 0; x < dims.n; ++x)
                        if (rng() % 2) ctrl.per_position.emplace(x, random_coin(rng));
                    state = apply_controlled_coin(state, ctrl);
                    break;
                }
                default:
                    state = apply_shift(state);
            }
            worst = std::max(worst, std::abs(state.norm() - 1.0));
        }
        if (worst > unitary_tol) c.fail("norm drifted by " + detail::fmt(worst));
        detail::push(report, "random gates preserve the norm", c,
                     std::to_string(cases) + " applications, worst drift " + detail::fmt(worst));
    }
    {
        detail::Claim c;
        std::mt19937_64 rng(4096);
        for (int k = 0; k < cases && c.pass; ++k) {
            int n = 2 + static_cast<int>(rng() % 15);
            GameDims dims(n);
            int start = static_cast<int>(rng() % n);
            const int T = 30;
            std::vector<int> mags(T), dirs(T);
            for (int i = 0; i < T; ++i) {
                mags[i] = 1 + static_cast<int>(rng() % (n / 2));
                dirs[i] = static_cast<int>(rng() % 2);
            }
            classical::ClassicalRun run = classical::simulate_classical(n, start, mags, dirs);
            QState state = new_state(dims, start);
            int prev_m = 0, prev_d = 0;
            for (int i = 0; i < T; ++i) {
                MagnitudeGate gate = build_cyclic_permutation(dims.mag_dim, mod_floor(mags[i] - prev_m, dims.mag_dim));
                CoinOp coin = (dirs[i] == prev_d) ? CoinOp::identity() : CoinOp::not_gate();
                state = step(state, gate, coin);
                prev_m = mags[i];
                prev_d = dirs[i];
                std::vector<double> row = position_marginal(state);
                for (int x = 0; x < n; ++x) {
                    double want = (x == run.positions[i + 1]) ? 1.0 : 0.0;
                    if (row[x] != want) {
                        c.fail("case " + std::to_string(k) + " diverged from the classical walk");
                        break;
                    }
                }
                if (!c.pass) break;
            }
        }
        detail::push(report, "permutation walks reproduce the classical game exactly", c,
                     std::to_string(cases) + " runs of 30 steps");
    }
    return report;
}

}  // namespace qmd

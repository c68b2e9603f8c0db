#pragma once

#include "qmd/strategies.hpp"

// Walk drivers and observation layers.  A walk is generated once as a gate
// script; the plain run records position marginals, the measured variant
// replays the same script against a projective check for one target
// position at every round.

namespace qmd {

inline constexpr double visit_tol = 1e-9;
inline constexpr double attain_tol = 1e-6;

struct StepGates {
    int magnitude;
    MagnitudeGate gate;
    CoinAction coin;
};

struct GateScript {
    GameDims dims;
    int start;
    std::vector<StepGates> steps;
};

// Play plan against responder for total_steps rounds and record every gate.
// Adaptive responders make their choices here, against the undisturbed
// walk; replays (measured or not) then see the exact same gate sequence.
inline GateScript generate_script(const GameDims& dims, int start, const MagnusPlan& plan,
                                  DerekResponder& derek, int total_steps) {
    if (total_steps < 0) throw std::invalid_argument("step count must be nonnegative");
    if (start < 0 || start >= dims.n) throw std::out_of_range("start position outside the cycle");
    GateScript script{dims, start, {}};
    script.steps.reserve(total_steps);
    std::vector<int> history;
    history.reserve(total_steps);
    for (int i = 1; i <= total_steps; ++i) {
        int m = plan.magnitude_at(i);
        history.push_back(m);
        MagnitudeGate gate = plan.gate_at(i, dims.mag_dim);
        CoinAction coin = derek.next(i, m, history);
        script.steps.push_back({m, std::move(gate), std::move(coin)});
    }
    return script;
}

struct Trace {
    GameDims dims;
    int start;
    std::vector<std::vector<double>> marginals;  // rows 0..T
    std::vector<int> magnitude_log;
    std::vector<std::string> coin_log;
};

inline Trace run_walk(const GateScript& script) {
    Trace trace{script.dims, script.start, {}, {}, {}};
    QState state = new_state(script.dims, script.start);
    trace.marginals.push_back(position_marginal(state));
    for (const StepGates& sg : script.steps) {
        state = step(state, sg.gate, sg.coin);
        trace.marginals.push_back(position_marginal(state));
        trace.magnitude_log.push_back(sg.magnitude);
        trace.coin_log.push_back(describe_action(sg.coin));
    }
    return trace;
}

inline Trace run_walk(const GameDims& dims, int start, const MagnusPlan& plan, DerekResponder& derek,
                      int total_steps) {
    return run_walk(generate_script(dims, start, plan, derek, total_steps));
}

struct VisitedEntry {
    int position;
    int step;  // first row where the marginal concentrates here

    bool operator==(const VisitedEntry&) const = default;
};

// Positions the walk certainly occupies at some row: marginal >= 1 - tol.
inline std::vector<VisitedEntry> visited_set(const Trace& trace, double tol = visit_tol) {
    std::vector<VisitedEntry> out;
    for (int x = 0; x < trace.dims.n; ++x)
        for (size_t t = 0; t < trace.marginals.size(); ++t)
            if (trace.marginals[t][x] >= 1.0 - tol) {
                out.push_back({x, static_cast<int>(t)});
                break;
            }
    return out;
}

struct MeasuredWalkResult {
    int target;
    std::vector<double> stop_prob;      // cumulative, rounds 0..T
    std::vector<double> residual_norm;  // after each round's projection
};

// Projective search for one position: at every round, first check the
// target (accumulating the stop probability and dropping that amplitude),
// then advance the unnormalized residual by the scripted step.
inline MeasuredWalkResult measured_walk(const GateScript& script, int target) {
    const GameDims& dims = script.dims;
    if (target < 0 || target >= dims.n) throw std::out_of_range("target position outside the cycle");
    MeasuredWalkResult result{target, {}, {}};
    QState state = new_state(dims, script.start);
    double stopped = 0.0;
    auto project = [&] {
        double hit = 0.0;
        for (int m = 0; m < dims.mag_dim; ++m)
            for (int d = 0; d < 2; ++d) {
                cplx& a = state.amp[dims.index(m, d, target)];
                hit += std::norm(a);
                a = 0.0;
            }
        stopped += hit;
        result.stop_prob.push_back(stopped);
        result.residual_norm.push_back(state.norm());
    };
    project();
    for (const StepGates& sg : script.steps) {
        state = step(state, sg.gate, sg.coin);
        project();
    }
    return result;
}

inline MeasuredWalkResult measured_walk(const GameDims& dims, int start, const MagnusPlan& plan,
                                        DerekResponder& derek, int target, int total_steps) {
    return measured_walk(generate_script(dims, start, plan, derek, total_steps), target);
}

// First round where the cumulative stop probability reaches 1 - tol.
inline std::optional<int> attained(const MeasuredWalkResult& result, double tol = attain_tol) {
    for (size_t t = 0; t < result.stop_prob.size(); ++t)
        if (result.stop_prob[t] >= 1.0 - tol) return static_cast<int>(t);
    return std::nullopt;
}

// First round where the cumulative stop probability reaches p (up to
// rounding: amplitudes like 1/sqrt(2) square to just under one half).
inline std::optional<int> concurrent_hitting_time(const MeasuredWalkResult& result, double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("threshold must lie in (0, 1]");
    for (size_t t = 0; t < result.stop_prob.size(); ++t)
        if (result.stop_prob[t] >= p - 1e-12) return static_cast<int>(t);
    return std::nullopt;
}

// Largest probability mass any row places on the restricted positions.
inline double restricted_marginal_max(const Trace& trace, const RestrictedSet& set) {
    if (set.n != trace.dims.n) throw std::invalid_argument("restricted set built for a different cycle");
    std::vector<int> members = set.members();
    double worst = 0.0;
    for (const std::vector<double>& row : trace.marginals) {
        double mass = 0.0;
        for (int x : members) mass += row[x];
        worst = std::max(worst, mass);
    }
    return worst;
}

struct VisitReport {
    std::vector<VisitedEntry> visited;
    std::map<int, int> attained;  // position -> first attaining round
};

// Full observation sweep: one plain run for the visited set, one measured
// walk per position for the attained rounds.
inline VisitReport analyze_walk(const GateScript& script, double vtol = visit_tol,
                                double atol = attain_tol) {
    VisitReport report;
    report.visited = visited_set(run_walk(script), vtol);
    for (int x = 0; x < script.dims.n; ++x)
        if (std::optional<int> round = attained(measured_walk(script, x), atol)) report.attained[x] = *round;
    return report;
}

}  // namespace qmd

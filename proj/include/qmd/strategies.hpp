#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>

#include "qmd/engine.hpp"

// Move catalogs for both players.  Magnus side: magnitude plans realized as
// cyclic permutation gates.  Derek side: coin responders, from the oblivious
// parity strategies up to the adaptive ones that defend a residue class of
// positions for the whole game.

namespace qmd {

inline bool is_prime(int v) {
    if (v < 2) return false;
    for (int d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Magnus

// Divide-and-conquer magnitude sequence for n = 2^k: element i is
// n / 2^(t+1) with t the number of trailing zero bits of i.  Walking it
// visits the whole cycle in n-1 moves whatever the directions do.
inline std::vector<int> ruler_sequence(int n) {
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("ruler sequence needs n = 2^k >= 2");
    std::vector<int> seq;
    seq.reserve(n - 1);
    for (int i = 1; i < n; ++i) seq.push_back(n >> (std::countr_zero(static_cast<unsigned>(i)) + 1));
    return seq;
}

// Cyclic gates that drive the magnitude register through the announced
// sequence: gate i shifts by m_i - m_{i-1} (mod dim), starting from |0>.
inline std::vector<MagnitudeGate> magnus_gates_from_magnitudes(const std::vector<int>& magnitudes,
                                                               int mag_dim) {
    std::vector<MagnitudeGate> gates;
    gates.reserve(magnitudes.size());
    int prev = 0;
    for (int m : magnitudes) {
        if (m < 0 || m >= mag_dim) throw std::invalid_argument("magnitude outside the register range");
        gates.push_back(build_cyclic_permutation(mag_dim, mod_floor(m - prev, mag_dim)));
        prev = m;
    }
    return gates;
}

// A magnitude plan: where the announced move sizes come from.  Finite
// sequences repeat when a walk runs longer than their length.
class MagnusPlan {
public:
    enum class Kind { explicit_list, ruler, constant, random };

    static MagnusPlan explicit_list(std::vector<int> magnitudes) {
        if (magnitudes.empty()) throw std::invalid_argument("magnitude list must not be empty");
        return MagnusPlan(Kind::explicit_list, std::move(magnitudes), 0);
    }

    static MagnusPlan ruler(int n) { return MagnusPlan(Kind::ruler, ruler_sequence(n), 0); }

    static MagnusPlan constant(int magnitude) { return MagnusPlan(Kind::constant, {}, magnitude); }

    static MagnusPlan seeded_random(uint64_t seed, int length, const std::vector<int>& allowed) {
        if (length < 1 || allowed.empty()) throw std::invalid_argument("empty random plan");
        std::mt19937_64 rng(seed);
        std::vector<int> seq(length);
        for (int& m : seq) m = allowed[rng() % allowed.size()];
        return MagnusPlan(Kind::random, std::move(seq), 0);
    }

    Kind kind() const { return kind_; }

    // step is 1-based.
    int magnitude_at(int step) const {
        if (step < 1) throw std::invalid_argument("steps are numbered from 1");
        if (kind_ == Kind::constant) return constant_;
        return seq_[(step - 1) % seq_.size()];
    }

    // Gate realizing this step's announcement, given the previous one.
    MagnitudeGate gate_at(int step, int mag_dim) const {
        int m = checked_magnitude(step, mag_dim);
        int prev = (step == 1) ? 0 : checked_magnitude(step - 1, mag_dim);
        return build_cyclic_permutation(mag_dim, mod_floor(m - prev, mag_dim));
    }

private:
    MagnusPlan(Kind kind, std::vector<int> seq, int constant)
        : kind_(kind), seq_(std::move(seq)), constant_(constant) {}

    int checked_magnitude(int step, int mag_dim) const {
        int m = magnitude_at(step);
        if (m < 1 || m >= mag_dim) throw std::invalid_argument("plan magnitude outside 1..floor(n/2)");
        return m;
    }

    Kind kind_;
    std::vector<int> seq_;
    int constant_;
};

// ---------------------------------------------------------------------------
// Restricted position classes

// Arithmetic progression of positions Derek defends: {x = anchor (mod
// modulus)}, optionally minus the coarser progression {x = anchor (mod
// excluded_modulus)} that stays reachable.
struct RestrictedSet {
    int n = 0;
    int modulus = 1;
    int anchor = 0;
    std::optional<int> excluded_modulus;

    bool contains(int x) const {
        if (mod_floor(x - anchor, modulus) != 0) return false;
        if (excluded_modulus && mod_floor(x - anchor, *excluded_modulus) == 0) return false;
        return true;
    }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int x = 0; x < n; ++x)
            if (contains(x)) out.push_back(x);
        return out;
    }

    bool operator==(const RestrictedSet&) const = default;
};

// Class committed by the no-position-control defense once Magnus first
// announces a magnitude m with pq not dividing m.  Multiples of p force the
// modulus to q; otherwise the modulus is p.  The progression is anchored at
// the start, minus the mod-pq sublattice through it (those stay reachable).
inline RestrictedSet choose_restricted_set(int m, int p, int q, int start, int n) {
    if (p < 3 || q <= p || !is_prime(p) || !is_prime(q)) throw std::invalid_argument("need odd primes p < q");
    if (n % (p * q) != 0) throw std::invalid_argument("pq must divide n");
    if (m % (p * q) == 0) throw std::invalid_argument("magnitude divisible by pq commits nothing");
    int modulus = (m % p == 0) ? q : p;
    return RestrictedSet{n, modulus, mod_floor(start, n), p * q};
}

// ---------------------------------------------------------------------------
// Derek

// Direction that keeps the token's offset off the residue c (mod Q).  The
// offset r must itself be off c; since Q is odd at most one direction fails.
inline int greedy_direction(int Q, int c, int r, int m) {
    if (Q < 3 || Q % 2 == 0) throw std::invalid_argument("modulus must be odd and at least 3");
    int cc = mod_floor(c, Q);
    if (mod_floor(r, Q) == cc) throw std::invalid_argument("offset already lies on the protected class");
    return (mod_floor(r + m, Q) != cc) ? 0 : 1;
}

// Coin for the parity strategy: Hadamard on odd steps, identity on even.
inline CoinOp derek_strategy1(int step) {
    if (step < 1) throw std::invalid_argument("steps are numbered from 1");
    return (step % 2 == 1) ? CoinOp::hadamard() : CoinOp::identity();
}

// Single Hadamard up front, identity ever after.
inline CoinOp derek_single_hadamard(int step) {
    if (step < 1) throw std::invalid_argument("steps are numbered from 1");
    return (step == 1) ? CoinOp::hadamard() : CoinOp::identity();
}

class DerekResponder {
public:
    virtual ~DerekResponder() = default;

    // Called once per step with the step number (1-based), the magnitude
    // Magnus announced for this step, and all announcements so far
    // (current one included).
    virtual CoinAction next(int step, int magnitude, const std::vector<int>& history) = 0;

    virtual std::string name() const = 0;

    // Residue class this responder defends, once it has committed to one.
    virtual std::optional<RestrictedSet> restricted_set() const { return std::nullopt; }
};

class IdentityDerek final : public DerekResponder {
public:
    CoinAction next(int, int, const std::vector<int>&) override { return CoinOp::identity(); }
    std::string name() const override { return "identity"; }
};

class Strategy1Derek final : public DerekResponder {
public:
    CoinAction next(int step, int, const std::vector<int>&) override { return derek_strategy1(step); }
    std::string name() const override { return "strategy1"; }
};

class SingleHadamardDerek final : public DerekResponder {
public:
    CoinAction next(int step, int, const std::vector<int>&) override { return derek_single_hadamard(step); }
    std::string name() const override { return "single_h"; }
};

// Purely classical defense lifted to the walk: the token stays a basis
// state, the coin register remembers the previous direction, and each step
// emits I or NOT to realize the greedy direction choice.
class ClassicalGreedyDerek final : public DerekResponder {
public:
    ClassicalGreedyDerek(int n, int p, int c, int start)
        : n_(n), p_(p), c_(mod_floor(c, p)), start_(start) {
        if (p < 3 || !is_prime(p) || n % p != 0) throw std::invalid_argument("p must be an odd prime divisor of n");
        if (c_ == 0) throw std::invalid_argument("protected offset must be nonzero mod p");
        if (start < 0 || start >= n) throw std::out_of_range("start position outside the cycle");
    }

    CoinAction next(int, int magnitude, const std::vector<int>&) override {
        int d = greedy_direction(p_, c_, offset_, magnitude);
        CoinAction act = (d == dir_) ? CoinAction(CoinOp::identity()) : CoinAction(CoinOp::not_gate());
        offset_ = mod_floor(offset_ + (d == 0 ? magnitude : -magnitude), n_);
        dir_ = d;
        return act;
    }

    std::string name() const override { return "classical_greedy"; }

    std::optional<RestrictedSet> restricted_set() const override {
        return RestrictedSet{n_, p_, mod_floor(start_ + c_, n_), std::nullopt};
    }

private:
    int n_, p_, c_, start_;
    int offset_ = 0;
    int dir_ = 0;
};

struct BranchTracker {
    int offset = 0;
    bool committed = false;
    int modulus = 0;
};

// Defense without position control for n = pqm: one Hadamard splits the
// walk into a symmetric branch pair at start +/- a, and from then on a
// global I or NOT per step keeps a off 0 (mod Q), so the committed residue
// class never sees amplitude.  The tracked offset is signed: a is where the
// coin-0 branch sits relative to start, so I adds m while NOT swaps the coin
// labels and leaves the pair at start +/- (a - m), i.e. a becomes m - a.
class Strategy2Derek final : public DerekResponder {
public:
    Strategy2Derek(int p, int q, int start, int n) : p_(p), q_(q), start_(start), n_(n) {
        if (p < 3 || q <= p || !is_prime(p) || !is_prime(q)) throw std::invalid_argument("need odd primes p < q");
        if (n % (p * q) != 0) throw std::invalid_argument("pq must divide n");
        if (start < 0 || start >= n) throw std::out_of_range("start position outside the cycle");
    }

    CoinAction next(int step, int magnitude, const std::vector<int>&) override {
        if (magnitude < 1 || magnitude > n_ / 2) throw std::invalid_argument("announced magnitude outside 1..floor(n/2)");
        if (step == 1) {
            offset_ = magnitude;
            if (magnitude % (p_ * q_) != 0) set_ = choose_restricted_set(magnitude, p_, q_, start_, n_);
            return CoinOp::hadamard();
        }
        if (!set_) {
            if (magnitude % (p_ * q_) == 0) {
                offset_ = mod_floor(offset_ + magnitude, n_);
                return CoinOp::identity();
            }
            set_ = choose_restricted_set(magnitude, p_, q_, start_, n_);
        }
        int Q = set_->modulus;
        if (mod_floor(offset_ + magnitude, Q) != 0) {
            offset_ = mod_floor(offset_ + magnitude, n_);
            return CoinOp::identity();
        }
        offset_ = mod_floor(magnitude - offset_, n_);
        return CoinOp::not_gate();
    }

    std::string name() const override { return "strategy2"; }

    std::optional<RestrictedSet> restricted_set() const override { return set_; }

    BranchTracker tracker() const { return {offset_, set_.has_value(), set_ ? set_->modulus : 0}; }

private:
    int p_, q_, start_, n_;
    int offset_ = 0;
    std::optional<RestrictedSet> set_;
};

// Derek's classical bookkeeping of the walk: per position, the real coin
// amplitude pair.  Valid while both players use real gates and Magnus's
// gates are announced permutations, which holds for every plan here.
struct ShadowState {
    std::map<int, std::array<double, 2>> branches;
};

// Position-controlled defense for n = pm with p > 3 the least prime
// divisor.  After the opening Hadamard, every occupied position gets its
// own coin from {I, NOT, H, NOT*H}, chosen so that no amplitude ever
// reaches the committed residue class, amplitudes meeting at a position
// always have equal magnitude, and no position off the start regains the
// whole mass.  Steps in hadamard_steps additionally split single branches
// to spread the distribution.
class Strategy3Derek final : public DerekResponder {
public:
    Strategy3Derek(int p, int start, std::set<int> hadamard_steps, int n)
        : p_(p), start_(start), hadamard_steps_(std::move(hadamard_steps)), n_(n) {
        if (p <= 3 || !is_prime(p) || n % p != 0) throw std::invalid_argument("p must be a prime divisor of n with p > 3");
        if (start < 0 || start >= n) throw std::out_of_range("start position outside the cycle");
        if (!hadamard_steps_.count(1)) throw std::invalid_argument("hadamard steps must include step 1");
        if (*hadamard_steps_.begin() < 1) throw std::invalid_argument("steps are numbered from 1");
        shadow_.branches[start] = {1.0, 0.0};
    }

    CoinAction next(int step, int magnitude, const std::vector<int>&) override {
        if (magnitude < 1 || magnitude > n_ / 2) throw std::invalid_argument("announced magnitude outside 1..floor(n/2)");
        if (!set_) {
            if (step == 1) {
                if (n_ % 2 == 1 || magnitude != n_ / 2) commit(magnitude);
                std::map<int, CoinOp> ops;
                for (const auto& [pos, pair] : shadow_.branches) ops.emplace(pos, CoinOp::hadamard());
                advance_shadow(ops, magnitude);
                return CoinOp::hadamard();
            }
            if (n_ % 2 == 0 && magnitude == n_ / 2) {
                advance_shadow({}, magnitude);
                return CoinOp::identity();
            }
            commit(magnitude);
        }
        std::map<int, CoinOp> ops = plan_step(step, magnitude);
        advance_shadow(ops, magnitude);
        PositionControlledCoin ctrl;
        ctrl.per_position = std::move(ops);
        return ctrl;
    }

    std::string name() const override { return "strategy3"; }

    std::optional<RestrictedSet> restricted_set() const override { return set_; }

    const ShadowState& shadow() const { return shadow_; }

private:
    static constexpr double occupied_tol = 1e-9;
    static constexpr double prune_tol = 1e-12;

    // Commit the defended class at the first effective step: the smallest
    // offset from the start whose mod-p progression misses every currently
    // occupied position and everywhere this step's move could land.
    void commit(int magnitude) {
        std::set<int> forbidden;
        for (const auto& [pos, pair] : shadow_.branches) {
            forbidden.insert(mod_floor(pos, p_));
            forbidden.insert(mod_floor(pos + magnitude, p_));
            forbidden.insert(mod_floor(pos - magnitude, p_));
        }
        for (int o = 1; o < p_; ++o) {
            if (!forbidden.count(mod_floor(start_ + o, p_))) {
                set_ = RestrictedSet{n_, p_, mod_floor(start_ + o, n_), std::nullopt};
                return;
            }
        }
        throw std::runtime_error("no residue class clear of the occupied positions");
    }

    struct Candidate {
        CoinOp op;
        std::array<double, 2> post;  // coin components after the op
    };

    static std::array<double, 2> apply_real(const CoinOp& op, const std::array<double, 2>& a) {
        auto [b0, b1] = op.apply(a[0], a[1]);
        return {b0.real(), b1.real()};
    }

    std::vector<Candidate> candidates(int step, const std::array<double, 2>& a) const {
        bool occ0 = std::abs(a[0]) > occupied_tol;
        bool occ1 = std::abs(a[1]) > occupied_tol;
        CoinOp id = CoinOp::identity();
        CoinOp nt = CoinOp::not_gate();
        CoinOp h = CoinOp::hadamard();
        CoinOp nh = nt.compose(h);
        std::vector<Candidate> out;
        if (occ0 && occ1) {
            std::array<double, 2> merged = apply_real(h, a);
            double peak = std::max(std::abs(merged[0]), std::abs(merged[1]));
            bool full = peak * peak >= 1.0 - 1e-9;
            Candidate keep{id, a};
            Candidate merge{h, merged};
            Candidate merge_flip{nh, {merged[1], merged[0]}};
            if (full) {
                out = {keep, merge, merge_flip};
            } else {
                out = {merge, merge_flip, keep};
            }
        } else {
            Candidate keep{id, a};
            Candidate flip{nt, {a[1], a[0]}};
            if (hadamard_steps_.count(step)) out.push_back({h, apply_real(h, a)});
            out.push_back(keep);
            out.push_back(flip);
        }
        return out;
    }

    struct PlannedTargets {
        std::map<int, std::array<double, 2>> amps;
    };

    // Try to add one source's outgoing components to the target layout.
    // Fails when a component would land on the defended class, meet a
    // component of a different magnitude, or assemble certainty somewhere.
    bool place(int pos, int magnitude, const std::array<double, 2>& post, PlannedTargets& t) const {
        for (int coin = 0; coin < 2; ++coin) {
            double amp = post[coin];
            if (std::abs(amp) <= occupied_tol) continue;
            int land = mod_floor(pos + (coin == 0 ? magnitude : -magnitude), n_);
            if (set_->contains(land)) return false;
            std::array<double, 2>& slot = t.amps[land];
            if (std::abs(slot[coin]) > occupied_tol) return false;
            double cross = slot[1 - coin];
            if (std::abs(cross) > occupied_tol) {
                if (std::abs(std::abs(cross) - std::abs(amp)) > occupied_tol) return false;
                if (cross * cross + amp * amp >= 1.0 - 1e-9) return false;
            } else if (amp * amp >= 1.0 - 1e-9) {
                return false;
            }
            slot[coin] += amp;
        }
        return true;
    }

    bool search(size_t i, const std::vector<std::pair<int, std::array<double, 2>>>& sources, int step,
                int magnitude, const PlannedTargets& targets, std::vector<CoinOp>& chosen,
                long long& budget) const {
        if (i == sources.size()) return true;
        for (const Candidate& cand : candidates(step, sources[i].second)) {
            if (--budget < 0) throw std::runtime_error("per-position coin search exceeded its budget");
            PlannedTargets next = targets;
            if (!place(sources[i].first, magnitude, cand.post, next)) continue;
            chosen[i] = cand.op;
            if (search(i + 1, sources, step, magnitude, next, chosen, budget)) return true;
        }
        return false;
    }

    std::map<int, CoinOp> plan_step(int step, int magnitude) {
        std::vector<std::pair<int, std::array<double, 2>>> sources;
        for (const auto& [pos, pair] : shadow_.branches)
            if (std::abs(pair[0]) > occupied_tol || std::abs(pair[1]) > occupied_tol)
                sources.emplace_back(pos, pair);
        std::vector<CoinOp> chosen(sources.size());
        long long budget = 1 << 22;
        PlannedTargets targets;
        if (!search(0, sources, step, magnitude, targets, chosen, budget))
            throw std::runtime_error("no coin assignment keeps the defended class clear");
        std::map<int, CoinOp> ops;
        for (size_t i = 0; i < sources.size(); ++i) ops.emplace(sources[i].first, chosen[i]);
        return ops;
    }

    void advance_shadow(const std::map<int, CoinOp>& ops, int magnitude) {
        std::map<int, std::array<double, 2>> next;
        for (const auto& [pos, pair] : shadow_.branches) {
            auto it = ops.find(pos);
            std::array<double, 2> b = (it != ops.end()) ? apply_real(it->second, pair) : pair;
            if (std::abs(b[0]) > prune_tol) next[mod_floor(pos + magnitude, n_)][0] += b[0];
            if (std::abs(b[1]) > prune_tol) next[mod_floor(pos - magnitude, n_)][1] += b[1];
        }
        for (auto it = next.begin(); it != next.end();) {
            auto& [a0, a1] = it->second;
            if (std::abs(a0) <= prune_tol) a0 = 0.0;
            if (std::abs(a1) <= prune_tol) a1 = 0.0;
            it = (a0 == 0.0 && a1 == 0.0) ? next.erase(it) : std::next(it);
        }
        shadow_.branches = std::move(next);
    }

    int p_, start_;
    std::set<int> hadamard_steps_;
    int n_;
    std::optional<RestrictedSet> set_;
    ShadowState shadow_;
};

// Plain function strategies wrapped for walk drivers.
inline std::unique_ptr<DerekResponder> make_identity_derek() { return std::make_unique<IdentityDerek>(); }
inline std::unique_ptr<DerekResponder> make_strategy1_derek() { return std::make_unique<Strategy1Derek>(); }
inline std::unique_ptr<DerekResponder> make_single_hadamard_derek() { return std::make_unique<SingleHadamardDerek>(); }
inline std::unique_ptr<DerekResponder> derek_strategy2(int p, int q, int start, int n) {
    return std::make_unique<Strategy2Derek>(p, q, start, n);
}
inline std::unique_ptr<DerekResponder> derek_strategy3(int p, int start, std::set<int> hadamard_steps, int n) {
    return std::make_unique<Strategy3Derek>(p, start, std::move(hadamard_steps), n);
}
inline std::unique_ptr<DerekResponder> derek_classical_greedy(int n, int p, int c, int start) {
    return std::make_unique<ClassicalGreedyDerek>(n, p, c, start);
}

}  // namespace qmd

#pragma once

#include <array>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <variant>

#include "qmd/linalg.hpp"

// Discrete-time quantum walk on an n-cycle with three registers:
// a magnitude register |m> (how far the token moves this step), a
// two-level direction coin |d> (0 = forward, 1 = backward) and the
// position register |x>.  One player drives the magnitude register,
// the other drives the coin; the shift below moves the token.

namespace qmd {

struct GameDims {
    int n = 0;        // cycle size
    int mag_dim = 0;  // floor(n/2) + 1, so basis |j> encodes magnitude j directly
    int total = 0;

    static constexpr int coin_dim = 2;

    GameDims() = default;

    explicit GameDims(int n_) : n(n_) {
        if (n < 2) throw std::invalid_argument("cycle size must be at least 2");
        mag_dim = n / 2 + 1;
        total = mag_dim * coin_dim * n;
    }

    // Amplitude layout: index = m * (2n) + d * n + x.
    int index(int m, int d, int x) const { return (m * coin_dim + d) * n + x; }

    bool operator==(const GameDims&) const = default;
};

struct QState {
    GameDims dims;
    std::vector<cplx> amp;

    double norm() const {
        double s = 0.0;
        for (const cplx& a : amp) s += std::norm(a);
        return std::sqrt(s);
    }
};

// |0, 0, start>: magnitude register cleared, coin forward, token at start.
inline QState new_state(const GameDims& dims, int start) {
    if (start < 0 || start >= dims.n) throw std::out_of_range("start position outside the cycle");
    QState s{dims, std::vector<cplx>(dims.total)};
    s.amp[dims.index(0, 0, start)] = 1.0;
    return s;
}

// 2x2 unitary acting on the direction coin.
class CoinOp {
public:
    CoinOp() : m_{1.0, 0.0, 0.0, 1.0} {}

    static CoinOp identity() { return CoinOp(); }

    static CoinOp not_gate() { return CoinOp({0.0, 1.0, 1.0, 0.0}, true); }

    static CoinOp hadamard() {
        const double s = 1.0 / std::sqrt(2.0);
        return CoinOp({s, s, s, -s}, true);
    }

    static CoinOp from_matrix(cplx a, cplx b, cplx c, cplx d) { return CoinOp({a, b, c, d}, false); }

    cplx at(int r, int c) const { return m_[static_cast<size_t>(r) * 2 + c]; }

    std::pair<cplx, cplx> apply(cplx a0, cplx a1) const {
        return {m_[0] * a0 + m_[1] * a1, m_[2] * a0 + m_[3] * a1};
    }

    // this * rhs, i.e. "rhs first, then this".
    CoinOp compose(const CoinOp& rhs) const {
        return CoinOp({m_[0] * rhs.m_[0] + m_[1] * rhs.m_[2], m_[0] * rhs.m_[1] + m_[1] * rhs.m_[3],
                       m_[2] * rhs.m_[0] + m_[3] * rhs.m_[2], m_[2] * rhs.m_[1] + m_[3] * rhs.m_[3]},
                      true);
    }

    double distance_to(const CoinOp& rhs) const {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(m_[i] - rhs.m_[i]));
        return worst;
    }

private:
    CoinOp(std::array<cplx, 4> m, bool trusted) : m_(m) {
        if (trusted) return;
        double d00 = std::norm(m_[0]) + std::norm(m_[2]);
        double d11 = std::norm(m_[1]) + std::norm(m_[3]);
        cplx off = std::conj(m_[0]) * m_[1] + std::conj(m_[2]) * m_[3];
        if (std::abs(d00 - 1.0) > unitary_tol || std::abs(d11 - 1.0) > unitary_tol ||
            std::abs(off) > unitary_tol)
            throw std::invalid_argument("coin operator is not unitary");
    }

    std::array<cplx, 4> m_;
};

// Unitary on the magnitude register.  Permutation gates (the only kind the
// strategy catalog emits) keep a fast index form alongside the dense matrix.
class MagnitudeGate {
public:
    explicit MagnitudeGate(SquareMatrix matrix)
        : matrix_(std::move(matrix)), perm_(matrix_.as_permutation()) {
        if (!matrix_.is_unitary()) throw std::invalid_argument("magnitude gate is not unitary");
    }

    int dim() const { return matrix_.dim(); }
    const SquareMatrix& matrix() const { return matrix_; }
    const std::vector<int>& permutation() const { return perm_; }

private:
    SquareMatrix matrix_;
    std::vector<int> perm_;
};

// |j> -> |(j + shift) mod dim>.
inline MagnitudeGate build_cyclic_permutation(int dim, int shift) {
    return MagnitudeGate(SquareMatrix::cyclic_shift(dim, shift));
}

// Coin unitaries selected per position; positions not listed act as identity.
struct PositionControlledCoin {
    std::map<int, CoinOp> per_position;
};

using CoinAction = std::variant<CoinOp, PositionControlledCoin>;

inline QState apply_magnitude_gate(const QState& s, const MagnitudeGate& g) {
    const GameDims& dims = s.dims;
    if (g.dim() != dims.mag_dim) throw std::invalid_argument("magnitude gate dimension mismatch");
    QState out{dims, std::vector<cplx>(dims.total)};
    const std::vector<int>& perm = g.permutation();
    if (!perm.empty()) {
        for (int m = 0; m < dims.mag_dim; ++m) {
            int src = m * 2 * dims.n;
            int dst = perm[m] * 2 * dims.n;
            for (int k = 0; k < 2 * dims.n; ++k) out.amp[dst + k] = s.amp[src + k];
        }
        return out;
    }
    const SquareMatrix& u = g.matrix();
    for (int d = 0; d < 2; ++d)
        for (int x = 0; x < dims.n; ++x)
            for (int r = 0; r < dims.mag_dim; ++r) {
                cplx acc = 0.0;
                for (int c = 0; c < dims.mag_dim; ++c) acc += u.at(r, c) * s.amp[dims.index(c, d, x)];
                out.amp[dims.index(r, d, x)] = acc;
            }
    return out;
}

inline QState apply_coin(const QState& s, const CoinOp& op) {
    const GameDims& dims = s.dims;
    QState out{dims, std::vector<cplx>(dims.total)};
    for (int m = 0; m < dims.mag_dim; ++m)
        for (int x = 0; x < dims.n; ++x) {
            int i0 = dims.index(m, 0, x);
            int i1 = dims.index(m, 1, x);
            auto [b0, b1] = op.apply(s.amp[i0], s.amp[i1]);
            out.amp[i0] = b0;
            out.amp[i1] = b1;
        }
    return out;
}

inline QState apply_controlled_coin(const QState& s, const PositionControlledCoin& ctrl) {
    const GameDims& dims = s.dims;
    for (const auto& [x, op] : ctrl.per_position)
        if (x < 0 || x >= dims.n) throw std::out_of_range("controlled coin position outside the cycle");
    QState out = s;
    for (const auto& [x, op] : ctrl.per_position)
        for (int m = 0; m < dims.mag_dim; ++m) {
            int i0 = dims.index(m, 0, x);
            int i1 = dims.index(m, 1, x);
            auto [b0, b1] = op.apply(s.amp[i0], s.amp[i1]);
            out.amp[i0] = b0;
            out.amp[i1] = b1;
        }
    return out;
}

// Conditional shift: forward coin moves the token +m, backward coin -m.
inline QState apply_shift(const QState& s) {
    const GameDims& dims = s.dims;
    QState out{dims, std::vector<cplx>(dims.total)};
    for (int m = 0; m < dims.mag_dim; ++m)
        for (int x = 0; x < dims.n; ++x) {
            out.amp[dims.index(m, 0, (x + m) % dims.n)] = s.amp[dims.index(m, 0, x)];
            out.amp[dims.index(m, 1, mod_floor(x - m, dims.n))] = s.amp[dims.index(m, 1, x)];
        }
    return out;
}

// One full round: magnitude gate, then the coin, then the shift.
inline QState step(const QState& s, const MagnitudeGate& g, const CoinAction& coin) {
    QState mid = apply_magnitude_gate(s, g);
    if (const CoinOp* global = std::get_if<CoinOp>(&coin))
        mid = apply_coin(mid, *global);
    else
        mid = apply_controlled_coin(mid, std::get<PositionControlledCoin>(coin));
    return apply_shift(mid);
}

// Probability of finding the token at each position (sums to the squared norm).
inline std::vector<double> position_marginal(const QState& s) {
    const GameDims& dims = s.dims;
    std::vector<double> p(dims.n, 0.0);
    for (int m = 0; m < dims.mag_dim; ++m)
        for (int d = 0; d < 2; ++d)
            for (int x = 0; x < dims.n; ++x) p[x] += std::norm(s.amp[dims.index(m, d, x)]);
    return p;
}

// Classical one-step move operator on positions alone: |x> -> |x +/- m mod n>.
inline SquareMatrix build_classical_move_operator(int n, int m, int d) {
    if (n < 2) throw std::invalid_argument("cycle size must be at least 2");
    if (m < 0 || m > n / 2) throw std::invalid_argument("magnitude outside 0..floor(n/2)");
    if (d != 0 && d != 1) throw std::invalid_argument("direction must be 0 or 1");
    SquareMatrix out(n);
    for (int x = 0; x < n; ++x) out.at(mod_floor(x + (d == 0 ? m : -m), n), x) = 1.0;
    return out;
}

inline std::string describe_coin(const CoinOp& op) {
    if (op.distance_to(CoinOp::identity()) <= unitary_tol) return "I";
    if (op.distance_to(CoinOp::not_gate()) <= unitary_tol) return "NOT";
    if (op.distance_to(CoinOp::hadamard()) <= unitary_tol) return "H";
    if (op.distance_to(CoinOp::not_gate().compose(CoinOp::hadamard())) <= unitary_tol) return "NOT*H";
    return "U2";
}

inline std::string describe_action(const CoinAction& action) {
    if (const CoinOp* global = std::get_if<CoinOp>(&action)) return describe_coin(*global);
    const auto& ctrl = std::get<PositionControlledCoin>(action);
    std::string out = "pc{";
    bool first = true;
    for (const auto& [x, op] : ctrl.per_position) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(x) + ":" + describe_coin(op);
    }
    out += "}";
    return out;
}

}  // namespace qmd

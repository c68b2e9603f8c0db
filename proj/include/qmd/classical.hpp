#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmd/linalg.hpp"

// Classical Magnus-Derek game on an n-cycle: Magnus announces a move
// magnitude, Derek picks the direction, and the token walks the cycle.
// Magnus wants to maximize the number of distinct positions the token
// occupies, Derek wants to minimize it.

namespace qmd::classical {

inline std::optional<int> smallest_odd_prime_factor(int n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    for (int p = 3; p <= n; p += 2)
        if (n % p == 0) {
            for (int d = 3; d * d <= p; d += 2)
                if (p % d == 0) goto next;
            return p;
        next:;
        }
    return std::nullopt;
}

inline bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Game value under optimal play: n when n is a power of two, otherwise
// (p-1)n/p with p the smallest odd prime factor.
inline int f_star(int n) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (is_power_of_two(n)) return n;
    int p = *smallest_odd_prime_factor(n);
    return (p - 1) * (n / p);
}

// Optimal move count for powers of two: all n positions in n-1 moves.
inline int r_opt_pow2(int n) {
    if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("n must be a power of two >= 2");
    return n - 1;
}

// Move bound within which Magnus can force f*(n) positions for general n.
inline int hurkens_bound(int n) {
    if (n < 3 || is_power_of_two(n)) throw std::invalid_argument("defined for n >= 3, n not a power of two");
    int bits = 0;
    while ((1 << bits) < n - 1) ++bits;
    return f_star(n) * bits;
}

struct ClassicalRun {
    std::vector<int> positions;  // positions[0] = start, one entry per step after
    std::set<int> visited;
};

inline ClassicalRun simulate_classical(int n, int start, std::span<const int> magnitudes,
                                       std::span<const int> directions) {
    if (n < 2) throw std::invalid_argument("cycle size must be at least 2");
    if (start < 0 || start >= n) throw std::out_of_range("start position outside the cycle");
    if (magnitudes.size() != directions.size())
        throw std::invalid_argument("magnitude and direction sequences differ in length");
    ClassicalRun run;
    run.positions.reserve(magnitudes.size() + 1);
    run.positions.push_back(start);
    run.visited.insert(start);
    int pos = start;
    for (size_t i = 0; i < magnitudes.size(); ++i) {
        int m = magnitudes[i];
        int d = directions[i];
        if (m < 0 || m > n / 2) throw std::invalid_argument("magnitude outside 0..floor(n/2)");
        if (d != 0 && d != 1) throw std::invalid_argument("direction must be 0 or 1");
        pos = mod_floor(pos + (d == 0 ? m : -m), n);
        run.positions.push_back(pos);
        run.visited.insert(pos);
    }
    return run;
}

struct GreedyRun {
    std::vector<int> directions;
    ClassicalRun run;
};

// Derek's residue defense: pick directions so the token never enters the
// class {x = c (mod p)}.  Needs the start off that class; one of the two
// directions always stays off it because p is odd.
inline GreedyRun greedy_derek_classical(int n, int p, int c, std::span<const int> magnitudes,
                                        int start = 0) {
    if (n < 2 || p < 3 || n % p != 0) throw std::invalid_argument("p must be an odd prime divisor of n");
    if (mod_floor(start, p) == mod_floor(c, p)) throw std::invalid_argument("start lies on the protected class");
    GreedyRun out;
    out.directions.reserve(magnitudes.size());
    out.run.positions.push_back(start);
    out.run.visited.insert(start);
    int pos = start;
    int cc = mod_floor(c, p);
    for (int m : magnitudes) {
        if (m < 0 || m > n / 2) throw std::invalid_argument("magnitude outside 0..floor(n/2)");
        int d = (mod_floor(pos + m, p) != cc) ? 0 : 1;
        pos = mod_floor(pos + (d == 0 ? m : -m), n);
        out.directions.push_back(d);
        out.run.positions.push_back(pos);
        out.run.visited.insert(pos);
    }
    return out;
}

// Exact game value for small cycles by full minimax over (position, visited
// set, steps left).  Magnus maximizes the final visited count, Derek
// minimizes; both see everything.
inline int minimax_value(int n, int horizon) {
    if (n < 2 || n > 9) throw std::invalid_argument("exact search is limited to 2 <= n <= 9");
    if (horizon < 0 || horizon > 63) throw std::invalid_argument("horizon outside 0..63");

    struct Search {
        int n;
        std::vector<int8_t> memo;  // -1 = unknown

        int key(int pos, uint32_t visited, int left) const {
            return (pos * 512 + static_cast<int>(visited)) * 64 + left;
        }

        int value(int pos, uint32_t visited, int left) {
            int count = std::popcount(visited);
            if (left == 0 || count == n) return count;
            int8_t& slot = memo[key(pos, visited, left)];
            if (slot >= 0) return slot;
            int best = 0;
            for (int m = 1; m <= n / 2; ++m) {
                int worst = n + 1;
                for (int d = 0; d < 2; ++d) {
                    int np = mod_floor(pos + (d == 0 ? m : -m), n);
                    worst = std::min(worst, value(np, visited | (1u << np), left - 1));
                }
                best = std::max(best, worst);
            }
            slot = static_cast<int8_t>(best);
            return best;
        }
    };

    Search s{n, std::vector<int8_t>(static_cast<size_t>(n) * 512 * 64, -1)};
    return s.value(0, 1u, horizon);
}

}  // namespace qmd::classical

#pragma once
/**
 * Geometric last-passage percolation with keyed exponential noise, RSK row
 * insertion, brute-force Greene values, and exact Schur process sampling.
 *
 * Grid convention: cell (i, j) has i the x/column index and j the y/row
 * index, both zero-based in code. NE chains weakly increase in both.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"

namespace aw {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0,1), a pure function of (seed, i, j).
inline double keyed_uniform(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (i * 0xD1B54A32D192ED03ULL));
    h = splitmix64(h ^ (j * 0xABC98388FB8FAC03ULL + 0x8CB92BA72F3D8DD7ULL));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

struct WeightMatrix {
    std::size_t M = 0, N = 0;
    std::vector<int> w;

    WeightMatrix() = default;
    WeightMatrix(std::size_t m, std::size_t n) : M(m), N(n), w(m * n, 0) {}
    int& operator()(std::size_t i, std::size_t j) { return w[i * N + j]; }
    int operator()(std::size_t i, std::size_t j) const { return w[i * N + j]; }
    long total() const {
        long s = 0;
        for (int v : w) s += v;
        return s;
    }
    WeightMatrix transpose() const {
        WeightMatrix t(N, M);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

// Unit-rate exponential variates keyed on (seed, i, j); identical across parameter sets.
struct CoupledNoise {
    std::uint64_t seed = 0;
    std::size_t M = 0, N = 0;
    std::vector<double> fixed;  // explicit grid overriding the keyed stream when nonempty

    CoupledNoise(std::uint64_t s, std::size_t m, std::size_t n) : seed(s), M(m), N(n) {}
    CoupledNoise(std::size_t m, std::size_t n, std::vector<double> z)
        : M(m), N(n), fixed(std::move(z)) {
        require(fixed.size() == m * n, "CoupledNoise: grid size mismatch");
        for (double v : fixed) require(v > 0.0, "CoupledNoise: variates must be positive");
    }
    double uniform(std::size_t i, std::size_t j) const {
        return fixed.empty() ? keyed_uniform(seed, i, j) : std::exp(-fixed[i * N + j]);
    }
    double z(std::size_t i, std::size_t j) const {
        return fixed.empty() ? -std::log(keyed_uniform(seed, i, j)) : fixed[i * N + j];
    }
};

inline int geometric_from_noise(double a, double z) {
    if (a == 0.0) return 0;
    const double b = 1.0 / (-std::log(a));
    return static_cast<int>(std::floor(b * z));
}

inline WeightMatrix sample_weight_matrix(const std::vector<double>& X, const std::vector<double>& Y,
                                         const CoupledNoise& noise) {
    check_products(X, Y);
    require(noise.M >= X.size() && noise.N >= Y.size(), "noise grid smaller than parameter grid");
    WeightMatrix w(X.size(), Y.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < Y.size(); ++j) {
            const double a = X[i] * Y[j];
            if (a == 0.0) continue;
            // floor(z / -log a) >= 1 iff U <= a; the slack keeps the shortcut exact.
            if (noise.fixed.empty() && noise.uniform(i, j) > a * (1.0 + 1e-9)) continue;
            w(i, j) = geometric_from_noise(a, noise.z(i, j));
        }
    }
    return w;
}

using Tableau = std::vector<std::vector<int>>;

struct TableauPair {
    Tableau p, q;
    bool operator==(const TableauPair&) const = default;
};

inline Partition shape_of(const Tableau& t) {
    std::vector<int> rows;
    for (const auto& r : t) rows.push_back(static_cast<int>(r.size()));
    return Partition(rows);
}

// Shape of the entries <= k.
inline Partition sub_shape(const Tableau& t, int k) {
    std::vector<int> rows;
    for (const auto& r : t) {
        const int c = static_cast<int>(std::upper_bound(r.begin(), r.end(), k) - r.begin());
        if (c == 0) break;
        rows.push_back(c);
    }
    return Partition(rows);
}

// Row-inserts v; returns the row index where the bumping path ended.
inline std::size_t row_insert(Tableau& p, int v) {
    for (std::size_t r = 0;; ++r) {
        if (r == p.size()) {
            p.push_back({v});
            return r;
        }
        auto it = std::upper_bound(p[r].begin(), p[r].end(), v);
        if (it == p[r].end()) {
            p[r].push_back(v);
            return r;
        }
        std::swap(*it, v);
    }
}

// Two-line array in lexicographic order on (i, j); P receives j, Q records i (one-based).
inline TableauPair rsk_forward(const WeightMatrix& w) {
    TableauPair t;
    for (std::size_t i = 0; i < w.M; ++i) {
        for (std::size_t j = 0; j < w.N; ++j) {
            for (int c = 0; c < w(i, j); ++c) {
                const std::size_t r = row_insert(t.p, static_cast<int>(j + 1));
                if (r == t.q.size()) t.q.emplace_back();
                t.q[r].push_back(static_cast<int>(i + 1));
            }
        }
    }
    return t;
}

// lambda(m, N) for m = 1..M via P-only insertion, recording the shape after each x-block.
inline std::vector<Partition> row_block_shapes(const WeightMatrix& w) {
    Tableau p;
    std::vector<Partition> out;
    out.reserve(w.M);
    for (std::size_t i = 0; i < w.M; ++i) {
        for (std::size_t j = 0; j < w.N; ++j)
            for (int c = 0; c < w(i, j); ++c) row_insert(p, static_cast<int>(j + 1));
        out.push_back(shape_of(p));
    }
    return out;
}

inline PartitionSequence lpp_profile(const WeightMatrix& w) {
    require(w.M >= 1 && w.N >= 1, "lpp_profile: empty grid");
    const TableauPair t = rsk_forward(w);
    PartitionSequence s;
    s.m_count = w.M;
    s.n_count = w.N;
    for (std::size_t m = 1; m <= w.M; ++m) s.seq.push_back(sub_shape(t.q, static_cast<int>(m)));
    for (std::size_t n = w.N - 1; n >= 1; --n) s.seq.push_back(sub_shape(t.p, static_cast<int>(n)));
    return s;
}

inline PartitionSequence sample_schur_process(const std::vector<double>& X,
                                              const std::vector<double>& Y, std::uint64_t seed) {
    return lpp_profile(sample_weight_matrix(X, Y, CoupledNoise(seed, X.size(), Y.size())));
}

/**
 * Maximal total weight of k vertex-disjoint NE chains inside the m x n corner,
 * by exhaustive search over assignments of support cells to chains. Cells are
 * visited in lexicographic order, so a cell may extend a chain exactly when the
 * chain's last row index is not larger; the state is the multiset of chain tails.
 */
inline long greene_bruteforce(const WeightMatrix& w, std::size_t k, std::size_t m, std::size_t n,
                              std::size_t max_support = 36) {
    require(m <= w.M && n <= w.N, "greene_bruteforce: corner exceeds the grid");
    struct Cell {
        int j;
        long wt;
    };
    std::vector<Cell> cells;
    long total = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (w(i, j) > 0) {
                cells.push_back({static_cast<int>(j), w(i, j)});
                total += w(i, j);
            }
    require(cells.size() <= max_support, "greene_bruteforce: support exceeds the search guard");
    if (k == 0 || cells.empty()) return 0;
    k = std::min(k, std::min(m, n));

    // Tail value -1 marks an unused chain; tails stay sorted ascending.
    const std::uint64_t base = n + 1;
    double states = 1.0;
    for (std::size_t r = 0; r < k; ++r) states *= static_cast<double>(base);
    require(states < 9e18, "greene_bruteforce: state space too large");
    auto encode = [&](const std::vector<int>& tails) {
        std::uint64_t key = 0;
        for (int t : tails) key = key * base + static_cast<std::uint64_t>(t + 1);
        return key;
    };
    std::vector<std::unordered_map<std::uint64_t, long>> memo(cells.size());
    std::vector<int> tails(k, -1);
    auto rec = [&](auto&& self, std::size_t idx) -> long {
        if (idx == cells.size()) return 0;
        const std::uint64_t key = encode(tails);
        if (auto it = memo[idx].find(key); it != memo[idx].end()) return it->second;
        long best = self(self, idx + 1);
        const int j = cells[idx].j;
        for (std::size_t r = 0; r < k; ++r) {
            if (tails[r] > j) break;
            if (r > 0 && tails[r] == tails[r - 1]) continue;
            const std::vector<int> saved = tails;
            tails[r] = j;
            std::sort(tails.begin(), tails.end());
            best = std::max(best, cells[idx].wt + self(self, idx + 1));
            tails = saved;
        }
        memo[idx][key] = best;
        return best;
    };
    const long g = rec(rec, 0);
    return std::min(g, total);
}

// Every partial sum lambda_1 + ... + lambda_k of `big` is at least that of `small`.
inline bool monotone_dominates(const PartitionSequence& big, const PartitionSequence& small) {
    if (big.seq.size() != small.seq.size()) return false;
    for (std::size_t s = 0; s < big.seq.size(); ++s) {
        long a = 0, b = 0;
        const std::size_t len = std::max(big.seq[s].length(), small.seq[s].length());
        for (std::size_t i = 0; i < len; ++i) {
            a += big.seq[s][i];
            b += small.seq[s][i];
            if (a < b) return false;
        }
    }
    return true;
}

}  // namespace aw

#pragma once

// Helpers shared by the test binaries: fixtures and small brute-force oracles.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cutdesign/design.hpp"
#include "cutdesign/error.hpp"
#include "cutdesign/graph.hpp"
#include "cutdesign/int_matrix.hpp"

#ifndef CUTDESIGN_DATA_DIR
#define CUTDESIGN_DATA_DIR "data"
#endif

namespace testing {

// Code of the cutdesign::Error thrown by f, or nullopt when none is thrown.
template <class F>
std::optional<cutdesign::ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const cutdesign::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline std::string data(const std::string& name) { return std::string(CUTDESIGN_DATA_DIR) + "/" + name; }

inline const cutdesign::IntVector& wave_y() {
    static const cutdesign::IntVector y{69, 31, 55, 149, 46, 43, 118, 30, 43, 45, 71, 380, 37, 36, 212, 52};
    return y;
}

inline cutdesign::DesignMatrix wave_design() {
    return cutdesign::design_from_relations(7, cutdesign::parse_relations("ABDE ACDF BCDG"));
}

inline cutdesign::Graph named(const std::vector<std::pair<std::string, cutdesign::Graph>>& list,
                              const std::string& name) {
    for (const auto& [n, g] : list)
        if (n == name) return g;
    return {};
}

// Series-parallel reduction on a multigraph: a graph has no K4 minor iff
// repeatedly deleting loops and parallel copies, vertices of degree <= 1,
// and suppressing degree-2 vertices empties it.
inline bool k4_free_by_reduction(const cutdesign::Graph& g) {
    std::multiset<std::pair<int, int>> e;
    for (auto [u, v] : g.edges()) e.insert({u, v});
    std::set<int> alive;
    for (int v = 1; v <= g.n_vertices(); ++v) alive.insert(v);
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<std::pair<int, int>> uniq(e.begin(), e.end());
        if (uniq.size() != e.size()) {
            e = std::multiset<std::pair<int, int>>(uniq.begin(), uniq.end());
            changed = true;
        }
        for (int v : std::vector<int>(alive.begin(), alive.end())) {
            std::vector<std::pair<int, int>> inc;
            for (auto& x : e)
                if (x.first == v || x.second == v) inc.push_back(x);
            if (inc.size() <= 1) {
                for (auto& x : inc) e.erase(e.find(x));
                alive.erase(v);
                changed = true;
            } else if (inc.size() == 2) {
                const int a = inc[0].first == v ? inc[0].second : inc[0].first;
                const int b = inc[1].first == v ? inc[1].second : inc[1].first;
                for (auto& x : inc) e.erase(e.find(x));
                alive.erase(v);
                if (a != b) e.insert({std::min(a, b), std::max(a, b)});
                changed = true;
            }
        }
    }
    return e.empty();
}

// Rows as a sorted multiset, for comparisons up to run order.
inline std::vector<std::vector<std::int64_t>> sorted_rows(const cutdesign::IntMatrix& m) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out.emplace_back(r.begin(), r.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline cutdesign::IntMatrix from_sorted(const std::vector<std::vector<std::int64_t>>& rows) {
    return cutdesign::IntMatrix::from_rows(rows);
}

// All y >= 0 of the given total with M'y = target, by brute force.
inline std::vector<cutdesign::IntVector> brute_fiber(const cutdesign::IntMatrix& m, const cutdesign::IntVector& y0) {
    std::int64_t total = 0;
    for (auto v : y0) total += v;
    const auto target = cutdesign::left_multiply(m, y0);
    std::vector<cutdesign::IntVector> out;
    cutdesign::IntVector y(m.rows(), 0);
    auto rec = [&](auto&& self, std::size_t i, std::int64_t rest) -> void {
        if (i + 1 == y.size()) {
            y[i] = rest;
            if (cutdesign::left_multiply(m, y) == target) out.push_back(y);
            return;
        }
        for (std::int64_t v = 0; v <= rest; ++v) {
            y[i] = v;
            self(self, i + 1, rest - v);
        }
    };
    rec(rec, 0, total);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testing

#include "cutdesign/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include <Eigen/Dense>

#include "cutdesign/error.hpp"

namespace cutdesign {

int move_degree(const Move& z) {
    std::int64_t pos = 0;
    for (auto v : z)
        if (v > 0) pos += v;
    return static_cast<int>(pos);
}

Move normalize_move(Move z) {
    auto first = std::find_if(z.begin(), z.end(), [](std::int64_t v) { return v != 0; });
    if (first != z.end() && *first < 0)
        for (auto& v : z) v = -v;
    return z;
}

int MarkovBasis::max_degree() const {
    int d = 0;
    for (const auto& z : moves) d = std::max(d, move_degree(z));
    return d;
}

IntMatrix MarkovBasis::as_matrix(std::size_t k) const {
    IntMatrix out(moves.size(), k);
    for (std::size_t i = 0; i < moves.size(); ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) = moves[i][j];
    return out;
}

std::vector<IntVector> integer_kernel_basis(const IntMatrix& m) { return left_kernel(m).basis; }

namespace {

void require_homogeneous(const std::vector<IntVector>& kernel) {
    for (const auto& z : kernel)
        if (std::accumulate(z.begin(), z.end(), std::int64_t{0}) != 0)
            throw Error(ErrorCode::InvalidInput, "configuration does not fix the total count");
}

void check_moves(const IntMatrix& m, const std::vector<Move>& moves) {
    for (const auto& z : moves) {
        if (z.size() != m.rows()) throw Error(ErrorCode::ShapeMismatch, "move length differs from run count");
        if (!is_in_left_kernel(m, z)) throw Error(ErrorCode::InvalidMove, "move is not in the kernel");
    }
}

}  // namespace

Fiber enumerate_fiber(const IntMatrix& m, const IntVector& y0, std::size_t cap) {
    const std::size_t k = m.rows(), c = m.cols();
    if (y0.size() != k) throw Error(ErrorCode::ShapeMismatch, "observation length differs from run count");
    for (auto v : y0)
        if (v < 0) throw Error(ErrorCode::InvalidInput, "observations must be nonnegative");
    require_homogeneous(integer_kernel_basis(m));

    Fiber fiber;
    fiber.target = left_multiply(m, y0);
    const std::int64_t total = std::accumulate(y0.begin(), y0.end(), std::int64_t{0});
    if (k == 0) return fiber;

    // Pivot runs P (independent rows of M) are determined by the free runs F:
    // y_P = c0 - A y_F, with A and c0 from an r x r nonsingular block S.
    std::vector<std::size_t> pivots, free_runs, cols;
    for (std::size_t i = k; i-- > 0;) {
        std::vector<std::size_t> trial = pivots;
        trial.push_back(i);
        IntMatrix sub(trial.size(), c);
        for (std::size_t a = 0; a < trial.size(); ++a)
            for (std::size_t j = 0; j < c; ++j) sub(a, j) = m(trial[a], j);
        if (integer_rank(sub) == trial.size()) pivots = std::move(trial);
    }
    for (std::size_t i = 0; i < k; ++i)
        if (std::find(pivots.begin(), pivots.end(), i) == pivots.end()) free_runs.push_back(i);
    const std::size_t r = pivots.size(), nf = free_runs.size();
    for (std::size_t j = 0; j < c && cols.size() < r; ++j) {
        IntMatrix sub(r, cols.size() + 1);
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = 0; b < cols.size(); ++b) sub(a, b) = m(pivots[a], cols[b]);
            sub(a, cols.size()) = m(pivots[a], j);
        }
        if (integer_rank(sub) == cols.size() + 1) cols.push_back(j);
    }

    Eigen::MatrixXd st(r, r), mf(r, nf);
    Eigen::VectorXd bq(r);
    for (std::size_t b = 0; b < r; ++b) {
        for (std::size_t a = 0; a < r; ++a) st(b, a) = static_cast<double>(m(pivots[a], cols[b]));
        for (std::size_t f = 0; f < nf; ++f) mf(b, f) = static_cast<double>(m(free_runs[f], cols[b]));
        bq(b) = static_cast<double>(fiber.target[cols[b]]);
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(st);
    const Eigen::VectorXd c0 = lu.solve(bq);
    const Eigen::MatrixXd a = lu.solve(mf);

    // slack[f][p]: largest increase of y_P[p] per unit placed on runs f..nf-1.
    std::vector<double> slack((nf + 1) * r, 0.0);
    for (std::size_t f = nf; f-- > 0;)
        for (std::size_t p = 0; p < r; ++p) slack[f * r + p] = std::max(slack[(f + 1) * r + p], -a(p, f));

    constexpr double eps = 1e-7;
    IntVector y(k, 0);
    std::vector<double> cur(c0.data(), c0.data() + r);
    const std::size_t budget = 16 * cap + 1000000;
    std::size_t nodes = 0;
    auto dfs = [&](auto&& self, std::size_t f, std::int64_t rest) -> void {
        if (++nodes > budget)
            throw Error(ErrorCode::FiberTooLarge, "fiber search exceeds its budget for cap " + std::to_string(cap));
        if (f == nf) {
            for (std::size_t p = 0; p < r; ++p) {
                const double v = std::round(cur[p]);
                if (std::abs(cur[p] - v) > 1e-6 || v < 0) return;
                y[pivots[p]] = static_cast<std::int64_t>(v);
            }
            if (left_multiply(m, y) != fiber.target) return;
            if (fiber.members.size() >= cap)
                throw Error(ErrorCode::FiberTooLarge, "fiber exceeds " + std::to_string(cap) + " members");
            fiber.members.push_back(y);
            return;
        }
        // Values v of this run that leave every pivot reachable: for each p,
        // cur_p - a_pf v + (rest - v) slack_p(f+1) >= 0 is linear in v.
        double lo = 0.0, hi = static_cast<double>(rest);
        for (std::size_t p = 0; p < r; ++p) {
            const double g = slack[(f + 1) * r + p];
            const double konst = cur[p] + static_cast<double>(rest) * g;
            const double coef = -a(p, f) - g;
            if (coef < -1e-12)
                hi = std::min(hi, (konst + eps) / -coef);
            else if (coef > 1e-12)
                lo = std::max(lo, (-eps - konst) / coef);
            else if (konst < -eps)
                return;
        }
        const auto from = static_cast<std::int64_t>(std::ceil(lo - eps));
        const auto to = static_cast<std::int64_t>(std::floor(hi + eps));
        for (std::int64_t v = std::max<std::int64_t>(from, 0); v <= std::min(to, rest); ++v) {
            y[free_runs[f]] = v;
            for (std::size_t p = 0; p < r; ++p) cur[p] -= a(p, f) * static_cast<double>(v);
            self(self, f + 1, rest - v);
            for (std::size_t p = 0; p < r; ++p) cur[p] += a(p, f) * static_cast<double>(v);
        }
        y[free_runs[f]] = 0;
    };
    dfs(dfs, 0, total);
    std::sort(fiber.members.begin(), fiber.members.end());
    return fiber;
}

// ---------------------------------------------------------------------------
// Graver basis by completion.

namespace {

constexpr std::size_t kMaxRuns = 64;

struct Packed {
    std::vector<std::int32_t> a;
    std::uint64_t pos = 0, neg = 0;
    std::int64_t norm = 0;

    explicit Packed(const IntVector& v) : a(v.begin(), v.end()) { refresh(); }
    Packed() = default;

    void refresh() {
        pos = neg = 0;
        norm = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > 0) pos |= std::uint64_t{1} << i;
            if (a[i] < 0) neg |= std::uint64_t{1} << i;
            norm += std::abs(a[i]);
        }
    }
    bool zero() const { return pos == 0 && neg == 0; }
};

// sign * g is conformal to s (same signs, smaller or equal magnitudes).
bool conformal(const Packed& g, int sign, const Packed& s) {
    const std::uint64_t gp = sign > 0 ? g.pos : g.neg, gn = sign > 0 ? g.neg : g.pos;
    if ((gp & ~s.pos) || (gn & ~s.neg) || g.norm > s.norm) return false;
    for (std::uint64_t bits = g.pos | g.neg; bits; bits &= bits - 1) {
        const int i = std::countr_zero(bits);
        if (std::abs(g.a[i]) > std::abs(s.a[i])) return false;
    }
    return true;
}

// Reduce s by the set until no element (of either sign) lies below it.
bool normal_form(Packed& s, const std::vector<Packed>& set) {
    bool changed = true;
    while (changed && !s.zero()) {
        changed = false;
        for (const auto& g : set) {
            for (int sign : {1, -1}) {
                if (!conformal(g, sign, s)) continue;
                for (std::size_t i = 0; i < s.a.size(); ++i) s.a[i] -= sign * g.a[i];
                s.refresh();
                changed = true;
                break;
            }
            if (changed || s.zero()) break;
        }
    }
    return !s.zero();
}

Packed add(const Packed& f, int sign, const Packed& g) {
    Packed out;
    out.a.resize(f.a.size());
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = f.a[i] + sign * g.a[i];
    out.refresh();
    return out;
}

}  // namespace

std::vector<Move> graver_basis(const IntMatrix& m) {
    const std::size_t k = m.rows();
    if (k > kMaxRuns) throw Error(ErrorCode::TooLarge, "Graver completion limited to 64 runs");
    std::vector<Packed> set;
    for (const auto& b : integer_kernel_basis(m)) set.emplace_back(b);

    // Critical pairs f + sign*g, processed in order of increasing norm.
    std::multimap<std::int64_t, Packed> pending;
    auto add_pairs = [&](std::size_t idx) {
        const Packed& f = set[idx];
        for (std::size_t j = 0; j < idx; ++j) {
            const Packed& g = set[j];
            for (int sign : {1, -1}) {
                const std::uint64_t gp = sign > 0 ? g.pos : g.neg, gn = sign > 0 ? g.neg : g.pos;
                // Sign-compatible sums reduce to zero; skip them.
                if (!((f.pos & gn) || (f.neg & gp))) continue;
                Packed s = add(f, sign, g);
                if (!s.zero()) pending.emplace(s.norm, std::move(s));
            }
        }
    };
    for (std::size_t i = 0; i < set.size(); ++i) add_pairs(i);
    while (!pending.empty()) {
        Packed s = std::move(pending.begin()->second);
        pending.erase(pending.begin());
        if (!normal_form(s, set)) continue;
        set.push_back(std::move(s));
        add_pairs(set.size() - 1);
    }

    // Keep the conformally minimal elements.
    std::vector<Move> out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        bool minimal = true;
        for (std::size_t j = 0; j < set.size() && minimal; ++j) {
            if (i == j) continue;
            if ((conformal(set[j], 1, set[i]) || conformal(set[j], -1, set[i])) && set[j].norm < set[i].norm)
                minimal = false;
        }
        if (minimal) out.push_back(normalize_move(IntVector(set[i].a.begin(), set[i].a.end())));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Weak compositions of a total, ranked for array lookup.

namespace {

class Compositions {
public:
    Compositions(std::size_t parts, int total) : parts_(parts), total_(total) {
        binom_.assign(parts + total + 1, std::vector<std::uint64_t>(parts + 1, 0));
        for (std::size_t n = 0; n < binom_.size(); ++n) {
            binom_[n][0] = 1;
            for (std::size_t r = 1; r <= std::min(n, parts); ++r)
                binom_[n][r] = binom_[n - 1][r - 1] + (r <= n - 1 ? binom_[n - 1][r] : 0);
        }
    }

    // Number of weak compositions of n into p parts.
    std::uint64_t count(int n, std::size_t p) const {
        if (p == 0) return n == 0 ? 1 : 0;
        return binom_[static_cast<std::size_t>(n) + p - 1][p - 1];
    }
    std::uint64_t size() const { return count(total_, parts_); }

    std::uint64_t rank(const IntVector& y) const {
        std::uint64_t r = 0;
        int rest = total_;
        for (std::size_t i = 0; i + 1 < parts_; ++i) {
            for (int v = 0; v < y[i]; ++v) r += count(rest - v, parts_ - i - 1);
            rest -= static_cast<int>(y[i]);
        }
        return r;
    }

    // Same rank, visiting only the positions set in `support` (parts <= 64).
    std::uint64_t rank_sparse(const IntVector& y, std::uint64_t support) const {
        if (step_.empty()) build_steps();
        std::uint64_t r = 0;
        int rest = total_;
        const auto t = static_cast<std::size_t>(total_) + 1;
        while (support != 0) {
            const auto i = static_cast<std::size_t>(std::countr_zero(support));
            support &= support - 1;
            r += step_[(i * t + static_cast<std::size_t>(rest)) * t + static_cast<std::size_t>(y[i])];
            rest -= static_cast<int>(y[i]);
        }
        return r;
    }

    template <class F>
    void for_each(F&& f) const {
        IntVector y(parts_, 0);
        auto rec = [&](auto&& self, std::size_t i, int rest) -> void {
            if (i + 1 == parts_) {
                y[i] = rest;
                f(y);
                return;
            }
            for (int v = 0; v <= rest; ++v) {
                y[i] = v;
                self(self, i + 1, rest - v);
            }
            y[i] = 0;
        };
        if (parts_ > 0) rec(rec, 0, total_);
    }

private:
    std::size_t parts_;
    int total_;
    std::vector<std::vector<std::uint64_t>> binom_;
    mutable std::vector<std::uint64_t> step_;

    void build_steps() const {
        const auto t = static_cast<std::size_t>(total_) + 1;
        step_.assign(parts_ * t * t, 0);
        for (std::size_t i = 0; i + 1 < parts_; ++i)
            for (int rest = 0; rest <= total_; ++rest) {
                std::uint64_t acc = 0;
                for (int y = 0; y <= rest; ++y) {
                    step_[(i * t + static_cast<std::size_t>(rest)) * t + static_cast<std::size_t>(y)] = acc;
                    acc += count(rest - y, parts_ - i - 1);
                }
            }
    }
};

struct DisjointSets {
    std::vector<std::uint32_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0U); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

constexpr std::uint64_t kMaxEnumerated = 60'000'000;

}  // namespace

bool is_markov_basis(const std::vector<Move>& moves, const IntMatrix& m, int total_bound, std::size_t cap) {
    check_moves(m, moves);
    const std::size_t k = m.rows();
    if (k > 64) throw Error(ErrorCode::TooLarge, "at most 64 runs");
    require_homogeneous(integer_kernel_basis(m));

    // Signed moves in sparse form, grouped by the runs they decrease.
    struct Signed {
        std::vector<std::pair<std::size_t, std::int64_t>> entries;
    };
    std::unordered_map<std::uint64_t, std::vector<Signed>> by_need;
    for (const auto& z : moves)
        for (int sign : {1, -1}) {
            Signed s;
            std::uint64_t need = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if (z[i] == 0) continue;
                s.entries.emplace_back(i, sign * z[i]);
                if (sign * z[i] < 0) need |= std::uint64_t{1} << i;
            }
            if (need != 0) by_need[need].push_back(std::move(s));
        }

    struct VectorHash {
        std::size_t operator()(const IntVector& v) const noexcept {
            std::size_t h = 1469598103934665603ULL;
            for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
            return h;
        }
    };

    for (int n = 1; n <= total_bound; ++n) {
        const Compositions comp(k, n);
        if (comp.size() > kMaxEnumerated)
            throw Error(ErrorCode::TooLarge, "too many observation vectors at total " + std::to_string(n));
        DisjointSets sets(comp.size());
        // M'y packed into one integer, digit j in base 2*n*max|M|+1; linear in y.
        std::int64_t max_abs = 1;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) max_abs = std::max(max_abs, std::abs(m(i, j)));
        const long double base = 2.0L * n * static_cast<long double>(max_abs) + 1.0L;
        const bool packed = std::pow(base, static_cast<long double>(m.cols())) < 9.0e18L;
        std::vector<std::int64_t> row_key(k, 0);
        if (packed)
            for (std::size_t i = 0; i < k; ++i) {
                std::int64_t key = 0, place = 1;
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    key += m(i, j) * place;
                    place *= static_cast<std::int64_t>(base);
                }
                row_key[i] = key;
            }
        std::vector<std::int64_t> keys;
        std::unordered_map<IntVector, std::size_t, VectorHash> fiber_sizes;
        IntVector next(k);
        comp.for_each([&](const IntVector& y) {
            if (packed) {
                std::int64_t key = 0;
                for (std::size_t i = 0; i < k; ++i) key += y[i] * row_key[i];
                keys.push_back(key);
            } else {
                ++fiber_sizes[left_multiply(m, y)];
            }
            std::uint64_t support = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (y[i] > 0) support |= std::uint64_t{1} << i;
            const auto self = static_cast<std::uint32_t>(comp.rank_sparse(y, support));
            next = y;
            for (std::uint64_t sub = support; sub != 0; sub = (sub - 1) & support) {
                auto it = by_need.find(sub);
                if (it == by_need.end()) continue;
                for (const auto& s : it->second) {
                    bool ok = true;
                    for (auto [i, v] : s.entries) ok = ok && y[i] + v >= 0;
                    if (!ok) continue;
                    std::uint64_t next_support = support;
                    for (auto [i, v] : s.entries) {
                        next[i] += v;
                        if (next[i] > 0) next_support |= std::uint64_t{1} << i;
                        else next_support &= ~(std::uint64_t{1} << i);
                    }
                    sets.unite(self, static_cast<std::uint32_t>(comp.rank_sparse(next, next_support)));
                    for (auto [i, v] : s.entries) next[i] -= v;
                }
            }
        });
        std::size_t components = 0;
        for (std::uint32_t i = 0; i < sets.parent.size(); ++i)
            if (sets.find(i) == i) ++components;
        std::size_t fibers = 0, largest = 0;
        if (packed) {
            std::sort(keys.begin(), keys.end());
            for (std::size_t a = 0, b = 0; a < keys.size(); a = b) {
                while (b < keys.size() && keys[b] == keys[a]) ++b;
                ++fibers;
                largest = std::max(largest, b - a);
            }
        } else {
            fibers = fiber_sizes.size();
            for (const auto& [stat, size] : fiber_sizes) largest = std::max(largest, size);
        }
        if (largest > cap) throw Error(ErrorCode::FiberTooLarge, "fiber exceeds the member cap");
        if (components != fibers) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Minimal Markov bases.

namespace {

struct FiberClasses {
    std::vector<IntVector> members;
    std::vector<std::uint32_t> class_of;  // class representative per member
    std::size_t classes = 0;
};

// Members sharing a positive coordinate are joined, transitively. Moves of
// lower degree connect exactly these classes.
FiberClasses support_classes(Fiber fiber) {
    FiberClasses out;
    out.members = std::move(fiber.members);
    const std::size_t n = out.members.size();
    std::vector<std::uint64_t> support(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < out.members[i].size(); ++r)
            if (out.members[i][r] > 0) support[i] |= std::uint64_t{1} << r;
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (support[i] & support[j]) sets.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    out.class_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.class_of[i] = sets.find(static_cast<std::uint32_t>(i));
        if (out.class_of[i] == i) ++out.classes;
    }
    return out;
}

// Distinct fibers M'g+ over the Graver basis, each enumerated once.
template <class F>
void for_each_graver_fiber(const IntMatrix& m, const MarkovOptions& opts, F&& f) {
    if (m.rows() > opts.max_runs)
        throw Error(ErrorCode::TooLarge, "Markov basis computation limited to " + std::to_string(opts.max_runs) +
                                             " runs");
    std::set<IntVector> seen;
    for (const auto& g : graver_basis(m)) {
        IntVector plus(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) plus[i] = std::max<std::int64_t>(g[i], 0);
        if (!seen.insert(left_multiply(m, plus)).second) continue;
        f(support_classes(enumerate_fiber(m, plus, opts.fiber_cap)));
    }
}

}  // namespace

MarkovBasis markov_basis(const IntMatrix& m, const MarkovOptions& opts) {
    MarkovBasis basis;
    basis.configuration_id = matrix_digest(m.transposed());
    for_each_graver_fiber(m, opts, [&](const FiberClasses& fc) {
        if (fc.classes < 2) return;
        // A star: every other class is joined to the lexicographically largest
        // member by its smallest move. Members come sorted.
        const std::size_t hub = fc.members.size() - 1;
        std::map<std::uint32_t, Move> best;
        for (std::size_t j = 0; j < hub; ++j) {
            if (fc.class_of[j] == fc.class_of[hub]) continue;
            Move z(fc.members[j].size());
            for (std::size_t r = 0; r < z.size(); ++r) z[r] = fc.members[hub][r] - fc.members[j][r];
            z = normalize_move(std::move(z));
            auto [it, fresh] = best.emplace(fc.class_of[j], z);
            if (!fresh && z < it->second) it->second = std::move(z);
        }
        for (auto& [cls, z] : best) basis.moves.push_back(std::move(z));
    });
    std::sort(basis.moves.begin(), basis.moves.end());
    return basis;
}

std::size_t minimal_markov_size(const IntMatrix& m, const MarkovOptions& opts) {
    std::size_t total = 0;
    for_each_graver_fiber(m, opts, [&](const FiberClasses& fc) { total += fc.classes - 1; });
    return total;
}

std::vector<Move> moves_up_to_degree(const IntMatrix& m, int d) {
    if (d < 1) throw Error(ErrorCode::InvalidInput, "degree must be positive");
    const std::size_t k = m.rows();
    if (k > 64) throw Error(ErrorCode::TooLarge, "at most 64 runs");
    require_homogeneous(integer_kernel_basis(m));

    std::vector<Move> found;
    for (int e = 1; e <= d; ++e) {
        const Compositions comp(k, e);
        if (comp.size() > kMaxEnumerated) throw Error(ErrorCode::TooLarge, "too many vectors at degree " + std::to_string(e));
        std::map<IntVector, std::vector<std::pair<IntVector, std::uint64_t>>> by_stat;
        comp.for_each([&](const IntVector& y) {
            std::uint64_t support = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (y[i] > 0) support |= std::uint64_t{1} << i;
            by_stat[left_multiply(m, y)].emplace_back(y, support);
        });
        for (const auto& [stat, members] : by_stat)
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    if (members[i].second & members[j].second) continue;
                    Move z(k);
                    for (std::size_t r = 0; r < k; ++r) z[r] = members[i].first[r] - members[j].first[r];
                    found.push_back(normalize_move(std::move(z)));
                }
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());

    // Primitive: no other move of the list lies conformally below.
    std::vector<Packed> packed;
    for (const auto& z : found) packed.emplace_back(z);
    std::vector<Move> out;
    for (std::size_t i = 0; i < found.size(); ++i) {
        bool primitive = true;
        for (std::size_t j = 0; j < found.size() && primitive; ++j)
            if (j != i && packed[j].norm < packed[i].norm &&
                (conformal(packed[j], 1, packed[i]) || conformal(packed[j], -1, packed[i])))
                primitive = false;
        if (primitive) out.push_back(found[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structured generators for k-sums.

namespace {

struct SumLayout {
    KSum sum;
    std::uint32_t shared = 0;  // clique, in sum labels
    std::uint32_t only1 = 0;   // V1 \ V2
    std::uint32_t only2 = 0;   // V2 \ V1
    int min_shared = 0;
};

SumLayout layout(const Graph& g1, const Graph& g2, const Glue& glue) {
    SumLayout out;
    out.sum = k_sum(g1, g2, glue);
    for (auto [a, b] : glue) out.shared |= 1U << (a - 1);
    for (int v = 1; v <= g1.n_vertices(); ++v)
        if (!((out.shared >> (v - 1)) & 1U)) out.only1 |= 1U << (v - 1);
    for (int v = g1.n_vertices() + 1; v <= out.sum.graph.n_vertices(); ++v) out.only2 |= 1U << (v - 1);
    out.min_shared = std::countr_zero(out.shared) + 1;
    return out;
}

std::size_t run_of(std::uint32_t subset, int n) { return Partition::from_subset(subset, n).run_index(); }

// Subsets of `mask`, in increasing order of their bit patterns.
std::vector<std::uint32_t> subsets_of(std::uint32_t mask) {
    std::vector<std::uint32_t> out;
    std::uint32_t s = 0;
    do {
        out.push_back(s);
        s = (s - mask) & mask;
    } while (s != 0);
    return out;
}

void finish(std::vector<Move>& moves) {
    for (auto& z : moves) z = normalize_move(std::move(z));
    std::sort(moves.begin(), moves.end());
    moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
}

}  // namespace

std::vector<Move> quad_moves(const Graph& g1, const Graph& g2, const Glue& glue) {
    const SumLayout L = layout(g1, g2, glue);
    const int n = L.sum.graph.n_vertices();
    const std::size_t runs = std::size_t{1} << (n - 1);
    const std::uint32_t pin = 1U << (L.min_shared - 1);

    std::vector<Move> out;
    for (std::uint32_t a : subsets_of(L.shared & ~pin)) {
        const std::uint32_t side = a | pin;  // A|B oriented by the smallest shared vertex
        for (std::uint32_t c1 : subsets_of(L.only1))
            for (std::uint32_t e1 : subsets_of(L.only1))
                for (std::uint32_t c2 : subsets_of(L.only2))
                    for (std::uint32_t e2 : subsets_of(L.only2)) {
                        Move z(runs, 0);
                        z[run_of(side | c1 | c2, n)] += 1;
                        z[run_of(side | e1 | e2, n)] += 1;
                        z[run_of(side | e1 | c2, n)] -= 1;
                        z[run_of(side | c1 | e2, n)] -= 1;
                        if (std::any_of(z.begin(), z.end(), [](std::int64_t v) { return v != 0; }))
                            out.push_back(std::move(z));
                    }
    }
    finish(out);
    return out;
}

std::vector<Move> lift_moves(const std::vector<Move>& moves, const Graph& g1, const Graph& g2, const Glue& glue,
                             bool from_second) {
    const SumLayout L = layout(g1, g2, glue);
    const Graph& part = from_second ? g2 : g1;
    const int n = L.sum.graph.n_vertices();
    const std::size_t runs = std::size_t{1} << (n - 1);
    const std::size_t part_runs = std::size_t{1} << (part.n_vertices() - 1);
    const std::uint32_t other = from_second ? L.only1 : L.only2;
    const std::uint32_t pin = 1U << (L.min_shared - 1);

    // Part run -> vertex subset of the sum containing the smallest shared vertex.
    std::vector<std::uint32_t> oriented(part_runs);
    for (std::size_t r = 0; r < part_runs; ++r) {
        const std::uint32_t side_b = static_cast<std::uint32_t>(r << 1);
        std::uint32_t subset = 0;
        for (int v = 1; v <= part.n_vertices(); ++v)
            if ((side_b >> (v - 1)) & 1U) {
                const int mapped = from_second ? L.sum.g2_to_sum[v] : v;
                subset |= 1U << (mapped - 1);
            }
        const std::uint32_t part_all = from_second ? (L.shared | L.only2) : (L.shared | L.only1);
        if (!(subset & pin)) subset = part_all & ~subset;
        oriented[r] = subset;
    }

    const auto other_subsets = subsets_of(other);
    std::vector<Move> out;
    for (const auto& f : moves) {
        if (f.size() != part_runs) throw Error(ErrorCode::ShapeMismatch, "move length differs from the part's runs");
        std::vector<std::uint32_t> plus, minus;
        for (std::size_t r = 0; r < part_runs; ++r) {
            for (std::int64_t c = 0; c < f[r]; ++c) plus.push_back(oriented[r]);
            for (std::int64_t c = 0; c < -f[r]; ++c) minus.push_back(oriented[r]);
        }
        if (plus.size() != minus.size()) throw Error(ErrorCode::InvalidMove, "move is not balanced");
        // Pair monomials with equal restriction to the shared clique.
        std::vector<std::uint32_t> paired(minus.size());
        std::vector<bool> taken(minus.size(), false);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            std::size_t j = 0;
            while (j < minus.size() && (taken[j] || (minus[j] & L.shared) != (plus[i] & L.shared))) ++j;
            if (j == minus.size()) throw Error(ErrorCode::InvalidMove, "move does not respect the shared clique");
            taken[j] = true;
            paired[i] = minus[j];
        }
        const std::size_t d = plus.size();
        std::vector<std::size_t> choice(d, 0);
        while (true) {
            Move z(runs, 0);
            for (std::size_t i = 0; i < d; ++i) {
                z[run_of(plus[i] | other_subsets[choice[i]], n)] += 1;
                z[run_of(paired[i] | other_subsets[choice[i]], n)] -= 1;
            }
            if (std::any_of(z.begin(), z.end(), [](std::int64_t v) { return v != 0; })) out.push_back(std::move(z));
            std::size_t i = 0;
            while (i < d && ++choice[i] == other_subsets.size()) choice[i++] = 0;
            if (i == d) break;
        }
    }
    finish(out);
    return out;
}

TheoremGraph theorem_graph(std::size_t p, const DefiningRelationSet& rel) {
    if (rel.words.size() > 2) throw Error(ErrorCode::TooManyRelations, "at most two defining relations");
    if (p < 1 || p > 63) throw Error(ErrorCode::InvalidInput, "factor count out of range");
    if (f2_rank(rel.words) != rel.words.size()) throw Error(ErrorCode::DependentRelations, "dependent words");
    const auto res = resolution(rel);
    if (res && *res < 3) throw Error(ErrorCode::InvalidInput, "designs of resolution below III have no graph");
    const std::uint64_t all = (std::uint64_t{1} << p) - 1;
    for (auto w : rel.words)
        if (w & ~all) throw Error(ErrorCode::InvalidInput, "word uses a factor beyond p");

    std::vector<Edge> edges(p);
    int next = 2;
    // Lay the factors of `mask` along a path from `from` to `to` (0 = fresh end).
    auto path = [&](std::uint64_t mask, int from, int to) {
        std::vector<int> factors;
        for (std::size_t j = 0; j < p; ++j)
            if ((mask >> j) & 1U) factors.push_back(static_cast<int>(j));
        int at = from;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const int nxt = (i + 1 == factors.size() && to != 0) ? to : next++;
            edges[factors[i]] = {std::min(at, nxt), std::max(at, nxt)};
            at = nxt;
        }
        return at;
    };

    std::uint64_t used = 0;
    int tail = 1;
    if (rel.words.size() == 1) {
        // A cycle through vertex 1 carrying the word.
        tail = path(rel.words[0], 1, 1);
        used = rel.words[0];
        tail = next - 1;
    } else if (rel.words.size() == 2) {
        std::uint64_t w1 = rel.words[0], w2 = rel.words[1];
        if ((w1 & w2) == w1) w2 ^= w1;  // nested words: use the disjoint pair
        else if ((w1 & w2) == w2) w1 ^= w2;
        const std::uint64_t b = w1 & w2, a = w1 & ~b, c = w2 & ~b;
        if (b == 0) {
            path(a, 1, 1);
            path(c, 1, 1);
        } else {
            // Theta graph: the shared part is a path from the hub to `end`,
            // the other two parts are paths back to the hub.
            const int end = path(b, 1, 0);
            path(a, end, 1);
            path(c, end, 1);
        }
        used = w1 | w2;
        tail = next - 1;
    }
    path(all & ~used, tail, 0);

    TheoremGraph out;
    out.graph = Graph(next - 1, edges);
    out.factor_to_edge.resize(p);
    std::iota(out.factor_to_edge.begin(), out.factor_to_edge.end(), 0);
    return out;
}

}  // namespace cutdesign

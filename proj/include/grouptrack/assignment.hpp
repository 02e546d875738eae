#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_set>
#include <vector>

#include "grouptrack/errors.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

/// Costs of one association subproblem. Row i (a predicted track) takes
/// exactly one option:
///   - detection by measurement j: detection_cost(i, j),
///   - missed detection while existing: miss_cost(i),
///   - nonexistence: nonexist_cost(i).
/// Measurement columns are shared (injective); miss/nonexist options are
/// private per row. Infinite entries mark unavailable options; finite
/// entries are -log association scores.
struct AssociationProblem {
    Eigen::MatrixXd detection_cost;
    Eigen::VectorXd miss_cost;
    Eigen::VectorXd nonexist_cost;
    std::vector<TrackLabel> track_index;

    [[nodiscard]] int rows() const { return static_cast<int>(detection_cost.rows()); }
    [[nodiscard]] int measurements() const { return static_cast<int>(detection_cost.cols()); }
};

/// One ranked solution. theta[i] encodes row i's option: -1 nonexistent,
/// 0 missed detection, j >= 1 detection by measurement j (1-based).
struct RankedAssignment {
    std::vector<int> theta;
    double cost = 0.0;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Expanded-column cost view over an AssociationProblem: columns
/// [0, m) are detections, [m, m+n) per-row miss, [m+n, m+2n) per-row
/// nonexistence.
class ExpandedCost {
public:
    explicit ExpandedCost(const AssociationProblem& p)
        : p_(p), n_(p.rows()), m_(p.measurements()) {}

    [[nodiscard]] int rows() const { return n_; }
    [[nodiscard]] int cols() const { return m_ + 2 * n_; }

    [[nodiscard]] double operator()(int i, int col) const {
        if (col < m_) return p_.detection_cost(i, col);
        if (col < m_ + n_) return (col - m_ == i) ? p_.miss_cost(i) : kInf;
        return (col - m_ - n_ == i) ? p_.nonexist_cost(i) : kInf;
    }

    [[nodiscard]] int theta_code(int i, int col) const {
        (void)i;
        if (col < m_) return col + 1;
        if (col < m_ + n_) return 0;
        return -1;
    }

private:
    const AssociationProblem& p_;
    int n_, m_;
};

inline std::int64_t edge_key(int row, int col, int ncols) {
    return static_cast<std::int64_t>(row) * ncols + col;
}

/// Shortest-augmenting-path insertion of one row into a partial
/// assignment, maintaining dual potentials (u, v). col_owner has one
/// extra sentinel slot at index cols() used as the virtual start column.
/// Returns false when no finite-cost augmenting path exists.
template <typename CostFn>
bool augment_row(int enter_row, const CostFn& cost, int ncols, std::vector<double>& u,
                 std::vector<double>& v, std::vector<int>& col_owner,
                 const std::vector<char>& col_avail) {
    const int C = ncols;
    std::vector<double> minv(static_cast<std::size_t>(C), kInf);
    std::vector<int> way(static_cast<std::size_t>(C), C);
    std::vector<char> used(static_cast<std::size_t>(C) + 1, 0);
    int j0 = C;
    col_owner[static_cast<std::size_t>(C)] = enter_row;
    while (true) {
        used[static_cast<std::size_t>(j0)] = 1;
        const int i0 = col_owner[static_cast<std::size_t>(j0)];
        double delta = kInf;
        int j1 = -1;
        for (int j = 0; j < C; ++j) {
            if (used[static_cast<std::size_t>(j)] || !col_avail[static_cast<std::size_t>(j)])
                continue;
            const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] -
                               v[static_cast<std::size_t>(j)];
            if (cur < minv[static_cast<std::size_t>(j)]) {
                minv[static_cast<std::size_t>(j)] = cur;
                way[static_cast<std::size_t>(j)] = j0;
            }
            if (minv[static_cast<std::size_t>(j)] < delta) {
                delta = minv[static_cast<std::size_t>(j)];
                j1 = j;
            }
        }
        if (j1 < 0 || !(delta < kInf)) {
            col_owner[static_cast<std::size_t>(C)] = -1;
            return false;
        }
        for (int j = 0; j <= C; ++j) {
            if (used[static_cast<std::size_t>(j)]) {
                u[static_cast<std::size_t>(col_owner[static_cast<std::size_t>(j)])] += delta;
                v[static_cast<std::size_t>(j)] -= delta;
            } else if (minv[static_cast<std::size_t>(j)] < kInf) {
                minv[static_cast<std::size_t>(j)] -= delta;
            }
        }
        j0 = j1;
        if (col_owner[static_cast<std::size_t>(j0)] < 0) break;
    }
    while (j0 != C) {
        const int j1 = way[static_cast<std::size_t>(j0)];
        col_owner[static_cast<std::size_t>(j0)] = col_owner[static_cast<std::size_t>(j1)];
        j0 = j1;
    }
    col_owner[static_cast<std::size_t>(C)] = -1;
    return true;
}

struct MurtyNode {
    double cost = 0.0;
    int partition_start = 0;
    std::vector<int> row_to_col;
    std::vector<double> u, v;
    std::vector<std::pair<int, int>> forbidden;
};

} // namespace detail

/// Exact min-cost assignment of n rows to distinct columns of an
/// n x m cost matrix (n <= m required). Infinite entries are
/// unavailable. Throws NumericalFailure if no finite assignment exists.
inline std::pair<std::vector<int>, double> linear_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0) return {{}, 0.0};
    if (n > m) throw NumericalFailure("linear_assignment: more rows than columns");
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> col_owner(static_cast<std::size_t>(m) + 1, -1);
    std::vector<char> avail(static_cast<std::size_t>(m), 1);
    const auto cost_fn = [&](int i, int j) { return cost(i, j); };
    for (int i = 0; i < n; ++i) {
        if (!detail::augment_row(i, cost_fn, m, u, v, col_owner, avail)) {
            throw NumericalFailure("linear_assignment: infeasible cost matrix");
        }
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        if (col_owner[static_cast<std::size_t>(j)] >= 0) {
            row_to_col[static_cast<std::size_t>(col_owner[static_cast<std::size_t>(j)])] = j;
            total += cost(col_owner[static_cast<std::size_t>(j)], j);
        }
    }
    return {row_to_col, total};
}

/// Murty-style ranked assignment over an association problem: returns up
/// to K lowest-cost solutions in nondecreasing cost order, without
/// duplicates. Solutions whose cost exceeds the optimum by more than
/// max_cost_gap are not enumerated. Each popped subproblem re-solves by
/// repairing the parent solution with a single augmenting path, reusing
/// the parent's dual potentials.
inline std::vector<RankedAssignment> ranked_assignments(
    const AssociationProblem& problem, int K,
    double max_cost_gap = std::numeric_limits<double>::infinity()) {
    using detail::MurtyNode;
    std::vector<RankedAssignment> out;
    if (K < 1) return out;

    const detail::ExpandedCost cost(problem);
    const int n = cost.rows();
    const int C = cost.cols();
    if (n == 0) {
        out.push_back(RankedAssignment{{}, 0.0});
        return out;
    }

    std::vector<MurtyNode> arena;
    struct HeapEntry {
        double cost;
        std::size_t seq;
        bool operator>(const HeapEntry& o) const {
            return cost != o.cost ? cost > o.cost : seq > o.seq;
        }
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;

    const auto total_cost = [&](const std::vector<int>& row_to_col) {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += cost(i, row_to_col[static_cast<std::size_t>(i)]);
        return t;
    };

    // Root: full solve, all columns available.
    {
        MurtyNode root;
        root.u.assign(static_cast<std::size_t>(n), 0.0);
        root.v.assign(static_cast<std::size_t>(C) + 1, 0.0);
        std::vector<int> col_owner(static_cast<std::size_t>(C) + 1, -1);
        std::vector<char> avail(static_cast<std::size_t>(C), 1);
        const auto root_cost = [&](int i, int j) { return cost(i, j); };
        for (int i = 0; i < n; ++i) {
            if (!detail::augment_row(i, root_cost, C, root.u, root.v, col_owner, avail)) {
                return out; // no feasible assignment at all
            }
        }
        root.row_to_col.assign(static_cast<std::size_t>(n), -1);
        for (int j = 0; j < C; ++j) {
            const int owner = col_owner[static_cast<std::size_t>(j)];
            if (owner >= 0) root.row_to_col[static_cast<std::size_t>(owner)] = j;
        }
        root.cost = total_cost(root.row_to_col);
        root.partition_start = 0;
        arena.push_back(std::move(root));
        heap.push(HeapEntry{arena.back().cost, 0});
    }

    double best_cost = 0.0;
    while (!heap.empty() && static_cast<int>(out.size()) < K) {
        const HeapEntry top = heap.top();
        heap.pop();
        const MurtyNode node = arena[top.seq]; // copy: arena may reallocate below
        if (out.empty()) best_cost = node.cost;
        if (node.cost > best_cost + max_cost_gap) break;

        RankedAssignment sol;
        sol.cost = node.cost;
        sol.theta.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            sol.theta[static_cast<std::size_t>(i)] =
                cost.theta_code(i, node.row_to_col[static_cast<std::size_t>(i)]);
        }
        out.push_back(std::move(sol));
        if (static_cast<int>(out.size()) >= K) break;

        // Partition: child p fixes rows [0, p) to the node's columns and
        // forbids row p from re-using its column.
        for (int p = node.partition_start; p < n; ++p) {
            MurtyNode child;
            child.partition_start = p;
            child.row_to_col = node.row_to_col;
            child.u = node.u;
            child.v = node.v;
            child.forbidden = node.forbidden;
            const int freed = node.row_to_col[static_cast<std::size_t>(p)];
            child.forbidden.emplace_back(p, freed);

            std::unordered_set<std::int64_t> banned;
            banned.reserve(child.forbidden.size() * 2);
            for (const auto& [fr, fc] : child.forbidden) {
                banned.insert(detail::edge_key(fr, fc, C));
            }
            const auto child_cost = [&](int i, int j) {
                return banned.count(detail::edge_key(i, j, C)) ? detail::kInf : cost(i, j);
            };

            std::vector<char> avail(static_cast<std::size_t>(C), 1);
            std::vector<int> col_owner(static_cast<std::size_t>(C) + 1, -1);
            for (int i = 0; i < p; ++i) {
                avail[static_cast<std::size_t>(child.row_to_col[static_cast<std::size_t>(i)])] = 0;
            }
            for (int i = p + 1; i < n; ++i) {
                col_owner[static_cast<std::size_t>(child.row_to_col[static_cast<std::size_t>(i)])] = i;
            }
            if (!detail::augment_row(p, child_cost, C, child.u, child.v, col_owner, avail)) {
                continue;
            }

            // The warm-started repair is optimal iff the optimality
            // certificate (feasible duals, tight matching, zero dual on
            // every unmatched column) can be restored at the freed
            // column. If the freed column ends up unmatched, its dual
            // can be raised back to zero only when no free row would go
            // negative; otherwise re-solve this child from scratch.
            if (col_owner[static_cast<std::size_t>(freed)] < 0) {
                double slack = detail::kInf;
                for (int i = p; i < n; ++i) {
                    const double c = child_cost(i, freed);
                    if (c < detail::kInf) {
                        slack = std::min(slack, c - child.u[static_cast<std::size_t>(i)]);
                    }
                }
                if (slack < 0.0) {
                    for (int j = 0; j < C; ++j) {
                        if (avail[static_cast<std::size_t>(j)]) {
                            child.v[static_cast<std::size_t>(j)] = 0.0;
                            col_owner[static_cast<std::size_t>(j)] = -1;
                        }
                    }
                    for (int i = p; i < n; ++i) child.u[static_cast<std::size_t>(i)] = 0.0;
                    bool ok = true;
                    for (int i = p; i < n && ok; ++i) {
                        ok = detail::augment_row(i, child_cost, C, child.u, child.v, col_owner,
                                                 avail);
                    }
                    if (!ok) continue;
                } else {
                    child.v[static_cast<std::size_t>(freed)] = 0.0;
                }
            }

            for (int j = 0; j < C; ++j) {
                const int owner = col_owner[static_cast<std::size_t>(j)];
                if (owner >= 0) child.row_to_col[static_cast<std::size_t>(owner)] = j;
            }
            child.cost = total_cost(child.row_to_col);
            if (!out.empty() && child.cost > best_cost + max_cost_gap) continue;
            arena.push_back(std::move(child));
            heap.push(HeapEntry{arena.back().cost, arena.size() - 1});
        }
    }
    return out;
}

} // namespace grouptrack

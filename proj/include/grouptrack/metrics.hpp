#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "grouptrack/assignment.hpp"
#include "grouptrack/errors.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

struct OspaParams {
    double order = 1.0;    // p >= 1
    double cutoff = 100.0; // c, meters
};

/// Optimal subpattern assignment distance between two planar point sets:
/// localization error capped at the cutoff plus a cutoff-sized penalty
/// per cardinality mismatch, under the optimal pairing. Empty vs empty
/// is 0 by convention.
inline double ospa(const std::vector<Vec2>& X, const std::vector<Vec2>& Y,
                   const OspaParams& params) {
    if (params.order < 1.0 || params.cutoff <= 0.0) {
        throw InvariantViolation("ospa: order must be >= 1 and cutoff positive");
    }
    const std::vector<Vec2>& A = X.size() <= Y.size() ? X : Y;
    const std::vector<Vec2>& B = X.size() <= Y.size() ? Y : X;
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(B.size());
    if (n == 0) return 0.0;

    double assignment_cost = 0.0;
    if (m > 0) {
        Eigen::MatrixXd cost(m, n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const double d = (A[static_cast<std::size_t>(i)] - B[static_cast<std::size_t>(j)]).norm();
                cost(i, j) = std::pow(std::min(d, params.cutoff), params.order);
            }
        }
        assignment_cost = linear_assignment(cost).second;
    }
    const double total =
        assignment_cost + std::pow(params.cutoff, params.order) * static_cast<double>(n - m);
    return std::pow(total / static_cast<double>(n), 1.0 / params.order);
}

} // namespace grouptrack

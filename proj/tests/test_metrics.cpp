#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "grouptrack/metrics.hpp"

using namespace grouptrack;

namespace {

// Permutation-enumeration oracle for the optimal subpattern distance.
double ospa_brute_force(std::vector<Vec2> X, std::vector<Vec2> Y, const OspaParams& prm) {
    if (X.size() > Y.size()) std::swap(X, Y);
    const int m = static_cast<int>(X.size());
    const int n = static_cast<int>(Y.size());
    if (n == 0) return 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            const double d = (X[static_cast<std::size_t>(i)] -
                              Y[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])])
                                 .norm();
            total += std::pow(std::min(d, prm.cutoff), prm.order);
        }
        best = std::min(best, total);
    } while (std::next_permutation(idx.begin(), idx.end()));
    const double sum = best + std::pow(prm.cutoff, prm.order) * (n - m);
    return std::pow(sum / n, 1.0 / prm.order);
}

std::vector<Vec2> random_set(std::mt19937_64& rng, int max_size) {
    std::uniform_real_distribution<double> u(-200.0, 200.0);
    std::vector<Vec2> out;
    const int n = static_cast<int>(rng() % static_cast<unsigned>(max_size + 1));
    for (int i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng));
    return out;
}

} // namespace

TEST(Ospa, HandCases) {
    const OspaParams prm{1.0, 100.0};
    const std::vector<Vec2> X = {Vec2(3, 4), Vec2(-10, 2)};
    EXPECT_DOUBLE_EQ(ospa(X, X, prm), 0.0);

    EXPECT_DOUBLE_EQ(ospa({Vec2(0, 0)}, {}, prm), 100.0);
    EXPECT_DOUBLE_EQ(ospa({}, {Vec2(0, 0)}, prm), 100.0);

    // One point against two, nearest 30 m away: (30 + 100) / 2 = 65.
    EXPECT_DOUBLE_EQ(ospa({Vec2(0, 0)}, {Vec2(30, 0), Vec2(500, 0)}, prm), 65.0);

    EXPECT_DOUBLE_EQ(ospa({}, {}, prm), 0.0);
}

TEST(Ospa, SymmetryAndRange) {
    std::mt19937_64 rng(29);
    const OspaParams prm{1.0, 100.0};
    for (int rep = 0; rep < 200; ++rep) {
        const auto X = random_set(rng, 6);
        const auto Y = random_set(rng, 6);
        const double xy = ospa(X, Y, prm);
        const double yx = ospa(Y, X, prm);
        EXPECT_NEAR(xy, yx, 1e-12);
        EXPECT_GE(xy, 0.0);
        EXPECT_LE(xy, prm.cutoff + 1e-12);
    }
}

TEST(Ospa, MatchesBruteForceAssignment) {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        const OspaParams prm{rep % 2 == 0 ? 1.0 : 2.0, 100.0};
        const auto X = random_set(rng, 6);
        const auto Y = random_set(rng, 6);
        EXPECT_NEAR(ospa(X, Y, prm), ospa_brute_force(X, Y, prm), 1e-10);
    }
}

TEST(Ospa, TriangleInequality) {
    std::mt19937_64 rng(37);
    const OspaParams prm{1.0, 100.0};
    for (int rep = 0; rep < 100; ++rep) {
        const auto X = random_set(rng, 5);
        const auto Y = random_set(rng, 5);
        const auto Z = random_set(rng, 5);
        EXPECT_LE(ospa(X, Z, prm), ospa(X, Y, prm) + ospa(Y, Z, prm) + 1e-9);
    }
}

TEST(Ospa, InvalidParamsRaise) {
    EXPECT_THROW(ospa({}, {}, OspaParams{0.5, 100.0}), InvariantViolation);
    EXPECT_THROW(ospa({}, {}, OspaParams{1.0, 0.0}), InvariantViolation);
}

TEST(Ospa, CardinalityPenaltyDominatesAtLargeSeparation) {
    const OspaParams prm{1.0, 100.0};
    // Far-apart equal-size sets saturate at the cutoff.
    EXPECT_DOUBLE_EQ(ospa({Vec2(0, 0)}, {Vec2(1000, 1000)}, prm), 100.0);
}

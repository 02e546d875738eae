#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "grouptrack/errors.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

/// Log-density of N(x; mean, cov). Throws NumericalFailure if cov is not
/// positive definite.
template <int N>
double gaussian_logpdf(const Eigen::Matrix<double, N, 1>& x,
                       const Eigen::Matrix<double, N, 1>& mean,
                       const Eigen::Matrix<double, N, N>& cov) {
    Eigen::LLT<Eigen::Matrix<double, N, N>> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailure("gaussian_logpdf: covariance is not positive definite");
    }
    const Eigen::Matrix<double, N, 1> d = x - mean;
    const Eigen::Matrix<double, N, 1> w = llt.matrixL().solve(d);
    double log_det = 0.0;
    for (int i = 0; i < N; ++i) log_det += std::log(llt.matrixL()(i, i));
    constexpr double log_2pi = 1.8378770664093454836;
    return -0.5 * (w.squaredNorm() + N * log_2pi) - log_det;
}

struct GaussianComponent {
    double weight = 0.0;
    Vec4 mean = Vec4::Zero();
    Mat4 covariance = Mat4::Identity();
};

/// Weighted sum of Gaussian components over the 4-dimensional state
/// space. Operations producing mixtures keep them normalized.
struct GaussianMixture {
    std::vector<GaussianComponent> components;

    GaussianMixture() = default;
    explicit GaussianMixture(std::vector<GaussianComponent> comps)
        : components(std::move(comps)) {}

    static GaussianMixture single(const Vec4& mean, const Mat4& cov) {
        return GaussianMixture({GaussianComponent{1.0, mean, cov}});
    }

    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] bool empty() const { return components.empty(); }

    [[nodiscard]] double total_weight() const {
        return std::accumulate(components.begin(), components.end(), 0.0,
                               [](double s, const GaussianComponent& c) { return s + c.weight; });
    }

    [[nodiscard]] GaussianMixture normalized() const {
        const double total = total_weight();
        if (total <= 0.0) {
            throw NumericalFailure("GaussianMixture::normalized: total weight is not positive");
        }
        GaussianMixture out = *this;
        for (auto& c : out.components) c.weight /= total;
        return out;
    }

    [[nodiscard]] Vec4 mean() const {
        Vec4 m = Vec4::Zero();
        for (const auto& c : components) m += c.weight * c.mean;
        const double total = total_weight();
        return total > 0.0 ? Vec4(m / total) : Vec4::Zero();
    }

    [[nodiscard]] double logpdf(const Vec4& x) const {
        double max_term = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(components.size());
        for (const auto& c : components) {
            if (c.weight <= 0.0) continue;
            const double t = std::log(c.weight) + gaussian_logpdf<4>(x, c.mean, c.covariance);
            terms.push_back(t);
            max_term = std::max(max_term, t);
        }
        if (terms.empty()) return -std::numeric_limits<double>::infinity();
        double s = 0.0;
        for (double t : terms) s += std::exp(t - max_term);
        return max_term + std::log(s);
    }

    [[nodiscard]] double pdf(const Vec4& x) const { return std::exp(logpdf(x)); }
};

/// Moment-matched merge of a set of components into one.
inline GaussianComponent moment_match(const std::vector<GaussianComponent>& comps) {
    double w = 0.0;
    Vec4 mean = Vec4::Zero();
    for (const auto& c : comps) {
        w += c.weight;
        mean += c.weight * c.mean;
    }
    mean /= w;
    Mat4 cov = Mat4::Zero();
    for (const auto& c : comps) {
        const Vec4 d = c.mean - mean;
        cov += c.weight * (c.covariance + d * d.transpose());
    }
    cov /= w;
    return GaussianComponent{w, mean, cov};
}

/// Standard Gaussian-mixture housekeeping: drop components below
/// prune_threshold, merge clusters closer than merge_distance
/// (Mahalanobis, measured against the dominant component), keep at most
/// max_components by weight, renormalize. Mass-preserving merges keep
/// the overall mixture mean unchanged.
inline GaussianMixture gm_reduce(const GaussianMixture& mixture, double prune_threshold,
                                 double merge_distance, int max_components) {
    if (mixture.empty()) return mixture;

    std::vector<GaussianComponent> pool;
    pool.reserve(mixture.size());
    for (const auto& c : mixture.components) {
        if (c.weight >= prune_threshold) pool.push_back(c);
    }
    if (pool.empty()) {
        // Keep the single strongest component rather than returning an
        // empty density.
        pool.push_back(*std::max_element(
            mixture.components.begin(), mixture.components.end(),
            [](const auto& a, const auto& b) { return a.weight < b.weight; }));
    }

    const double merge_dist_sq = merge_distance * merge_distance;
    std::vector<GaussianComponent> merged;
    std::vector<bool> used(pool.size(), false);
    for (std::size_t n_done = 0; n_done < pool.size();) {
        // Dominant unused component leads the next cluster.
        std::size_t lead = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!used[i] && (lead == pool.size() || pool[i].weight > pool[lead].weight)) lead = i;
        }
        Eigen::LLT<Mat4> llt(pool[lead].covariance);
        std::vector<GaussianComponent> cluster;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            double dist_sq = 0.0;
            if (i != lead) {
                if (llt.info() != Eigen::Success) continue;
                const Vec4 d = pool[i].mean - pool[lead].mean;
                dist_sq = llt.matrixL().solve(d).squaredNorm();
            }
            if (i == lead || dist_sq < merge_dist_sq) {
                cluster.push_back(pool[i]);
                used[i] = true;
                ++n_done;
            }
        }
        merged.push_back(cluster.size() == 1 ? cluster.front() : moment_match(cluster));
    }

    std::stable_sort(merged.begin(), merged.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (static_cast<int>(merged.size()) > max_components) {
        merged.resize(static_cast<std::size_t>(max_components));
    }
    return GaussianMixture(std::move(merged)).normalized();
}

} // namespace grouptrack

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "grouptrack/assignment.hpp"
#include "grouptrack/errors.hpp"
#include "grouptrack/lmb.hpp"
#include "grouptrack/models.hpp"

namespace grouptrack {

/// Predicted density: surviving tracks followed by the newborn tracks of
/// the current step, with disjoint labels.
struct PredictedLmb {
    LmbDensity density;
};

struct UpdateParams {
    int max_hypotheses = 1000;      // ranked-assignment budget K
    double existence_prune = 1e-4;  // drop posterior tracks below this r
    double gm_prune_weight = 1e-5;
    double gm_merge_distance = 4.0;
    int gm_max_components = 100;
    double log_weight_floor = 60.0; // discard hypotheses more than this many nats below the best

    /// Settings that leave the posterior un-truncated (used when
    /// comparing against the exhaustive route).
    static UpdateParams exact(int max_hypotheses) {
        UpdateParams p;
        p.max_hypotheses = max_hypotheses;
        p.existence_prune = 0.0;
        p.gm_prune_weight = 0.0;
        p.gm_merge_distance = 0.0;
        p.gm_max_components = std::numeric_limits<int>::max();
        p.log_weight_floor = std::numeric_limits<double>::infinity();
        return p;
    }
};

struct UpdateDiagnostics {
    std::vector<GlmbHypothesis> top_hypotheses; // best-first, normalized log weights
    std::size_t hypotheses_enumerated = 0;
};

/// Prediction step: survivors keep their identity, existence scales by
/// the survival probability, and the spatial density propagates by the
/// independent model (ungrouped) or by the group-center shift (grouped,
/// using the prior center). Group centers advance deterministically.
/// Newborn tracks are appended; clashing labels raise InvariantViolation.
inline PredictedLmb predict(const LmbDensity& posterior, const MotionModel& mm,
                            const BirthModel& bm, double p_survival, int time) {
    if (!validate_distinct_labels(posterior)) {
        throw InvariantViolation("predict: posterior has duplicate labels");
    }
    PredictedLmb out;
    out.density.tracks.reserve(posterior.size() + bm.components.size());
    for (const auto& t : posterior.tracks) {
        BernoulliTrack s;
        s.existence = p_survival * t.existence;
        s.label = t.label;
        if (t.label.grouped()) {
            s.density = predict_in_group(t.density, t.label.group_center, mm);
            s.label.group_center = predict_group_center(t.label.group_center, mm);
        } else {
            s.density = predict_independent(t.density, mm);
        }
        out.density.tracks.push_back(std::move(s));
    }
    for (auto& b : birth_tracks(bm, time)) {
        out.density.tracks.push_back(std::move(b));
    }
    if (!validate_distinct_labels(out.density)) {
        throw InvariantViolation("predict: birth labels clash with surviving tracks");
    }
    return out;
}

namespace detail {

inline double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

/// Per-track association ingredients for one measurement set.
struct UpdateCache {
    std::vector<double> log_miss;            // log(r (1 - pD))
    std::vector<double> log_nonexist;        // log(1 - r)
    Eigen::MatrixXd log_detect;              // log(r pD eta_ij / kappa)
    std::vector<std::vector<GaussianMixture>> detected_posterior; // [i][j]
};

inline UpdateCache build_update_cache(const LmbDensity& predicted, const std::vector<Vec2>& Z,
                                      const SensorModel& sm) {
    const int n = static_cast<int>(predicted.size());
    const int m = static_cast<int>(Z.size());
    // A zero clutter intensity only floors the log; hypotheses that leave
    // measurements unassigned then vanish in the normalization.
    const double log_kappa = std::log(std::max(sm.clutter_intensity(), 1e-300));

    UpdateCache cache;
    cache.log_miss.resize(static_cast<std::size_t>(n));
    cache.log_nonexist.resize(static_cast<std::size_t>(n));
    cache.log_detect.setConstant(n, m, -std::numeric_limits<double>::infinity());
    cache.detected_posterior.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        const auto& t = predicted.tracks[static_cast<std::size_t>(i)];
        const double r = t.existence;
        cache.log_miss[static_cast<std::size_t>(i)] = safe_log(r) + safe_log(1.0 - sm.p_detect);
        cache.log_nonexist[static_cast<std::size_t>(i)] = safe_log(1.0 - r);
        cache.detected_posterior[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m));
        if (r <= 0.0 || sm.p_detect <= 0.0) continue;
        for (int j = 0; j < m; ++j) {
            const auto mu = measurement_loglikelihood(Z[static_cast<std::size_t>(j)], t.density, sm);
            cache.log_detect(i, j) =
                std::log(r) + std::log(sm.p_detect) + mu.log_eta - log_kappa;
            cache.detected_posterior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                mu.posterior;
        }
    }
    return cache;
}

/// Marginalize a weighted hypothesis list into per-track posteriors.
/// thetas[h][i]: -1 nonexistent, 0 miss, j >= 1 measurement (1-based).
inline LmbDensity marginalize(const LmbDensity& predicted, const UpdateCache& cache,
                              const std::vector<std::vector<int>>& thetas,
                              const std::vector<double>& log_weights, const UpdateParams& params) {
    const int n = static_cast<int>(predicted.size());
    const int m = static_cast<int>(cache.log_detect.cols());

    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) max_lw = std::max(max_lw, lw);
    if (!std::isfinite(max_lw)) {
        throw DegenerateUpdate("update: all hypothesis weights are zero");
    }
    double norm = 0.0;
    for (double lw : log_weights) norm += std::exp(lw - max_lw);
    const double log_norm = max_lw + std::log(norm);

    // Option-weight accumulation: column 0 = miss, 1..m = measurements.
    Eigen::MatrixXd option_weight = Eigen::MatrixXd::Zero(n, m + 1);
    for (std::size_t h = 0; h < thetas.size(); ++h) {
        const double w = std::exp(log_weights[h] - log_norm);
        for (int i = 0; i < n; ++i) {
            const int code = thetas[h][static_cast<std::size_t>(i)];
            if (code >= 0) option_weight(i, code) += w;
        }
    }

    LmbDensity out;
    out.tracks.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double r = option_weight.row(i).sum();
        if (!(r > 0.0)) continue;
        r = std::min(r, 1.0);

        GaussianMixture mix;
        const auto append = [&](const GaussianMixture& src, double scale) {
            for (const auto& c : src.components) {
                if (c.weight * scale <= 0.0) continue;
                mix.components.push_back(GaussianComponent{c.weight * scale, c.mean, c.covariance});
            }
        };
        if (option_weight(i, 0) > 0.0) {
            append(predicted.tracks[static_cast<std::size_t>(i)].density, option_weight(i, 0));
        }
        for (int j = 1; j <= m; ++j) {
            if (option_weight(i, j) > 0.0) {
                append(cache.detected_posterior[static_cast<std::size_t>(i)]
                                               [static_cast<std::size_t>(j - 1)],
                       option_weight(i, j));
            }
        }

        BernoulliTrack t;
        t.existence = r;
        t.label = predicted.tracks[static_cast<std::size_t>(i)].label;
        t.density = gm_reduce(mix.normalized(), params.gm_prune_weight, params.gm_merge_distance,
                              params.gm_max_components);
        if (t.existence >= params.existence_prune) {
            out.tracks.push_back(std::move(t));
        }
    }
    return out;
}

} // namespace detail

/// Measurement update. Expands the predicted density into its K best
/// association hypotheses by ranked assignment, then matches the first
/// moment back to an LMB: r is the total weight of hypotheses containing
/// the track, the spatial density the weight-mixed per-association
/// posteriors. Group fields pass through untouched.
inline LmbDensity update(const PredictedLmb& predicted, const std::vector<Vec2>& Z,
                         const SensorModel& sm, const UpdateParams& params,
                         UpdateDiagnostics* diagnostics = nullptr) {
    if (params.max_hypotheses < 1) {
        throw InvariantViolation("update: hypothesis budget must be at least 1");
    }
    const int n = static_cast<int>(predicted.density.size());
    const int m = static_cast<int>(Z.size());
    if (sm.clutter_intensity() <= 0.0 && m > n) {
        throw DegenerateUpdate(
            "update: measurements cannot be explained with zero clutter intensity");
    }
    if (n == 0) {
        if (diagnostics) {
            diagnostics->top_hypotheses = {GlmbHypothesis{{}, {}, 0.0}};
            diagnostics->hypotheses_enumerated = 1;
        }
        return {};
    }

    const auto cache = detail::build_update_cache(predicted.density, Z, sm);

    AssociationProblem problem;
    problem.detection_cost = -cache.log_detect;
    problem.miss_cost.resize(n);
    problem.nonexist_cost.resize(n);
    problem.track_index.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        problem.miss_cost(i) = -cache.log_miss[static_cast<std::size_t>(i)];
        problem.nonexist_cost(i) = -cache.log_nonexist[static_cast<std::size_t>(i)];
        problem.track_index.push_back(
            predicted.density.tracks[static_cast<std::size_t>(i)].label.track_label());
    }

    const auto ranked =
        ranked_assignments(problem, params.max_hypotheses, params.log_weight_floor);
    if (ranked.empty()) {
        throw DegenerateUpdate("update: no feasible association hypothesis");
    }

    std::vector<std::vector<int>> thetas;
    std::vector<double> log_weights;
    thetas.reserve(ranked.size());
    log_weights.reserve(ranked.size());
    for (const auto& sol : ranked) {
        thetas.push_back(sol.theta);
        log_weights.push_back(-sol.cost);
    }

    if (diagnostics) {
        diagnostics->hypotheses_enumerated = ranked.size();
        diagnostics->top_hypotheses.clear();
        double max_lw = -std::numeric_limits<double>::infinity();
        for (double lw : log_weights) max_lw = std::max(max_lw, lw);
        double norm = 0.0;
        for (double lw : log_weights) norm += std::exp(lw - max_lw);
        const double log_norm = max_lw + std::log(norm);
        const std::size_t top = std::min<std::size_t>(10, ranked.size());
        for (std::size_t h = 0; h < top; ++h) {
            GlmbHypothesis hyp;
            hyp.log_weight = log_weights[h] - log_norm;
            for (int i = 0; i < n; ++i) {
                if (thetas[h][static_cast<std::size_t>(i)] >= 0) {
                    hyp.labels.push_back(problem.track_index[static_cast<std::size_t>(i)]);
                    hyp.theta.push_back(thetas[h][static_cast<std::size_t>(i)]);
                }
            }
            diagnostics->top_hypotheses.push_back(std::move(hyp));
        }
    }

    return detail::marginalize(predicted.density, cache, thetas, log_weights, params);
}

/// Exhaustive reference update: enumerates every existence subset and
/// every injective association, with exact marginalization and no
/// truncation or reduction of any kind. Guarded to small problems.
inline LmbDensity update_exhaustive(const PredictedLmb& predicted, const std::vector<Vec2>& Z,
                                    const SensorModel& sm) {
    const int n = static_cast<int>(predicted.density.size());
    const int m = static_cast<int>(Z.size());
    if (n > 8 || m > 8) {
        throw InvariantViolation("update_exhaustive: refusing problems beyond 8 tracks / 8 measurements");
    }
    if (sm.clutter_intensity() <= 0.0 && m > n) {
        throw DegenerateUpdate(
            "update_exhaustive: measurements cannot be explained with zero clutter intensity");
    }
    if (n == 0) return {};

    const auto cache = detail::build_update_cache(predicted.density, Z, sm);

    std::vector<std::vector<int>> thetas;
    std::vector<double> log_weights;
    std::vector<int> current(static_cast<std::size_t>(n), -1);
    std::vector<char> measurement_used(static_cast<std::size_t>(m), 0);

    const std::function<void(int, double)> enumerate = [&](int i, double logw) {
        if (i == n) {
            thetas.push_back(current);
            log_weights.push_back(logw);
            return;
        }
        current[static_cast<std::size_t>(i)] = -1;
        enumerate(i + 1, logw + cache.log_nonexist[static_cast<std::size_t>(i)]);
        current[static_cast<std::size_t>(i)] = 0;
        enumerate(i + 1, logw + cache.log_miss[static_cast<std::size_t>(i)]);
        for (int j = 0; j < m; ++j) {
            if (measurement_used[static_cast<std::size_t>(j)]) continue;
            measurement_used[static_cast<std::size_t>(j)] = 1;
            current[static_cast<std::size_t>(i)] = j + 1;
            enumerate(i + 1, logw + cache.log_detect(i, j));
            measurement_used[static_cast<std::size_t>(j)] = 0;
        }
        current[static_cast<std::size_t>(i)] = -1;
    };
    enumerate(0, 0.0);

    UpdateParams exact = UpdateParams::exact(1);
    return detail::marginalize(predicted.density, cache, thetas, log_weights, exact);
}

} // namespace grouptrack

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "grouptrack/estimate.hpp"
#include "grouptrack/filter.hpp"
#include "grouptrack/grouping.hpp"
#include "grouptrack/metrics.hpp"
#include "grouptrack/models.hpp"

namespace grouptrack {

struct TruthTargetConfig {
    Vec4 initial = Vec4::Zero(); // velocity entries are overridden for grouped targets
    int birth_step = 1;
    int death_step = 100; // inclusive last alive step
};

struct TruthGroupConfig {
    std::vector<int> members; // 1-based target ids
    Vec2 velocity = Vec2::Zero();
};

/// True-trajectory synthesis parameters. Grouped targets follow their
/// group center with offsets that shrink linearly from the birth layout
/// to formation_scale times it by formation_step, and stay fixed
/// afterwards; they are reported as grouped from formation_step on.
struct TruthConfig {
    std::vector<TruthTargetConfig> targets;
    std::vector<TruthGroupConfig> groups;
    int formation_step = 16;
    double formation_scale = 0.45;
    double process_noise_std = 0.0; // center / free-target acceleration noise
};

struct ScenarioConfig {
    // run
    int steps = 100;
    double dt = 1.0;
    int mc_trials = 100;
    std::uint64_t base_seed = 12345;
    // motion + survival
    double process_noise_std = 5.0;
    double p_survival = 0.99;
    // models
    BirthModel birth;
    SensorModel sensor;
    // filter tuning
    UpdateParams filter_params;
    // grouping
    double group_threshold_m = 100.0;
    // evaluation
    OspaParams ospa_params;
    // truth
    TruthConfig truth;

    [[nodiscard]] MotionModel motion_model() const { return MotionModel(dt, process_noise_std); }

    static ScenarioConfig defaults();
    void validate() const; // throws ConfigError with a field-level message
};

inline ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig cfg;
    const std::vector<Vec4> birth_means = {
        Vec4(-800, 0, 600, 0),  Vec4(-800, 0, -200, 0), Vec4(-850, 0, -200, 0),
        Vec4(-750, 0, -200, 0), Vec4(-650, 0, 670, 0),  Vec4(-750, 0, 530, 0)};
    for (const auto& m : birth_means) {
        cfg.birth.components.push_back(
            BirthComponent{0.03, m, 100.0 * Mat4::Identity()});
    }
    // Truth targets sit on the birth locations; ids 1-3 form the upper
    // cluster, 4-6 the lower one.
    const auto target = [](double px, double vx, double py, double vy) {
        TruthTargetConfig t;
        t.initial = Vec4(px, vx, py, vy);
        t.birth_step = 1;
        t.death_step = 100;
        return t;
    };
    cfg.truth.targets = {
        target(-800, 10, 600, 2),   target(-650, 10, 670, 2),   target(-750, 10, 530, 2),
        target(-800, 12, -200, -2), target(-850, 12, -200, -2), target(-750, 12, -200, -2)};
    cfg.truth.groups = {TruthGroupConfig{{1, 2, 3}, Vec2(10, 2)},
                        TruthGroupConfig{{4, 5, 6}, Vec2(12, -2)}};
    return cfg;
}

inline void ScenarioConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (steps < 1) fail("run.steps must be >= 1");
    if (!(dt > 0.0)) fail("run.dt must be positive");
    if (mc_trials < 1) fail("run.mc_trials must be >= 1");
    if (process_noise_std < 0.0) fail("motion.process_noise_std must be nonnegative");
    if (p_survival < 0.0 || p_survival > 1.0) fail("motion.survival_probability must lie in [0, 1]");
    for (std::size_t i = 0; i < birth.components.size(); ++i) {
        const auto& b = birth.components[i];
        if (b.existence < 0.0 || b.existence > 1.0)
            fail("birth.components[" + std::to_string(i) + "].existence must lie in [0, 1]");
        Eigen::LLT<Mat4> llt(b.covariance);
        if (llt.info() != Eigen::Success)
            fail("birth.components[" + std::to_string(i) + "].covariance must be positive definite");
    }
    if (!(sensor.sigma_r > 0.0)) fail("sensor.noise_std must be positive");
    if (sensor.p_detect < 0.0 || sensor.p_detect > 1.0)
        fail("sensor.detection_probability must lie in [0, 1]");
    if (sensor.clutter_rate < 0.0) fail("sensor.clutter_rate must be nonnegative");
    if (!(sensor.region.x_max > sensor.region.x_min) ||
        !(sensor.region.y_max > sensor.region.y_min))
        fail("sensor.region must be a nonempty rectangle");
    if (filter_params.max_hypotheses < 1) fail("filter.max_hypotheses must be >= 1");
    if (filter_params.existence_prune < 0.0) fail("filter.existence_prune must be nonnegative");
    if (filter_params.gm_prune_weight < 0.0) fail("filter.gm_prune_weight must be nonnegative");
    if (filter_params.gm_merge_distance < 0.0) fail("filter.gm_merge_distance must be nonnegative");
    if (filter_params.gm_max_components < 1) fail("filter.gm_max_components must be >= 1");
    if (group_threshold_m < 0.0) fail("grouping.group_threshold_m must be nonnegative");
    if (ospa_params.order < 1.0) fail("ospa.order must be >= 1");
    if (!(ospa_params.cutoff > 0.0)) fail("ospa.cutoff must be positive");
    if (truth.formation_step < 1) fail("truth.formation_step must be >= 1");
    if (!(truth.formation_scale > 0.0)) fail("truth.formation_scale must be positive");
    if (truth.process_noise_std < 0.0) fail("truth.process_noise_std must be nonnegative");
    std::vector<char> claimed(truth.targets.size(), 0);
    for (std::size_t g = 0; g < truth.groups.size(); ++g) {
        if (truth.groups[g].members.size() < 2)
            fail("truth.groups[" + std::to_string(g) + "] needs at least two members");
        for (int id : truth.groups[g].members) {
            if (id < 1 || id > static_cast<int>(truth.targets.size()))
                fail("truth.groups[" + std::to_string(g) + "] refers to an unknown target");
            if (claimed[static_cast<std::size_t>(id - 1)])
                fail("truth.groups must be disjoint; target " + std::to_string(id) + " appears twice");
            claimed[static_cast<std::size_t>(id - 1)] = 1;
        }
    }
    for (std::size_t i = 0; i < truth.targets.size(); ++i) {
        const auto& t = truth.targets[i];
        if (t.birth_step < 1 || t.birth_step > steps)
            fail("truth.targets[" + std::to_string(i) + "].birth_step outside [1, steps]");
        if (t.death_step < t.birth_step || t.death_step > steps)
            fail("truth.targets[" + std::to_string(i) + "].death_step outside [birth_step, steps]");
    }
}

struct TruthEntry {
    int target_id = 0; // 1-based
    Vec4 state = Vec4::Zero();
    int group_id = 0; // 0 = ungrouped at this step
};

struct TruthGroupCenter {
    int group_id = 0;
    Vec4 center = Vec4::Zero();
    bool active = false; // formation complete
};

struct GroundTruth {
    int steps = 0;
    std::vector<std::vector<TruthEntry>> entries;        // index 0 = step 1
    std::vector<std::vector<TruthGroupCenter>> centers;  // index 0 = step 1

    [[nodiscard]] const std::vector<TruthEntry>& at_step(int step) const {
        return entries[static_cast<std::size_t>(step - 1)];
    }
    [[nodiscard]] std::vector<Vec2> positions(int step) const {
        std::vector<Vec2> out;
        for (const auto& e : at_step(step)) out.push_back(position_of(e.state));
        return out;
    }
    [[nodiscard]] int count(int step) const { return static_cast<int>(at_step(step).size()); }
    [[nodiscard]] int group_count(int step) const {
        int n = 0;
        for (const auto& c : centers[static_cast<std::size_t>(step - 1)]) {
            if (!c.active) continue;
            int alive = 0;
            for (const auto& e : at_step(step)) {
                if (e.group_id == c.group_id) ++alive;
            }
            if (alive >= 2) ++n;
        }
        return n;
    }
};

/// Synthesize true trajectories. Group centers evolve by the
/// constant-velocity model with optional acceleration noise; members ride
/// the center at their (shrinking, then fixed) offsets, so co-group
/// offsets are exactly constant once the formation is complete.
/// Generation-time checks: every state inside the surveillance region,
/// every grouped member within the grouping gate of its center.
template <typename Rng>
GroundTruth generate_truth(const ScenarioConfig& cfg, Rng& rng) {
    const auto& tc = cfg.truth;
    const int steps = cfg.steps;
    const MotionModel motion(cfg.dt, tc.process_noise_std);
    std::normal_distribution<double> n01(0.0, 1.0);
    const auto noise = [&]() -> Vec4 {
        if (tc.process_noise_std <= 0.0) return Vec4::Zero();
        Eigen::Matrix<double, 4, 2> G = Eigen::Matrix<double, 4, 2>::Zero();
        G(0, 0) = 0.5 * cfg.dt * cfg.dt;
        G(1, 0) = cfg.dt;
        G(2, 1) = 0.5 * cfg.dt * cfg.dt;
        G(3, 1) = cfg.dt;
        return G * Vec2(tc.process_noise_std * n01(rng), tc.process_noise_std * n01(rng));
    };

    const int T = tc.formation_step;
    const auto scale_at = [&](int step) {
        if (T <= 1 || step >= T) return tc.formation_scale;
        const double progress = static_cast<double>(step - 1) / static_cast<double>(T - 1);
        return 1.0 + (tc.formation_scale - 1.0) * progress;
    };

    // Group center paths and member offsets at birth.
    std::vector<std::vector<Vec4>> center_path(tc.groups.size());
    std::vector<int> member_group(tc.targets.size(), -1);
    std::vector<Vec2> member_offset(tc.targets.size(), Vec2::Zero());
    for (std::size_t g = 0; g < tc.groups.size(); ++g) {
        Vec2 centroid = Vec2::Zero();
        for (int id : tc.groups[g].members) {
            centroid += position_of(tc.targets[static_cast<std::size_t>(id - 1)].initial);
        }
        centroid /= static_cast<double>(tc.groups[g].members.size());
        for (int id : tc.groups[g].members) {
            member_group[static_cast<std::size_t>(id - 1)] = static_cast<int>(g);
            member_offset[static_cast<std::size_t>(id - 1)] =
                position_of(tc.targets[static_cast<std::size_t>(id - 1)].initial) - centroid;
        }
        Vec4 c;
        c << centroid(0), tc.groups[g].velocity(0), centroid(1), tc.groups[g].velocity(1);
        center_path[g].push_back(c);
        for (int k = 2; k <= steps; ++k) {
            center_path[g].push_back(motion.F * center_path[g].back() + noise());
        }
    }

    // Free (ungrouped) target paths.
    std::vector<std::vector<Vec4>> free_path(tc.targets.size());
    for (std::size_t i = 0; i < tc.targets.size(); ++i) {
        if (member_group[i] >= 0) continue;
        const auto& t = tc.targets[i];
        free_path[i].assign(static_cast<std::size_t>(steps), Vec4::Zero());
        Vec4 x = t.initial;
        for (int k = t.birth_step; k <= t.death_step; ++k) {
            free_path[i][static_cast<std::size_t>(k - 1)] = x;
            x = motion.F * x + noise();
        }
    }

    GroundTruth truth;
    truth.steps = steps;
    truth.entries.resize(static_cast<std::size_t>(steps));
    truth.centers.resize(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) {
        const double s = scale_at(k);
        const double s_next = scale_at(std::min(k + 1, steps));
        for (std::size_t i = 0; i < tc.targets.size(); ++i) {
            const auto& t = tc.targets[i];
            if (k < t.birth_step || k > t.death_step) continue;
            TruthEntry e;
            e.target_id = static_cast<int>(i) + 1;
            if (member_group[i] >= 0) {
                const Vec4& c = center_path[static_cast<std::size_t>(member_group[i])]
                                           [static_cast<std::size_t>(k - 1)];
                const Vec2 offset = s * member_offset[i];
                const Vec2 offset_rate = ((s_next - s) / cfg.dt) * member_offset[i];
                e.state << c(0) + offset(0), c(1) + offset_rate(0), c(2) + offset(1),
                    c(3) + offset_rate(1);
                e.group_id = (k >= T) ? member_group[i] + 1 : 0;
            } else {
                e.state = free_path[i][static_cast<std::size_t>(k - 1)];
            }
            truth.entries[static_cast<std::size_t>(k - 1)].push_back(e);
        }
        for (std::size_t g = 0; g < tc.groups.size(); ++g) {
            truth.centers[static_cast<std::size_t>(k - 1)].push_back(TruthGroupCenter{
                static_cast<int>(g) + 1, center_path[g][static_cast<std::size_t>(k - 1)], k >= T});
        }
    }

    // Generation-time invariants.
    for (int k = 1; k <= steps; ++k) {
        for (const auto& e : truth.at_step(k)) {
            if (!cfg.sensor.region.contains(position_of(e.state))) {
                throw InvariantViolation("generate_truth: target " + std::to_string(e.target_id) +
                                         " leaves the surveillance region at step " +
                                         std::to_string(k));
            }
            if (e.group_id != 0) {
                const auto& cs = truth.centers[static_cast<std::size_t>(k - 1)];
                for (const auto& c : cs) {
                    if (c.group_id == e.group_id &&
                        (position_of(e.state) - position_of(c.center)).norm() >
                            cfg.group_threshold_m) {
                        throw InvariantViolation(
                            "generate_truth: grouped target " + std::to_string(e.target_id) +
                            " drifts beyond the grouping gate at step " + std::to_string(k));
                    }
                }
            }
        }
    }
    return truth;
}

/// Detection-plus-clutter measurement simulation. Each alive target is
/// detected independently with probability p_detect and then measured
/// with isotropic Gaussian noise; Poisson clutter is appended and the
/// per-step order shuffled.
template <typename Rng>
std::vector<std::vector<Vec2>> generate_measurements(const GroundTruth& truth,
                                                     const SensorModel& sm, Rng& rng) {
    std::vector<std::vector<Vec2>> out(static_cast<std::size_t>(truth.steps));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int k = 1; k <= truth.steps; ++k) {
        auto& scan = out[static_cast<std::size_t>(k - 1)];
        for (const auto& e : truth.at_step(k)) {
            if (u01(rng) <= sm.p_detect) {
                const Vec2 z = position_of(e.state) + sm.sigma_r * Vec2(n01(rng), n01(rng));
                scan.push_back(z);
            }
        }
        for (const auto& c : sample_clutter(sm, rng)) scan.push_back(c);
        std::shuffle(scan.begin(), scan.end(), rng);
    }
    return out;
}

enum class FilterMode { augmented, baseline };

inline const char* to_string(FilterMode mode) {
    return mode == FilterMode::augmented ? "augmented" : "baseline";
}

struct StepRecord {
    int step = 0;
    double ospa = 0.0;
    int n_true = 0;
    int n_hat = 0;
    int groups_true = 0;
    int groups_hat = 0;
};

struct TrialResult {
    std::vector<StepRecord> records;
    double wall_seconds = 0.0;
    // Detail retained when requested: full estimates and, optionally,
    // per-step posterior densities and association diagnostics.
    std::vector<StepEstimate> estimates;
    std::vector<LmbDensity> posteriors;
    std::vector<UpdateDiagnostics> diagnostics;
};

struct TrialDetailOptions {
    bool keep_estimates = false;
    bool keep_posteriors = false;
    bool keep_diagnostics = false;
};

/// One filter pass over externally generated data.
inline TrialResult run_trial_on(const ScenarioConfig& cfg, const GroundTruth& truth,
                                const std::vector<std::vector<Vec2>>& measurements,
                                FilterMode mode, const TrialDetailOptions& detail = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    const MotionModel motion = cfg.motion_model();
    TrialResult result;
    result.records.reserve(static_cast<std::size_t>(cfg.steps));

    LmbDensity posterior;
    int group_counter = 1;
    for (int k = 1; k <= cfg.steps; ++k) {
        StepEstimate est;
        try {
            const PredictedLmb predicted = predict(posterior, motion, cfg.birth, cfg.p_survival, k);
            UpdateDiagnostics diag;
            posterior = update(predicted, measurements[static_cast<std::size_t>(k - 1)], cfg.sensor,
                               cfg.filter_params, detail.keep_diagnostics ? &diag : nullptr);
            if (detail.keep_diagnostics) result.diagnostics.push_back(std::move(diag));
            if (mode == FilterMode::augmented) {
                auto [grouped, counter] =
                    update_group_info(posterior, cfg.group_threshold_m, group_counter, cfg.dt);
                posterior = std::move(grouped);
                group_counter = counter;
            }
            est = make_step_estimate(posterior);
        } catch (const DegenerateUpdate& e) {
            throw DegenerateUpdate("step " + std::to_string(k) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("step " + std::to_string(k) + ": " + e.what());
        }

        std::vector<Vec2> estimated_positions;
        estimated_positions.reserve(est.targets.size());
        for (const auto& [state, label] : est.targets) {
            (void)label;
            estimated_positions.push_back(position_of(state));
        }

        StepRecord rec;
        rec.step = k;
        rec.ospa = ospa(estimated_positions, truth.positions(k), cfg.ospa_params);
        rec.n_true = truth.count(k);
        rec.n_hat = est.n_hat;
        rec.groups_true = truth.group_count(k);
        rec.groups_hat = est.group_count;
        result.records.push_back(rec);

        if (detail.keep_estimates) result.estimates.push_back(std::move(est));
        if (detail.keep_posteriors) result.posteriors.push_back(posterior);
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

/// One complete tracking run. The measurement stream is derived from the
/// seed alone, so both modes see identical data for the same seed. The
/// baseline mode never runs the group-information step: every label
/// keeps group id 0 and prediction reduces to the independent model.
inline TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t seed, FilterMode mode,
                             const TrialDetailOptions& detail = {}) {
    std::mt19937_64 rng(seed);
    const GroundTruth truth = generate_truth(cfg, rng);
    const auto measurements = generate_measurements(truth, cfg.sensor, rng);
    return run_trial_on(cfg, truth, measurements, mode, detail);
}

struct ModeAggregate {
    Eigen::VectorXd mean_ospa;
    Eigen::VectorXd mean_n_hat;
    Eigen::VectorXd mean_abs_card_err;
    Eigen::VectorXd frac_card_exact;
    Eigen::VectorXd mean_groups_hat;
    Eigen::VectorXd frac_groups_exact;
    double total_wall_seconds = 0.0;
};

struct McResult {
    Eigen::VectorXi n_true;      // per step, from the first trial
    Eigen::VectorXi groups_true; // per step, from the first trial
    ModeAggregate augmented;
    ModeAggregate baseline;
    std::vector<double> trial_seconds; // summed over both modes per trial
    TrialResult detail_augmented;      // first trial, with estimates retained
    TrialResult detail_baseline;
};

/// Monte-Carlo study over seeds base_seed .. base_seed + mc_trials - 1.
/// Both filter modes of a trial consume the identical measurement
/// stream; aggregation is a deterministic per-step average over trials.
inline McResult monte_carlo(const ScenarioConfig& cfg) {
    const int steps = cfg.steps;
    const int trials = cfg.mc_trials;
    McResult mc;
    mc.n_true.setZero(steps);
    mc.groups_true.setZero(steps);
    for (ModeAggregate* agg : {&mc.augmented, &mc.baseline}) {
        agg->mean_ospa.setZero(steps);
        agg->mean_n_hat.setZero(steps);
        agg->mean_abs_card_err.setZero(steps);
        agg->frac_card_exact.setZero(steps);
        agg->mean_groups_hat.setZero(steps);
        agg->frac_groups_exact.setZero(steps);
    }

    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
        std::mt19937_64 rng(seed);
        const GroundTruth truth = generate_truth(cfg, rng);
        const auto measurements = generate_measurements(truth, cfg.sensor, rng);

        TrialDetailOptions detail;
        detail.keep_estimates = (trial == 0);
        TrialResult aug;
        TrialResult base;
        try {
            aug = run_trial_on(cfg, truth, measurements, FilterMode::augmented, detail);
            base = run_trial_on(cfg, truth, measurements, FilterMode::baseline, detail);
        } catch (const DegenerateUpdate& e) {
            throw DegenerateUpdate("trial " + std::to_string(trial) + ", " + e.what());
        } catch (const Error& e) {
            throw Error("trial " + std::to_string(trial) + ", " + e.what());
        }

        const auto accumulate = [&](ModeAggregate& agg, const TrialResult& res) {
            for (int k = 0; k < steps; ++k) {
                const auto& rec = res.records[static_cast<std::size_t>(k)];
                agg.mean_ospa(k) += rec.ospa;
                agg.mean_n_hat(k) += rec.n_hat;
                agg.mean_abs_card_err(k) += std::abs(rec.n_hat - rec.n_true);
                agg.frac_card_exact(k) += (rec.n_hat == rec.n_true) ? 1.0 : 0.0;
                agg.mean_groups_hat(k) += rec.groups_hat;
                agg.frac_groups_exact(k) += (rec.groups_hat == rec.groups_true) ? 1.0 : 0.0;
            }
            agg.total_wall_seconds += res.wall_seconds;
        };
        accumulate(mc.augmented, aug);
        accumulate(mc.baseline, base);
        mc.trial_seconds.push_back(aug.wall_seconds + base.wall_seconds);

        if (trial == 0) {
            for (int k = 0; k < steps; ++k) {
                mc.n_true(k) = aug.records[static_cast<std::size_t>(k)].n_true;
                mc.groups_true(k) = aug.records[static_cast<std::size_t>(k)].groups_true;
            }
            mc.detail_augmented = std::move(aug);
            mc.detail_baseline = std::move(base);
        }
    }

    const double inv = 1.0 / static_cast<double>(trials);
    for (ModeAggregate* agg : {&mc.augmented, &mc.baseline}) {
        agg->mean_ospa *= inv;
        agg->mean_n_hat *= inv;
        agg->mean_abs_card_err *= inv;
        agg->frac_card_exact *= inv;
        agg->mean_groups_hat *= inv;
        agg->frac_groups_exact *= inv;
    }
    return mc;
}

} // namespace grouptrack

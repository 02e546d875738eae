#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "grouptrack/errors.hpp"
#include "grouptrack/lmb.hpp"

namespace grouptrack {

struct GroupSummary {
    int group_id = 0;
    std::vector<TrackLabel> members;
    Vec4 center = Vec4::Zero();
};

/// Point estimate extracted from one posterior: MAP target count, the
/// selected tracks' means and labels, and the group-level summary.
struct StepEstimate {
    int n_hat = 0;
    std::vector<std::pair<Vec4, AugmentedLabel>> targets;
    int group_count = 0;
    std::vector<GroupSummary> groups;
    bool clamped = false; // extraction requested more tracks than available
};

/// Mode of the posterior cardinality distribution; ties break toward the
/// smaller count.
inline int map_cardinality(const LmbDensity& density) {
    const Eigen::VectorXd pmf = cardinality_distribution(density);
    int best = 0;
    for (int nn = 1; nn < pmf.size(); ++nn) {
        if (pmf(nn) > pmf(best)) best = nn;
    }
    return best;
}

struct ExtractedTargets {
    std::vector<std::pair<Vec4, AugmentedLabel>> targets;
    bool clamped = false;
};

/// The n tracks of largest existence probability, each paired with its
/// mixture mean. Ties break by ascending (birth_time, birth_index).
/// Requests beyond the track count return everything and set `clamped`.
inline ExtractedTargets extract_targets(const LmbDensity& density, int n) {
    ExtractedTargets out;
    if (n <= 0) return out;
    std::vector<int> order(density.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ta = density.tracks[static_cast<std::size_t>(a)];
        const auto& tb = density.tracks[static_cast<std::size_t>(b)];
        if (ta.existence != tb.existence) return ta.existence > tb.existence;
        return ta.label.track_label() < tb.label.track_label();
    });
    if (n > static_cast<int>(density.size())) {
        out.clamped = true;
        n = static_cast<int>(density.size());
    }
    out.targets.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto& t = density.tracks[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        out.targets.emplace_back(t.density.mean(), t.label);
    }
    return out;
}

/// Group summary over extracted targets: one group per distinct nonzero
/// group id, listing member identities and the shared center. Members
/// disagreeing on their center beyond 1e-6 raise InvariantViolation.
inline std::pair<int, std::vector<GroupSummary>> summarize_groups(
    const std::vector<std::pair<Vec4, AugmentedLabel>>& targets) {
    std::map<int, GroupSummary> by_id;
    for (const auto& [state, label] : targets) {
        (void)state;
        if (label.group_id == 0) continue;
        auto [it, inserted] = by_id.try_emplace(label.group_id);
        if (inserted) {
            it->second.group_id = label.group_id;
            it->second.center = label.group_center;
        } else if ((it->second.center - label.group_center).norm() > 1e-6) {
            throw InvariantViolation("summarize_groups: members of one group disagree on its center");
        }
        it->second.members.push_back(label.track_label());
    }
    std::vector<GroupSummary> groups;
    groups.reserve(by_id.size());
    for (auto& [id, g] : by_id) {
        (void)id;
        std::sort(g.members.begin(), g.members.end());
        groups.push_back(std::move(g));
    }
    return {static_cast<int>(groups.size()), groups};
}

/// Full extraction pipeline for one step.
inline StepEstimate make_step_estimate(const LmbDensity& density) {
    StepEstimate est;
    est.n_hat = map_cardinality(density);
    auto extracted = extract_targets(density, est.n_hat);
    est.targets = std::move(extracted.targets);
    est.clamped = extracted.clamped;
    auto [count, groups] = summarize_groups(est.targets);
    est.group_count = count;
    est.groups = std::move(groups);
    return est;
}

} // namespace grouptrack

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "grouptrack/errors.hpp"
#include "grouptrack/lmb.hpp"

namespace grouptrack {

/// Symmetric zero-diagonal proximity graph over a fixed track ordering.
struct AdjacencyMatrix {
    Eigen::MatrixXi a;

    [[nodiscard]] int size() const { return static_cast<int>(a.rows()); }
};

/// Disjoint index sets covering all tracks, ordered by smallest member.
struct GroupPartition {
    std::vector<std::vector<int>> components;

    [[nodiscard]] bool is_singleton(std::size_t k) const { return components[k].size() == 1; }
};

/// a(i, j) = 1 iff i != j and the planar distance between the position
/// components of the means is at most epsilon (inclusive).
inline AdjacencyMatrix build_adjacency(const std::vector<Vec4>& means, double epsilon) {
    const int n = static_cast<int>(means.size());
    AdjacencyMatrix adj;
    adj.a = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = (position_of(means[static_cast<std::size_t>(i)]) -
                              position_of(means[static_cast<std::size_t>(j)]))
                                 .norm();
            if (d <= epsilon) {
                adj.a(i, j) = 1;
                adj.a(j, i) = 1;
            }
        }
    }
    return adj;
}

/// Connected components of the undirected graph by breadth-first search.
/// Components come out sorted by their smallest member index; members
/// are ascending within each component.
inline GroupPartition connected_components(const AdjacencyMatrix& adj) {
    const int n = adj.size();
    GroupPartition partition;
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    for (int root = 0; root < n; ++root) {
        if (visited[static_cast<std::size_t>(root)]) continue;
        std::vector<int> component;
        std::vector<int> frontier{root};
        visited[static_cast<std::size_t>(root)] = 1;
        while (!frontier.empty()) {
            const int i = frontier.back();
            frontier.pop_back();
            component.push_back(i);
            for (int j = 0; j < n; ++j) {
                if (adj.a(i, j) != 0 && !visited[static_cast<std::size_t>(j)]) {
                    visited[static_cast<std::size_t>(j)] = 1;
                    frontier.push_back(j);
                }
            }
        }
        std::sort(component.begin(), component.end());
        partition.components.push_back(std::move(component));
    }
    return partition;
}

/// Gain applied to the centroid innovation when updating a group
/// center's velocity across steps.
inline constexpr double kCenterVelocityGain = 0.3;

/// Group-information update: cluster tracks by posterior-mean proximity
/// and rewrite the group fields of every track. Non-singleton clusters
/// receive a fresh id from the counter; singletons become ungrouped. A
/// density of at most one track is returned as is. Returns the updated
/// density and the advanced counter.
///
/// The center position is the existence-weighted spatial centroid of
/// the member means. The center velocity is tracked across steps: the
/// carried (predicted) centers of previously grouped members act as the
/// prior, corrected by the centroid innovation. Under the
/// leader-follower transition a member's own velocity state never
/// drives its position, so it is weakly observable and drifts; weighting
/// by existence and filtering the centroid sequence keeps the center
/// estimate anchored to measured motion instead. Groups formed from
/// scratch take the weighted mean of member velocity states, which are
/// fresh constant-velocity estimates at that point.
inline std::pair<LmbDensity, int> update_group_info(const LmbDensity& density, double epsilon,
                                                    int next_group_id, double dt = 1.0) {
    if (density.size() <= 1) return {density, next_group_id};

    std::vector<Vec4> means;
    means.reserve(density.size());
    for (const auto& t : density.tracks) means.push_back(t.density.mean());

    const AdjacencyMatrix adj = build_adjacency(means, epsilon);
    const GroupPartition partition = connected_components(adj);

    LmbDensity out = density;
    for (const auto& component : partition.components) {
        if (component.size() == 1) {
            auto& label = out.tracks[static_cast<std::size_t>(component.front())].label;
            label.group_id = 0;
            label.group_center = Vec4::Zero();
            continue;
        }

        Vec2 centroid = Vec2::Zero();
        double mass = 0.0;
        Vec4 carried = Vec4::Zero();
        double carried_mass = 0.0;
        Vec2 state_velocity = Vec2::Zero();
        for (int i : component) {
            const auto& track = out.tracks[static_cast<std::size_t>(i)];
            const double w = std::max(track.existence, 1e-12);
            const Vec4& mean = means[static_cast<std::size_t>(i)];
            centroid += w * position_of(mean);
            state_velocity += w * Vec2(mean(1), mean(3));
            mass += w;
            if (track.label.grouped()) {
                carried += w * track.label.group_center;
                carried_mass += w;
            }
        }
        centroid /= mass;

        Vec2 velocity;
        if (carried_mass > 0.0) {
            const Vec4 prior = carried / carried_mass;
            const Vec2 innovation = centroid - position_of(prior);
            velocity = Vec2(prior(1), prior(3)) + (kCenterVelocityGain / dt) * innovation;
        } else {
            velocity = state_velocity / mass;
        }

        Vec4 center;
        center << centroid(0), velocity(0), centroid(1), velocity(1);
        const int id = next_group_id++;
        for (int i : component) {
            auto& label = out.tracks[static_cast<std::size_t>(i)].label;
            label.group_id = id;
            label.group_center = center;
        }
    }
    return {out, next_group_id};
}

} // namespace grouptrack

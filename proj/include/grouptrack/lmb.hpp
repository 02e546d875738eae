#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "grouptrack/gaussian.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

/// One track hypothesis: the represented target exists with probability
/// `existence` and is then distributed according to `density`.
struct BernoulliTrack {
    double existence = 0.0;
    GaussianMixture density;
    AugmentedLabel label;
};

/// Finite collection of Bernoulli tracks with pairwise-distinct
/// (birth_time, birth_index) identities. This is the density the filter
/// carries between steps.
struct LmbDensity {
    std::vector<BernoulliTrack> tracks;

    [[nodiscard]] std::size_t size() const { return tracks.size(); }
    [[nodiscard]] bool empty() const { return tracks.empty(); }
};

/// One term of the update-time hypothesis expansion: a subset of track
/// labels assumed to exist and an association of each to a measurement
/// index (0 meaning missed detection). Weights are kept in log domain.
struct GlmbHypothesis {
    std::vector<TrackLabel> labels;
    std::vector<int> theta; // association per label, 0 = missed detection
    double log_weight = 0.0;
};

inline bool validate_distinct_labels(const LmbDensity& density) {
    std::set<TrackLabel> seen;
    for (const auto& t : density.tracks) {
        if (!seen.insert(t.label.track_label()).second) return false;
    }
    return true;
}

/// Per-track views of an LMB density. Every selector preserves the
/// element count.
enum class Projection {
    FullLabel,       // the whole augmented label
    TrackId,         // (birth_time, birth_index)
    GroupId,         // group id, 0 = ungrouped
    GroupCenter,     // group-center state vector
    State,           // mixture mean as the track's state summary
    StateAndTrackId, // (mixture mean, (birth_time, birth_index))
};

using Projected = std::variant<AugmentedLabel, TrackLabel, int, Vec4, std::pair<Vec4, TrackLabel>>;

inline std::vector<Projected> project(const LmbDensity& density, Projection selector) {
    std::vector<Projected> out;
    out.reserve(density.size());
    for (const auto& t : density.tracks) {
        switch (selector) {
            case Projection::FullLabel: out.emplace_back(t.label); break;
            case Projection::TrackId: out.emplace_back(t.label.track_label()); break;
            case Projection::GroupId: out.emplace_back(t.label.group_id); break;
            case Projection::GroupCenter: out.emplace_back(t.label.group_center); break;
            case Projection::State: out.emplace_back(t.density.mean()); break;
            case Projection::StateAndTrackId:
                out.emplace_back(std::make_pair(t.density.mean(), t.label.track_label()));
                break;
        }
    }
    return out;
}

/// Probability mass function of the number of existing tracks: the
/// Poisson-binomial distribution of the existence probabilities,
/// computed by exact convolution. Entry n is P(exactly n tracks exist).
inline Eigen::VectorXd cardinality_distribution(const LmbDensity& density) {
    Eigen::VectorXd pmf = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(density.size()) + 1);
    pmf(0) = 1.0;
    Eigen::Index filled = 0;
    for (const auto& t : density.tracks) {
        const double r = t.existence;
        for (Eigen::Index n = filled + 1; n >= 1; --n) {
            pmf(n) = pmf(n) * (1.0 - r) + pmf(n - 1) * r;
        }
        pmf(0) *= (1.0 - r);
        ++filled;
    }
    return pmf;
}

/// Density of a Bernoulli track evaluated on a set realization: 1 - r
/// for the empty set, r * p(x) for a singleton {x}.
inline double evaluate_bernoulli_setpdf(const BernoulliTrack& track,
                                        const std::optional<Vec4>& realization) {
    if (!realization.has_value()) return 1.0 - track.existence;
    return track.existence * track.density.pdf(*realization);
}

} // namespace grouptrack

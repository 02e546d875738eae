#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>

namespace grouptrack {

// Kinematic state is [px, vx, py, vy] in meters and meters/second.
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

inline Vec2 position_of(const Vec4& state) {
    return Vec2(state(0), state(2));
}

/// Track identity: birth timestep plus an index distinguishing tracks
/// born at the same step. Never changes over a track's lifetime.
struct TrackLabel {
    int birth_time = 0;
    int birth_index = 0;

    friend auto operator<=>(const TrackLabel&, const TrackLabel&) = default;
};

/// Track label augmented with group information. A group id of 0 means
/// the track belongs to no group; the center is then the all-zeros
/// sentinel and is never read by the dynamics.
struct AugmentedLabel {
    int birth_time = 0;
    int birth_index = 0;
    int group_id = 0;
    Vec4 group_center = Vec4::Zero();

    [[nodiscard]] TrackLabel track_label() const {
        return TrackLabel{birth_time, birth_index};
    }
    [[nodiscard]] bool grouped() const { return group_id != 0; }
};

/// Product of h over the elements of a finite set; empty product is 1.
template <typename Range, typename Fn>
double set_exponential(const Range& set, Fn&& h) {
    double product = 1.0;
    for (const auto& x : set) product *= h(x);
    return product;
}

} // namespace grouptrack

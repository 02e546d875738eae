#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "grouptrack/gaussian.hpp"
#include "grouptrack/lmb.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

/// Constant-velocity motion on [px, vx, py, vy] with white-noise
/// acceleration of standard deviation `varrho`.
struct MotionModel {
    double dt = 1.0;
    double varrho = 5.0;
    Mat4 F = Mat4::Identity();
    Mat4 Q = Mat4::Zero();

    MotionModel() { rebuild(); }
    MotionModel(double dt_, double varrho_) : dt(dt_), varrho(varrho_) { rebuild(); }

    void rebuild() {
        F = Mat4::Identity();
        F(0, 1) = dt;
        F(2, 3) = dt;
        Eigen::Matrix<double, 4, 2> G = Eigen::Matrix<double, 4, 2>::Zero();
        G(0, 0) = 0.5 * dt * dt;
        G(1, 0) = dt;
        G(2, 1) = 0.5 * dt * dt;
        G(3, 1) = dt;
        Q = varrho * varrho * G * G.transpose();
    }
};

struct BirthComponent {
    double existence = 0.0;
    Vec4 mean = Vec4::Zero();
    Mat4 covariance = Mat4::Identity();
};

struct BirthModel {
    std::vector<BirthComponent> components;
};

/// Axis-aligned surveillance rectangle [x_min, x_max] x [y_min, y_max].
struct Region {
    double x_min = -1000.0, x_max = 1000.0;
    double y_min = -1000.0, y_max = 1000.0;

    [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
    [[nodiscard]] bool contains(const Vec2& z) const {
        return z(0) >= x_min && z(0) <= x_max && z(1) >= y_min && z(1) <= y_max;
    }
};

/// Position-measuring sensor with uniform Poisson clutter over the
/// surveillance region.
struct SensorModel {
    double sigma_r = 10.0;   // per-axis measurement noise std, meters
    double p_detect = 0.98;  // detection probability
    Region region;
    double clutter_rate = 30.0; // mean clutter count per scan

    [[nodiscard]] static Mat24 H() {
        Mat24 h = Mat24::Zero();
        h(0, 0) = 1.0;
        h(1, 2) = 1.0;
        return h;
    }
    [[nodiscard]] Mat2 R() const { return sigma_r * sigma_r * Mat2::Identity(); }

    /// Clutter intensity kappa(z) = clutter_rate / area inside the region.
    [[nodiscard]] double clutter_intensity() const { return clutter_rate / region.area(); }
};

/// Propagate a mixture through the constant-velocity model:
/// (mu, P) -> (F mu, F P F' + Q).
inline GaussianMixture predict_independent(const GaussianMixture& density,
                                           const MotionModel& mm) {
    GaussianMixture out = density;
    for (auto& c : out.components) {
        c.mean = mm.F * c.mean;
        c.covariance = mm.F * c.covariance * mm.F.transpose() + mm.Q;
    }
    return out;
}

/// Propagate a group member: the member keeps a fixed offset from the
/// group center, so the transition is a deterministic shift by (F - I) c
/// plus the center's process noise: (mu, P) -> (mu + (F - I) c, P + Q).
inline GaussianMixture predict_in_group(const GaussianMixture& density, const Vec4& center,
                                        const MotionModel& mm) {
    const Vec4 shift = (mm.F - Mat4::Identity()) * center;
    GaussianMixture out = density;
    for (auto& c : out.components) {
        c.mean += shift;
        c.covariance += mm.Q;
    }
    return out;
}

/// Deterministic mean propagation of a group center.
inline Vec4 predict_group_center(const Vec4& center, const MotionModel& mm) {
    return mm.F * center;
}

struct MeasurementUpdate {
    double log_eta = 0.0; // log of the mixture-weighted measurement likelihood
    GaussianMixture posterior;
};

/// Kalman update of a mixture against a single position measurement.
/// Returns log eta = log sum_j w_j N(z; H mu_j, H P_j H' + R) and the
/// reweighted, renormalized posterior mixture. Joseph-form covariance
/// update keeps the result positive semidefinite.
inline MeasurementUpdate measurement_loglikelihood(const Vec2& z, const GaussianMixture& density,
                                                   const SensorModel& sm) {
    const Mat24 H = SensorModel::H();
    const Mat2 R = sm.R();

    MeasurementUpdate out;
    out.posterior.components.reserve(density.size());
    std::vector<double> log_terms;
    log_terms.reserve(density.size());
    double max_term = -std::numeric_limits<double>::infinity();

    for (const auto& c : density.components) {
        const Vec2 predicted_z = H * c.mean;
        const Mat2 S = H * c.covariance * H.transpose() + R;
        const double det = S.determinant();
        if (!(det > 0.0) || !std::isfinite(det)) {
            throw NumericalFailure("measurement_loglikelihood: singular innovation covariance");
        }
        const double log_q = gaussian_logpdf<2>(z, predicted_z, S);
        const Eigen::Matrix<double, 4, 2> K = c.covariance * H.transpose() * S.inverse();
        const Mat4 IKH = Mat4::Identity() - K * H;
        GaussianComponent updated;
        updated.mean = c.mean + K * (z - predicted_z);
        updated.covariance = IKH * c.covariance * IKH.transpose() + K * R * K.transpose();
        updated.weight = 0.0; // set below from the normalized likelihood terms
        out.posterior.components.push_back(updated);

        const double term = (c.weight > 0.0 ? std::log(c.weight) + log_q
                                            : -std::numeric_limits<double>::infinity());
        log_terms.push_back(term);
        max_term = std::max(max_term, term);
    }

    if (!std::isfinite(max_term)) {
        throw NumericalFailure("measurement_loglikelihood: zero-likelihood mixture");
    }
    double sum = 0.0;
    for (double t : log_terms) sum += std::exp(t - max_term);
    out.log_eta = max_term + std::log(sum);
    for (std::size_t j = 0; j < log_terms.size(); ++j) {
        out.posterior.components[j].weight = std::exp(log_terms[j] - out.log_eta);
    }
    return out;
}

/// Draw a Poisson-distributed number of clutter points, i.i.d. uniform
/// over the surveillance region.
template <typename Rng>
std::vector<Vec2> sample_clutter(const SensorModel& sm, Rng& rng) {
    std::vector<Vec2> out;
    if (sm.clutter_rate <= 0.0) return out;
    std::poisson_distribution<int> count_dist(sm.clutter_rate);
    const int count = count_dist(rng);
    out.reserve(static_cast<std::size_t>(count));
    std::uniform_real_distribution<double> ux(sm.region.x_min, sm.region.x_max);
    std::uniform_real_distribution<double> uy(sm.region.y_min, sm.region.y_max);
    for (int i = 0; i < count; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        out.emplace_back(x, y);
    }
    return out;
}

/// Instantiate newborn tracks for one timestep. Newborn targets belong
/// to no group; birth indices count from 1 within the step.
inline std::vector<BernoulliTrack> birth_tracks(const BirthModel& bm, int time) {
    std::vector<BernoulliTrack> out;
    out.reserve(bm.components.size());
    int index = 1;
    for (const auto& b : bm.components) {
        BernoulliTrack t;
        t.existence = b.existence;
        t.density = GaussianMixture::single(b.mean, b.covariance);
        t.label.birth_time = time;
        t.label.birth_index = index++;
        t.label.group_id = 0;
        t.label.group_center = Vec4::Zero();
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace grouptrack

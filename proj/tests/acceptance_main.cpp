// Acceptance suite: runs every scenario-level requirement end to end and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "grouptrack/grouptrack.hpp"

using namespace grouptrack;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++failures;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

BernoulliTrack make_track(int k, int i, double r, const Vec4& mean, double var = 50.0) {
    BernoulliTrack t;
    t.existence = r;
    t.density = GaussianMixture::single(mean, var * Mat4::Identity());
    t.label.birth_time = k;
    t.label.birth_index = i;
    return t;
}

double window_mean_steps(const Eigen::VectorXd& v, int first_step, int last_step) {
    double s = 0.0;
    int n = 0;
    for (int k = first_step; k <= last_step; ++k) {
        s += v(k - 1);
        ++n;
    }
    return s / n;
}

// ---- criterion 1 ----

void criterion_1() {
    SensorModel sm;
    sm.p_detect = 0.98;
    PredictedLmb pred;
    pred.density.tracks = {make_track(1, 1, 0.5, Vec4::Zero())};
    update(pred, {}, sm, UpdateParams{}); // warmup
    const auto t0 = std::chrono::steady_clock::now();
    const LmbDensity post = update(pred, {}, sm, UpdateParams{});
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const double expected = 0.01 / 0.51;
    const double err = std::abs(post.tracks.at(0).existence - expected);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "missed-detection closed form |r - 0.01/0.51| = %.3g (tol 1e-12), %.3f ms "
                  "(budget 1 ms)",
                  err, ms);
    report(1, err <= 1e-12 && ms < 1.0, buf);
}

// ---- criterion 2 ----

void criterion_2() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u01(0.1, 0.9);
    std::uniform_real_distribution<double> pos(-80.0, 80.0);
    SensorModel sm;
    sm.clutter_rate = 10.0;

    double worst_tv = 0.0, worst_mean = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int m = static_cast<int>(rng() % 4);
        PredictedLmb pred;
        for (int i = 0; i < n; ++i) {
            pred.density.tracks.push_back(
                make_track(1, i + 1, u01(rng), Vec4(pos(rng), 0, pos(rng), 0)));
        }
        std::vector<Vec2> Z;
        for (int j = 0; j < m; ++j) Z.emplace_back(pos(rng), pos(rng));

        const LmbDensity exact = update_exhaustive(pred, Z, sm);
        const LmbDensity ranked = update(pred, Z, sm, UpdateParams::exact(1000000));

        std::map<std::pair<int, int>, const BernoulliTrack*> by_label;
        for (const auto& t : exact.tracks) by_label[{t.label.birth_time, t.label.birth_index}] = &t;
        for (const auto& t : ranked.tracks) {
            const auto it = by_label.find({t.label.birth_time, t.label.birth_index});
            const double r_ref = it == by_label.end() ? 0.0 : it->second->existence;
            worst_tv = std::max(worst_tv, std::abs(t.existence - r_ref));
            if (it != by_label.end()) {
                worst_mean = std::max(
                    worst_mean, (t.density.mean() - it->second->density.mean()).norm());
            }
        }
        for (const auto& [label, t] : by_label) {
            bool found = false;
            for (const auto& rt : ranked.tracks) {
                if (rt.label.birth_time == label.first && rt.label.birth_index == label.second)
                    found = true;
            }
            if (!found) worst_tv = std::max(worst_tv, t->existence);
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "ranked vs exhaustive on 100 instances: max |dr| = %.3g (tol 1e-9), max mean "
                  "shift = %.3g m (tol 1e-6), %.2f s (budget 10 s)",
                  worst_tv, worst_mean, secs);
    report(2, worst_tv <= 1e-9 && worst_mean <= 1e-6 && secs < 10.0, buf);
}

// ---- criterion 3 ----

void criterion_3() {
    AdjacencyMatrix adj;
    adj.a = Eigen::MatrixXi::Zero(6, 6);
    const int edges[4][2] = {{0, 1}, {0, 2}, {1, 2}, {3, 4}};
    for (const auto& e : edges) {
        adj.a(e[0], e[1]) = 1;
        adj.a(e[1], e[0]) = 1;
    }
    const GroupPartition p = connected_components(adj);
    const bool ok = p.components.size() == 3 && p.components[0] == std::vector<int>{0, 1, 2} &&
                    p.components[1] == std::vector<int>{3, 4} &&
                    p.components[2] == std::vector<int>{5};
    report(3, ok, "six-target adjacency yields components {1,2,3}, {4,5}, {6}");
}

// ---- criterion 4 ----

double ospa_brute_force(std::vector<Vec2> X, std::vector<Vec2> Y, const OspaParams& prm) {
    if (X.size() > Y.size()) std::swap(X, Y);
    const int m = static_cast<int>(X.size());
    const int n = static_cast<int>(Y.size());
    if (n == 0) return 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
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
    return std::pow((best + std::pow(prm.cutoff, prm.order) * (n - m)) / n, 1.0 / prm.order);
}

void criterion_4() {
    const OspaParams prm{1.0, 100.0};
    bool hand_ok = true;
    hand_ok &= ospa({Vec2(5, 5)}, {Vec2(5, 5)}, prm) == 0.0;
    hand_ok &= ospa({Vec2(0, 0)}, {}, prm) == 100.0;
    hand_ok &= ospa({Vec2(0, 0)}, {Vec2(30, 0), Vec2(500, 0)}, prm) == 65.0;

    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-200.0, 200.0);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Vec2> X, Y;
        const int nx = static_cast<int>(rng() % 7);
        const int ny = static_cast<int>(rng() % 7);
        for (int i = 0; i < nx; ++i) X.emplace_back(u(rng), u(rng));
        for (int i = 0; i < ny; ++i) Y.emplace_back(u(rng), u(rng));
        worst = std::max(worst, std::abs(ospa(X, Y, prm) - ospa_brute_force(X, Y, prm)));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "hand cases (0, 100, 65) %s; 200 random sets max |d - brute force| = %.3g "
                  "(tol 1e-10)",
                  hand_ok ? "exact" : "WRONG", worst);
    report(4, hand_ok && worst <= 1e-10, buf);
}

// ---- criteria 5-7 (one shared Monte-Carlo study) ----

void criteria_5_6_7() {
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    std::printf("... running the full %d-trial study (%d steps, both modes)\n", cfg.mc_trials,
                cfg.steps);
    const double t0 = now_seconds();
    const McResult mc = monte_carlo(cfg);
    const double total_secs = now_seconds() - t0;

    // criterion 5
    const double frac_exact = window_mean_steps(mc.augmented.frac_card_exact, 21, cfg.steps);
    const double mean_err = window_mean_steps(mc.augmented.mean_abs_card_err, 20, cfg.steps);
    {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "cardinality: exact in %.1f%% of steps after 20 (need >= 70%%), mean "
                      "|n_hat - 6| = %.3f (need <= 0.5), study took %.0f s (budget 900 s)",
                      100.0 * frac_exact, mean_err, total_secs);
        report(5, frac_exact >= 0.70 && mean_err <= 0.5 && total_secs <= 900.0, buf);
    }

    // criterion 6
    double frac_two = 0.0;
    int count = 0;
    for (int k = 21; k <= cfg.steps; ++k) {
        // after formation the true count is 2, so exact-match equals "reports 2"
        frac_two += mc.augmented.frac_groups_exact(k - 1);
        ++count;
    }
    frac_two /= count;
    const double baseline_groups = mc.baseline.mean_groups_hat.cwiseAbs().maxCoeff();
    {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "groups: augmented reports exactly 2 in %.1f%% of steps after 20 (need >= "
                      "70%%); baseline max mean group count = %.3g (must be 0)",
                      100.0 * frac_two, baseline_groups);
        report(6, frac_two >= 0.70 && baseline_groups == 0.0, buf);
    }

    // criterion 7
    const double ospa_aug = window_mean_steps(mc.augmented.mean_ospa, 20, cfg.steps);
    const double ospa_base = window_mean_steps(mc.baseline.mean_ospa, 20, cfg.steps);
    {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "mean OSPA steps 20-%d: augmented %.3f m vs baseline %.3f m (margin %.3f "
                      "m, need <=)",
                      cfg.steps, ospa_aug, ospa_base, ospa_base - ospa_aug);
        report(7, ospa_aug <= ospa_base, buf);
    }
}

// ---- criterion 8 ----

void criterion_8() {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.truth.process_noise_std = 0.0;
    cfg.truth.formation_step = 1; // grouped from birth: offsets fixed over the whole run
    std::mt19937_64 rng(1);
    const GroundTruth truth = generate_truth(cfg, rng);

    double worst = 0.0;
    for (const auto& group : cfg.truth.groups) {
        for (std::size_t a = 0; a < group.members.size(); ++a) {
            for (std::size_t b = a + 1; b < group.members.size(); ++b) {
                Vec2 ref = Vec2::Zero();
                for (int k = 1; k <= cfg.steps; ++k) {
                    Vec2 pa = Vec2::Zero(), pb = Vec2::Zero();
                    for (const auto& e : truth.at_step(k)) {
                        if (e.target_id == group.members[a]) pa = position_of(e.state);
                        if (e.target_id == group.members[b]) pb = position_of(e.state);
                    }
                    if (k == 1) {
                        ref = pa - pb;
                    } else {
                        worst = std::max(worst, ((pa - pb) - ref).norm());
                    }
                }
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "noise-free member offsets drift %.3g m over %d steps (tol 1e-9)", worst,
                  cfg.steps);
    report(8, worst <= 1e-9, buf);
}

// ---- criterion 9 ----

void criterion_9() {
    namespace fs = std::filesystem;
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.steps = 40;
    cfg.mc_trials = 3;
    for (auto& t : cfg.truth.targets) t.death_step = cfg.steps;
    const fs::path base = fs::temp_directory_path() / "grouptrack_acceptance_det";
    fs::remove_all(base);
    const fs::path a = base / "a", b = base / "b";
    run_and_write(cfg, a);
    run_and_write(cfg, b);

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool ok = true;
    for (const char* name : {"aggregate.csv", "trial0_truth.csv", "trial0_measurements.csv",
                             "trial0_estimates_augmented.csv", "trial0_estimates_baseline.csv"}) {
        ok &= slurp(a / name) == slurp(b / name);
    }
    fs::remove_all(base);
    report(9, ok, "two identically configured runs produce byte-identical CSV outputs");
}

// ---- criterion 10 ----

void criterion_10() {
    bool ok = true;
    std::string detail;

    // Cardinality pmf vs 2^n enumeration.
    {
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            const int n = 1 + static_cast<int>(rng() % 10);
            LmbDensity d;
            std::vector<double> rs;
            for (int i = 0; i < n; ++i) {
                rs.push_back(u(rng));
                d.tracks.push_back(make_track(1, i + 1, rs.back(), Vec4::Zero()));
            }
            const Eigen::VectorXd pmf = cardinality_distribution(d);
            Eigen::VectorXd oracle = Eigen::VectorXd::Zero(n + 1);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                double p = 1.0;
                int c = 0;
                for (int i = 0; i < n; ++i) {
                    if (mask & (1u << i)) {
                        p *= rs[static_cast<std::size_t>(i)];
                        ++c;
                    } else {
                        p *= 1.0 - rs[static_cast<std::size_t>(i)];
                    }
                }
                oracle(c) += p;
            }
            worst = std::max(worst, (pmf - oracle).cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(pmf.sum() - 1.0));
        }
        ok &= worst <= 1e-12;
        detail += "pmf vs enumeration " + std::to_string(worst) + "; ";
    }

    // Adjacency symmetry and gate monotonicity.
    {
        std::mt19937_64 rng(72);
        std::uniform_real_distribution<double> u(-300.0, 300.0);
        bool sym_ok = true, mono_ok = true;
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<Vec4> means;
            const int n = 2 + static_cast<int>(rng() % 7);
            for (int i = 0; i < n; ++i) means.push_back(Vec4(u(rng), 0, u(rng), 0));
            const double eps = 60.0 + 120.0 * std::generate_canonical<double, 53>(rng);
            const AdjacencyMatrix adj = build_adjacency(means, eps);
            sym_ok &= adj.a.isApprox(adj.a.transpose()) && adj.a.diagonal().sum() == 0;

            const auto p1 = connected_components(adj);
            const auto p2 = connected_components(build_adjacency(means, eps + 50.0));
            std::vector<int> owner(static_cast<std::size_t>(n), -1);
            for (std::size_t c = 0; c < p2.components.size(); ++c) {
                for (int i : p2.components[c]) owner[static_cast<std::size_t>(i)] = static_cast<int>(c);
            }
            for (const auto& comp : p1.components) {
                for (int i : comp) {
                    mono_ok &= owner[static_cast<std::size_t>(i)] ==
                               owner[static_cast<std::size_t>(comp.front())];
                }
            }
        }
        ok &= sym_ok && mono_ok;
        detail += std::string("adjacency ") + (sym_ok && mono_ok ? "ok" : "BROKEN") + "; ";
    }

    // Mixture reduction conserves unit mass.
    {
        std::mt19937_64 rng(73);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        std::normal_distribution<double> g(0.0, 30.0);
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            GaussianMixture m;
            const int n = 1 + static_cast<int>(rng() % 8);
            for (int i = 0; i < n; ++i) {
                m.components.push_back(
                    GaussianComponent{u(rng), Vec4(g(rng), 0, g(rng), 0),
                                      Mat4::Identity() * (1.0 + u(rng))});
            }
            const GaussianMixture r = gm_reduce(m.normalized(), 1e-5, 4.0, 100);
            worst = std::max(worst, std::abs(r.total_weight() - 1.0));
        }
        ok &= worst <= 1e-9;
        detail += "gm mass " + std::to_string(worst) + "; ";
    }

    // Ranked assignment vs full enumeration on 3x3 problems.
    {
        std::mt19937_64 rng(74);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        double worst = 0.0;
        bool complete = true;
        for (int rep = 0; rep < 50; ++rep) {
            AssociationProblem p;
            p.detection_cost.resize(3, 3);
            p.miss_cost.resize(3);
            p.nonexist_cost.resize(3);
            for (int i = 0; i < 3; ++i) {
                p.miss_cost(i) = u(rng);
                p.nonexist_cost(i) = u(rng);
                for (int j = 0; j < 3; ++j) p.detection_cost(i, j) = u(rng);
                p.track_index.push_back(TrackLabel{0, i});
            }
            // Enumerate every option vector.
            std::vector<double> costs;
            std::vector<int> theta(3);
            std::vector<char> used(3, 0);
            const std::function<void(int, double)> rec = [&](int row, double cost) {
                if (row == 3) {
                    costs.push_back(cost);
                    return;
                }
                rec(row + 1, cost + p.nonexist_cost(row));
                rec(row + 1, cost + p.miss_cost(row));
                for (int j = 0; j < 3; ++j) {
                    if (used[static_cast<std::size_t>(j)]) continue;
                    used[static_cast<std::size_t>(j)] = 1;
                    rec(row + 1, cost + p.detection_cost(row, j));
                    used[static_cast<std::size_t>(j)] = 0;
                }
            };
            rec(0, 0.0);
            std::sort(costs.begin(), costs.end());
            const auto ranked = ranked_assignments(p, static_cast<int>(costs.size()) + 5);
            complete &= ranked.size() == costs.size();
            for (std::size_t h = 0; h < std::min(ranked.size(), costs.size()); ++h) {
                worst = std::max(worst, std::abs(ranked[h].cost - costs[h]));
            }
        }
        ok &= complete && worst <= 1e-10;
        detail += "ranked vs enumeration " + std::to_string(worst);
    }

    report(10, ok, "property suites: " + detail);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_6_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grouptrack/sim.hpp"

namespace grouptrack {

inline constexpr const char* kArtifactVersion = "0.1.0";

using json = nlohmann::json;

// ---- Scenario configuration <-> JSON ----

namespace detail {

inline json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

template <int N>
Eigen::Matrix<double, N, 1> json_to_vec(const json& a, const std::string& where) {
    if (!a.is_array() || a.size() != N) {
        throw ConfigError(where + ": expected an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) {
        if (!a[static_cast<std::size_t>(i)].is_number()) {
            throw ConfigError(where + "[" + std::to_string(i) + "]: expected a number");
        }
        v(i) = a[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

template <typename T>
void read_field(const json& section, const std::string& section_name, const char* key, T& out) {
    if (!section.contains(key)) return;
    try {
        out = section.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(section_name + "." + key + ": wrong type");
    }
}

} // namespace detail

inline json config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["run"] = {{"steps", cfg.steps},
                {"dt", cfg.dt},
                {"mc_trials", cfg.mc_trials},
                {"base_seed", cfg.base_seed}};
    j["motion"] = {{"process_noise_std", cfg.process_noise_std},
                   {"survival_probability", cfg.p_survival}};
    json comps = json::array();
    for (const auto& b : cfg.birth.components) {
        comps.push_back({{"existence", b.existence}, {"mean", detail::vec_to_json(b.mean)}});
    }
    const Vec4 cov_diag = cfg.birth.components.empty()
                              ? Vec4::Constant(100.0)
                              : Vec4(cfg.birth.components.front().covariance.diagonal());
    j["birth"] = {{"components", comps}, {"cov_diag", detail::vec_to_json(cov_diag)}};
    j["sensor"] = {{"noise_std", cfg.sensor.sigma_r},
                   {"detection_probability", cfg.sensor.p_detect},
                   {"region",
                    {cfg.sensor.region.x_min, cfg.sensor.region.x_max, cfg.sensor.region.y_min,
                     cfg.sensor.region.y_max}},
                   {"clutter_rate", cfg.sensor.clutter_rate}};
    j["filter"] = {{"max_hypotheses", cfg.filter_params.max_hypotheses},
                   {"existence_prune", cfg.filter_params.existence_prune},
                   {"gm_prune_weight", cfg.filter_params.gm_prune_weight},
                   {"gm_merge_distance", cfg.filter_params.gm_merge_distance},
                   {"gm_max_components", cfg.filter_params.gm_max_components},
                   {"log_weight_floor", cfg.filter_params.log_weight_floor}};
    j["grouping"] = {{"group_threshold_m", cfg.group_threshold_m}};
    j["ospa"] = {{"order", cfg.ospa_params.order}, {"cutoff", cfg.ospa_params.cutoff}};
    json targets = json::array();
    for (const auto& t : cfg.truth.targets) {
        targets.push_back({{"initial", detail::vec_to_json(t.initial)},
                           {"birth_step", t.birth_step},
                           {"death_step", t.death_step}});
    }
    json groups = json::array();
    for (const auto& g : cfg.truth.groups) {
        groups.push_back(
            {{"members", g.members}, {"velocity", {g.velocity(0), g.velocity(1)}}});
    }
    j["truth"] = {{"formation_step", cfg.truth.formation_step},
                  {"formation_scale", cfg.truth.formation_scale},
                  {"process_noise_std", cfg.truth.process_noise_std},
                  {"targets", targets},
                  {"groups", groups}};
    return j;
}

/// Parse a configuration document. Missing sections or keys keep their
/// defaults; present keys must have the right shape.
inline ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    if (!j.is_object()) throw ConfigError("config root must be an object");

    if (j.contains("run")) {
        const auto& s = j.at("run");
        detail::read_field(s, "run", "steps", cfg.steps);
        detail::read_field(s, "run", "dt", cfg.dt);
        detail::read_field(s, "run", "mc_trials", cfg.mc_trials);
        detail::read_field(s, "run", "base_seed", cfg.base_seed);
    }
    if (j.contains("motion")) {
        const auto& s = j.at("motion");
        detail::read_field(s, "motion", "process_noise_std", cfg.process_noise_std);
        detail::read_field(s, "motion", "survival_probability", cfg.p_survival);
    }
    if (j.contains("birth")) {
        const auto& s = j.at("birth");
        Vec4 cov_diag = Vec4::Constant(100.0);
        if (s.contains("cov_diag")) {
            cov_diag = detail::json_to_vec<4>(s.at("cov_diag"), "birth.cov_diag");
        }
        if (s.contains("components")) {
            if (!s.at("components").is_array()) throw ConfigError("birth.components: expected an array");
            cfg.birth.components.clear();
            std::size_t idx = 0;
            for (const auto& c : s.at("components")) {
                BirthComponent b;
                b.covariance = cov_diag.asDiagonal();
                const std::string where = "birth.components[" + std::to_string(idx) + "]";
                if (!c.is_object() || !c.contains("existence") || !c.contains("mean")) {
                    throw ConfigError(where + ": expected {existence, mean}");
                }
                detail::read_field(c, where, "existence", b.existence);
                b.mean = detail::json_to_vec<4>(c.at("mean"), where + ".mean");
                cfg.birth.components.push_back(b);
                ++idx;
            }
        } else {
            for (auto& b : cfg.birth.components) b.covariance = cov_diag.asDiagonal();
        }
    }
    if (j.contains("sensor")) {
        const auto& s = j.at("sensor");
        detail::read_field(s, "sensor", "noise_std", cfg.sensor.sigma_r);
        detail::read_field(s, "sensor", "detection_probability", cfg.sensor.p_detect);
        detail::read_field(s, "sensor", "clutter_rate", cfg.sensor.clutter_rate);
        if (s.contains("region")) {
            const Vec4 r = detail::json_to_vec<4>(s.at("region"), "sensor.region");
            cfg.sensor.region = Region{r(0), r(1), r(2), r(3)};
        }
    }
    if (j.contains("filter")) {
        const auto& s = j.at("filter");
        detail::read_field(s, "filter", "max_hypotheses", cfg.filter_params.max_hypotheses);
        detail::read_field(s, "filter", "existence_prune", cfg.filter_params.existence_prune);
        detail::read_field(s, "filter", "gm_prune_weight", cfg.filter_params.gm_prune_weight);
        detail::read_field(s, "filter", "gm_merge_distance", cfg.filter_params.gm_merge_distance);
        detail::read_field(s, "filter", "gm_max_components", cfg.filter_params.gm_max_components);
        detail::read_field(s, "filter", "log_weight_floor", cfg.filter_params.log_weight_floor);
    }
    if (j.contains("grouping")) {
        detail::read_field(j.at("grouping"), "grouping", "group_threshold_m",
                           cfg.group_threshold_m);
    }
    if (j.contains("ospa")) {
        const auto& s = j.at("ospa");
        detail::read_field(s, "ospa", "order", cfg.ospa_params.order);
        detail::read_field(s, "ospa", "cutoff", cfg.ospa_params.cutoff);
    }
    if (j.contains("truth")) {
        const auto& s = j.at("truth");
        detail::read_field(s, "truth", "formation_step", cfg.truth.formation_step);
        detail::read_field(s, "truth", "formation_scale", cfg.truth.formation_scale);
        detail::read_field(s, "truth", "process_noise_std", cfg.truth.process_noise_std);
        if (s.contains("targets")) {
            if (!s.at("targets").is_array()) throw ConfigError("truth.targets: expected an array");
            cfg.truth.targets.clear();
            std::size_t idx = 0;
            for (const auto& t : s.at("targets")) {
                const std::string where = "truth.targets[" + std::to_string(idx) + "]";
                TruthTargetConfig tc;
                tc.death_step = cfg.steps;
                if (!t.is_object() || !t.contains("initial")) {
                    throw ConfigError(where + ": expected {initial, birth_step, death_step}");
                }
                tc.initial = detail::json_to_vec<4>(t.at("initial"), where + ".initial");
                detail::read_field(t, where, "birth_step", tc.birth_step);
                detail::read_field(t, where, "death_step", tc.death_step);
                cfg.truth.targets.push_back(tc);
                ++idx;
            }
        }
        if (s.contains("groups")) {
            if (!s.at("groups").is_array()) throw ConfigError("truth.groups: expected an array");
            cfg.truth.groups.clear();
            std::size_t idx = 0;
            for (const auto& g : s.at("groups")) {
                const std::string where = "truth.groups[" + std::to_string(idx) + "]";
                TruthGroupConfig gc;
                if (!g.is_object() || !g.contains("members")) {
                    throw ConfigError(where + ": expected {members, velocity}");
                }
                detail::read_field(g, where, "members", gc.members);
                if (g.contains("velocity")) {
                    const auto v = g.at("velocity");
                    if (!v.is_array() || v.size() != 2) {
                        throw ConfigError(where + ".velocity: expected [vx, vy]");
                    }
                    gc.velocity = Vec2(v[0].get<double>(), v[1].get<double>());
                }
                cfg.truth.groups.push_back(gc);
                ++idx;
            }
        }
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path.string());
    out << config_to_json(cfg).dump(2) << "\n";
}

/// Lines describing every key whose value differs from the built-in
/// default scenario; empty when the config is the default.
inline std::vector<std::string> config_diff_from_defaults(const ScenarioConfig& cfg) {
    const json actual = config_to_json(cfg);
    const json def = config_to_json(ScenarioConfig::defaults());
    std::vector<std::string> out;
    for (auto it = actual.begin(); it != actual.end(); ++it) {
        const json& d = def.at(it.key());
        if (!it.value().is_object()) continue;
        for (auto kt = it.value().begin(); kt != it.value().end(); ++kt) {
            if (!d.contains(kt.key()) || d.at(kt.key()) != kt.value()) {
                out.push_back(it.key() + "." + kt.key() + ": " + kt.value().dump() +
                              " (default " + (d.contains(kt.key()) ? d.at(kt.key()).dump() : "-") +
                              ")");
            }
        }
    }
    return out;
}

/// FNV-1a hash of the canonical (key-sorted) config serialization.
inline std::string config_hash(const ScenarioConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---- LMB density <-> line-oriented JSON ----

inline json track_to_json(const BernoulliTrack& t) {
    json comps = json::array();
    for (const auto& c : t.density.components) {
        json cov = json::array();
        for (int r = 0; r < 4; ++r) {
            for (int col = 0; col < 4; ++col) cov.push_back(c.covariance(r, col));
        }
        comps.push_back({{"weight", c.weight},
                         {"mean", detail::vec_to_json(c.mean)},
                         {"covariance", cov}});
    }
    return {{"existence", t.existence},
            {"label",
             {{"birth_time", t.label.birth_time},
              {"birth_index", t.label.birth_index},
              {"group_id", t.label.group_id},
              {"group_center", detail::vec_to_json(t.label.group_center)}}},
            {"components", comps}};
}

inline BernoulliTrack track_from_json(const json& j) {
    BernoulliTrack t;
    try {
        t.existence = j.at("existence").get<double>();
        const auto& l = j.at("label");
        t.label.birth_time = l.at("birth_time").get<int>();
        t.label.birth_index = l.at("birth_index").get<int>();
        t.label.group_id = l.at("group_id").get<int>();
        t.label.group_center = detail::json_to_vec<4>(l.at("group_center"), "label.group_center");
        for (const auto& c : j.at("components")) {
            GaussianComponent g;
            g.weight = c.at("weight").get<double>();
            g.mean = detail::json_to_vec<4>(c.at("mean"), "component.mean");
            const auto& cov = c.at("covariance");
            if (!cov.is_array() || cov.size() != 16) {
                throw ConfigError("component.covariance: expected 16 numbers");
            }
            for (int r = 0; r < 4; ++r) {
                for (int col = 0; col < 4; ++col) {
                    g.covariance(r, col) = cov[static_cast<std::size_t>(r * 4 + col)].get<double>();
                }
            }
            t.density.components.push_back(g);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed track record: ") + e.what());
    }
    return t;
}

/// One track per line.
inline void write_lmb_jsonl(std::ostream& out, const LmbDensity& density) {
    for (const auto& t : density.tracks) out << track_to_json(t).dump() << "\n";
}

inline LmbDensity read_lmb_jsonl(std::istream& in) {
    LmbDensity density;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed track record: ") + e.what());
        }
        density.tracks.push_back(track_from_json(j));
    }
    return density;
}

// ---- Result files ----

namespace detail {

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

} // namespace detail

/// Per-step aggregate CSV, one row per (step, mode). Estimate columns
/// are trial averages; with one trial they are the raw values.
inline void write_aggregate_csv(const std::filesystem::path& path, const ScenarioConfig& cfg,
                                const McResult& mc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,mode,ospa,n_true,n_hat,groups_true,groups_hat\n";
    const auto emit = [&](const char* mode, const ModeAggregate& agg) {
        for (int k = 0; k < cfg.steps; ++k) {
            out << (k + 1) << ',' << mode << ',' << detail::fmt(agg.mean_ospa(k)) << ','
                << mc.n_true(k) << ',' << detail::fmt(agg.mean_n_hat(k)) << ','
                << mc.groups_true(k) << ',' << detail::fmt(agg.mean_groups_hat(k)) << "\n";
        }
    };
    emit("augmented", mc.augmented);
    emit("baseline", mc.baseline);
}

inline void write_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,target,px,py,vx,vy,group\n";
    for (int k = 1; k <= truth.steps; ++k) {
        for (const auto& e : truth.at_step(k)) {
            out << k << ',' << e.target_id << ',' << detail::fmt(e.state(0)) << ','
                << detail::fmt(e.state(2)) << ',' << detail::fmt(e.state(1)) << ','
                << detail::fmt(e.state(3)) << ',' << e.group_id << "\n";
        }
    }
}

inline void write_measurements_csv(const std::filesystem::path& path,
                                   const std::vector<std::vector<Vec2>>& measurements) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,x,y\n";
    for (std::size_t k = 0; k < measurements.size(); ++k) {
        for (const auto& z : measurements[k]) {
            out << (k + 1) << ',' << detail::fmt(z(0)) << ',' << detail::fmt(z(1)) << "\n";
        }
    }
}

inline void write_estimates_csv(const std::filesystem::path& path,
                                const std::vector<StepEstimate>& estimates) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,birth_time,birth_index,px,py,group_id\n";
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        for (const auto& [state, label] : estimates[k].targets) {
            out << (k + 1) << ',' << label.birth_time << ',' << label.birth_index << ','
                << detail::fmt(state(0)) << ',' << detail::fmt(state(2)) << ',' << label.group_id
                << "\n";
        }
    }
}

/// Window helpers over per-step vectors (steps are 1-based, inclusive).
inline double window_mean(const Eigen::VectorXd& v, int first_step, int last_step) {
    double s = 0.0;
    int n = 0;
    for (int k = first_step; k <= last_step && k <= static_cast<int>(v.size()); ++k) {
        s += v(k - 1);
        ++n;
    }
    return n > 0 ? s / n : 0.0;
}

inline json summary_to_json(const ScenarioConfig& cfg, const McResult& mc) {
    const int steps = cfg.steps;
    const auto mode_summary = [&](const ModeAggregate& agg) {
        return json{{"mean_ospa_all_steps", window_mean(agg.mean_ospa, 1, steps)},
                    {"mean_ospa_steps_20_on", window_mean(agg.mean_ospa, 20, steps)},
                    {"mean_abs_card_err_steps_20_on",
                     window_mean(agg.mean_abs_card_err, 20, steps)},
                    {"frac_card_exact_after_20", window_mean(agg.frac_card_exact, 21, steps)},
                    {"frac_groups_exact_after_20", window_mean(agg.frac_groups_exact, 21, steps)},
                    {"mean_groups_hat_after_20", window_mean(agg.mean_groups_hat, 21, steps)},
                    {"wall_seconds", agg.total_wall_seconds}};
    };
    return json{{"artifact_version", kArtifactVersion},
                {"config_hash", config_hash(cfg)},
                {"seeds", {{"base", cfg.base_seed}, {"trials", cfg.mc_trials}}},
                {"augmented", mode_summary(mc.augmented)},
                {"baseline", mode_summary(mc.baseline)},
                {"trial_seconds", mc.trial_seconds}};
}

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed_first = 0;
    std::uint64_t seed_last = 0;
    std::vector<std::string> modes;
    std::vector<std::string> outputs;
    std::vector<double> wall_seconds_per_trial;
    std::string artifact_version = kArtifactVersion;
};

inline json manifest_to_json(const RunManifest& m) {
    return json{{"config_hash", m.config_hash},
                {"seed_first", m.seed_first},
                {"seed_last", m.seed_last},
                {"modes", m.modes},
                {"outputs", m.outputs},
                {"wall_seconds_per_trial", m.wall_seconds_per_trial},
                {"artifact_version", m.artifact_version}};
}

/// Execute the Monte-Carlo study and write every result artifact into
/// out_dir. With verbose set, per-step posterior dumps of the first
/// trial are written as JSON lines. Returns the manifest.
inline RunManifest run_and_write(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                                 bool verbose = false) {
    std::filesystem::create_directories(out_dir);
    const McResult mc = monte_carlo(cfg);

    // Trial-0 data regenerated for the detail files; identical stream by
    // construction.
    std::mt19937_64 rng(cfg.base_seed);
    const GroundTruth truth = generate_truth(cfg, rng);
    const auto measurements = generate_measurements(truth, cfg.sensor, rng);

    RunManifest manifest;
    manifest.config_hash = config_hash(cfg);
    manifest.seed_first = cfg.base_seed;
    manifest.seed_last = cfg.base_seed + static_cast<std::uint64_t>(cfg.mc_trials) - 1;
    manifest.modes = {"augmented", "baseline"};
    manifest.wall_seconds_per_trial = mc.trial_seconds;

    const auto add = [&](const std::string& name) {
        manifest.outputs.push_back(name);
        return out_dir / name;
    };
    write_aggregate_csv(add("aggregate.csv"), cfg, mc);
    write_truth_csv(add("trial0_truth.csv"), truth);
    write_measurements_csv(add("trial0_measurements.csv"), measurements);
    write_estimates_csv(add("trial0_estimates_augmented.csv"), mc.detail_augmented.estimates);
    write_estimates_csv(add("trial0_estimates_baseline.csv"), mc.detail_baseline.estimates);
    {
        std::ofstream out(add("summary.json"));
        out << summary_to_json(cfg, mc).dump(2) << "\n";
    }
    {
        std::ofstream out(add("config.json"));
        out << config_to_json(cfg).dump(2) << "\n";
    }
    if (verbose) {
        TrialDetailOptions detail;
        detail.keep_posteriors = true;
        detail.keep_diagnostics = true;
        for (const FilterMode mode : {FilterMode::augmented, FilterMode::baseline}) {
            const TrialResult res = run_trial_on(cfg, truth, measurements, mode, detail);
            std::ofstream out(add(std::string("trial0_state_") + to_string(mode) + ".jsonl"));
            for (std::size_t k = 0; k < res.posteriors.size(); ++k) {
                out << "# step " << (k + 1) << "\n";
                write_lmb_jsonl(out, res.posteriors[k]);
            }
            std::ofstream hyp(add(std::string("trial0_hypotheses_") + to_string(mode) + ".txt"));
            for (std::size_t k = 0; k < res.diagnostics.size(); ++k) {
                const auto& d = res.diagnostics[k];
                hyp << "step " << (k + 1) << ": " << d.hypotheses_enumerated
                    << " hypotheses enumerated\n";
                for (const auto& h : d.top_hypotheses) {
                    hyp << "  log_w=" << detail::fmt(h.log_weight) << " tracks={";
                    for (std::size_t t = 0; t < h.labels.size(); ++t) {
                        hyp << (t ? " " : "") << h.labels[t].birth_time << '.'
                            << h.labels[t].birth_index << "->" << h.theta[t];
                    }
                    hyp << "}\n";
                }
            }
        }
    }
    {
        std::ofstream out(out_dir / "manifest.json");
        out << manifest_to_json(manifest).dump(2) << "\n";
        manifest.outputs.push_back("manifest.json");
    }
    return manifest;
}

// ---- Plot-data emission ----

/// Reshape the result files in results_dir into four tidy plot-data
/// CSVs: trajectory overlays, cardinality series, OSPA series, and
/// group-count series. Throws Error when expected inputs are missing.
inline std::vector<std::string> write_plotdata(const std::filesystem::path& results_dir) {
    namespace fs = std::filesystem;
    const auto require = [&](const std::string& name) {
        const fs::path p = results_dir / name;
        if (!fs::exists(p)) throw ConfigError("missing input: " + p.string());
        return p;
    };
    const fs::path aggregate = require("aggregate.csv");
    const fs::path truth = require("trial0_truth.csv");
    const fs::path meas = require("trial0_measurements.csv");
    const fs::path est_aug = require("trial0_estimates_augmented.csv");
    const fs::path est_base = require("trial0_estimates_baseline.csv");

    // Trajectory overlay: tag every source row with a series name.
    {
        std::ofstream out(results_dir / "plot_trajectories.csv");
        out << "series,step,track,x,y,group\n";
        const auto copy_truth = [&]() {
            std::ifstream in(truth);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::string step, target, px, py, vx, vy, group;
                std::getline(ss, step, ',');
                std::getline(ss, target, ',');
                std::getline(ss, px, ',');
                std::getline(ss, py, ',');
                std::getline(ss, vx, ',');
                std::getline(ss, vy, ',');
                std::getline(ss, group, ',');
                out << "truth," << step << ',' << target << ',' << px << ',' << py << ',' << group
                    << "\n";
            }
        };
        const auto copy_meas = [&]() {
            std::ifstream in(meas);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::string step, x, y;
                std::getline(ss, step, ',');
                std::getline(ss, x, ',');
                std::getline(ss, y, ',');
                out << "measurement," << step << ",0," << x << ',' << y << ",0\n";
            }
        };
        const auto copy_est = [&](const fs::path& p, const std::string& series) {
            std::ifstream in(p);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::istringstream ss(line);
                std::string step, bt, bi, px, py, g;
                std::getline(ss, step, ',');
                std::getline(ss, bt, ',');
                std::getline(ss, bi, ',');
                std::getline(ss, px, ',');
                std::getline(ss, py, ',');
                std::getline(ss, g, ',');
                out << series << ',' << step << ',' << bt << '.' << bi << ',' << px << ',' << py
                    << ',' << g << "\n";
            }
        };
        copy_truth();
        copy_meas();
        copy_est(est_aug, "estimate_augmented");
        copy_est(est_base, "estimate_baseline");
    }

    // Per-step series from the aggregate table.
    struct Row {
        int step;
        std::string mode;
        double ospa, n_hat, groups_hat;
        int n_true, groups_true;
    };
    std::vector<Row> rows;
    {
        std::ifstream in(aggregate);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            Row r;
            std::string field;
            std::getline(ss, field, ',');
            r.step = std::stoi(field);
            std::getline(ss, r.mode, ',');
            std::getline(ss, field, ',');
            r.ospa = std::stod(field);
            std::getline(ss, field, ',');
            r.n_true = std::stoi(field);
            std::getline(ss, field, ',');
            r.n_hat = std::stod(field);
            std::getline(ss, field, ',');
            r.groups_true = std::stoi(field);
            std::getline(ss, field, ',');
            r.groups_hat = std::stod(field);
            rows.push_back(r);
        }
    }
    const auto by_mode = [&](const std::string& mode, int step) -> const Row* {
        for (const auto& r : rows) {
            if (r.mode == mode && r.step == step) return &r;
        }
        return nullptr;
    };
    int max_step = 0;
    for (const auto& r : rows) max_step = std::max(max_step, r.step);

    {
        std::ofstream out(results_dir / "plot_cardinality.csv");
        out << "step,n_true,n_hat_augmented,n_hat_baseline\n";
        for (int k = 1; k <= max_step; ++k) {
            const Row* a = by_mode("augmented", k);
            const Row* b = by_mode("baseline", k);
            if (!a || !b) continue;
            out << k << ',' << a->n_true << ',' << detail::fmt(a->n_hat) << ','
                << detail::fmt(b->n_hat) << "\n";
        }
    }
    {
        std::ofstream out(results_dir / "plot_ospa.csv");
        out << "step,ospa_augmented,ospa_baseline\n";
        for (int k = 1; k <= max_step; ++k) {
            const Row* a = by_mode("augmented", k);
            const Row* b = by_mode("baseline", k);
            if (!a || !b) continue;
            out << k << ',' << detail::fmt(a->ospa) << ',' << detail::fmt(b->ospa) << "\n";
        }
    }
    {
        std::ofstream out(results_dir / "plot_groupcount.csv");
        out << "step,groups_true,groups_augmented,groups_baseline\n";
        for (int k = 1; k <= max_step; ++k) {
            const Row* a = by_mode("augmented", k);
            const Row* b = by_mode("baseline", k);
            if (!a || !b) continue;
            out << k << ',' << a->groups_true << ',' << detail::fmt(a->groups_hat) << ','
                << detail::fmt(b->groups_hat) << "\n";
        }
    }
    return {"plot_trajectories.csv", "plot_cardinality.csv", "plot_ospa.csv",
            "plot_groupcount.csv"};
}

} // namespace grouptrack

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "grouptrack/io.hpp"

using namespace grouptrack;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("grouptrack_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig quick_config() {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.steps = 25;
    cfg.mc_trials = 2;
    cfg.filter_params.max_hypotheses = 150;
    for (auto& t : cfg.truth.targets) t.death_step = cfg.steps;
    return cfg;
}

} // namespace

TEST(ConfigJson, RoundTripPreservesEverything) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.steps = 42;
    cfg.sensor.p_detect = 0.9;
    cfg.truth.formation_scale = 0.6;
    cfg.filter_params.max_hypotheses = 123;
    const ScenarioConfig back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(ConfigJson, PartialDocumentKeepsDefaults) {
    const json j = {{"sensor", {{"detection_probability", 0.8}}}};
    const ScenarioConfig cfg = config_from_json(j);
    EXPECT_DOUBLE_EQ(cfg.sensor.p_detect, 0.8);
    EXPECT_DOUBLE_EQ(cfg.sensor.sigma_r, 10.0);
    EXPECT_EQ(cfg.steps, 100);
}

TEST(ConfigJson, FieldLevelErrors) {
    EXPECT_THROW(config_from_json(json::array()), ConfigError);
    EXPECT_THROW(config_from_json({{"sensor", {{"region", {1, 2, 3}}}}}), ConfigError);
    EXPECT_THROW(config_from_json({{"run", {{"steps", "many"}}}}), ConfigError);
    try {
        config_from_json({{"birth", {{"components", {{{"existence", 0.1}}}}}}});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("birth.components[0]"), std::string::npos);
    }
}

TEST(ConfigJson, HashStableAndSensitive) {
    const ScenarioConfig a = ScenarioConfig::defaults();
    ScenarioConfig b = ScenarioConfig::defaults();
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.sensor.clutter_rate = 31.0;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ConfigJson, DiffListsOnlyChangedKeys) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    EXPECT_TRUE(config_diff_from_defaults(cfg).empty());
    cfg.group_threshold_m = 50.0;
    const auto diff = config_diff_from_defaults(cfg);
    ASSERT_EQ(diff.size(), 1u);
    EXPECT_NE(diff[0].find("grouping.group_threshold_m"), std::string::npos);
}

TEST(ConfigFile, SaveLoadRoundTrip) {
    TempDir tmp;
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.base_seed = 99;
    const fs::path p = tmp.path / "config.json";
    save_config(cfg, p);
    const ScenarioConfig back = load_config(p);
    EXPECT_EQ(back.base_seed, 99u);
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(LmbJsonl, RoundTripProperty) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::normal_distribution<double> g(0.0, 50.0);
    LmbDensity d;
    for (int i = 0; i < 5; ++i) {
        BernoulliTrack t;
        t.existence = u(rng);
        GaussianMixture mix;
        const int comps = 1 + static_cast<int>(rng() % 3);
        for (int c = 0; c < comps; ++c) {
            GaussianComponent gc;
            gc.weight = u(rng);
            gc.mean = Vec4(g(rng), g(rng), g(rng), g(rng));
            gc.covariance = Mat4::Identity() * (1.0 + u(rng));
            mix.components.push_back(gc);
        }
        t.density = mix.normalized();
        t.label.birth_time = 1 + static_cast<int>(rng() % 9);
        t.label.birth_index = i + 1;
        t.label.group_id = static_cast<int>(rng() % 3);
        t.label.group_center = t.label.group_id ? Vec4(g(rng), 0, g(rng), 0) : Vec4::Zero();
        d.tracks.push_back(t);
    }

    std::stringstream ss;
    write_lmb_jsonl(ss, d);
    const LmbDensity back = read_lmb_jsonl(ss);
    ASSERT_EQ(back.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_DOUBLE_EQ(back.tracks[i].existence, d.tracks[i].existence);
        EXPECT_EQ(back.tracks[i].label.birth_time, d.tracks[i].label.birth_time);
        EXPECT_EQ(back.tracks[i].label.group_id, d.tracks[i].label.group_id);
        ASSERT_EQ(back.tracks[i].density.size(), d.tracks[i].density.size());
        for (std::size_t c = 0; c < d.tracks[i].density.size(); ++c) {
            EXPECT_DOUBLE_EQ(back.tracks[i].density.components[c].weight,
                             d.tracks[i].density.components[c].weight);
            EXPECT_TRUE(back.tracks[i].density.components[c].covariance.isApprox(
                d.tracks[i].density.components[c].covariance));
        }
    }
}

TEST(LmbJsonl, MalformedLineRaises) {
    std::stringstream ss("{\"existence\": 0.5}\n");
    EXPECT_THROW(read_lmb_jsonl(ss), ConfigError);
}

TEST(RunAndWrite, ProducesExpectedArtifacts) {
    TempDir tmp;
    const ScenarioConfig cfg = quick_config();
    const RunManifest manifest = run_and_write(cfg, tmp.path);
    for (const char* name :
         {"aggregate.csv", "trial0_truth.csv", "trial0_measurements.csv",
          "trial0_estimates_augmented.csv", "trial0_estimates_baseline.csv", "summary.json",
          "config.json", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(tmp.path / name)) << name;
    }
    EXPECT_EQ(manifest.config_hash, config_hash(cfg));
    EXPECT_EQ(manifest.seed_first, cfg.base_seed);
    EXPECT_EQ(manifest.seed_last, cfg.base_seed + 1);

    // Aggregate CSV shape: header + steps rows per mode.
    std::ifstream in(tmp.path / "aggregate.csv");
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "step,mode,ospa,n_true,n_hat,groups_true,groups_hat");
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, cfg.steps * 2);
}

TEST(RunAndWrite, RerunIsByteIdentical) {
    TempDir a, b;
    const ScenarioConfig cfg = quick_config();
    run_and_write(cfg, a.path);
    run_and_write(cfg, b.path);
    for (const char* name : {"aggregate.csv", "trial0_truth.csv", "trial0_measurements.csv",
                             "trial0_estimates_augmented.csv", "trial0_estimates_baseline.csv"}) {
        EXPECT_EQ(slurp(a.path / name), slurp(b.path / name)) << name;
    }
}

TEST(Plotdata, EmitsFourFiles) {
    TempDir tmp;
    const ScenarioConfig cfg = quick_config();
    run_and_write(cfg, tmp.path);
    const auto files = write_plotdata(tmp.path);
    EXPECT_EQ(files.size(), 4u);
    for (const auto& f : files) EXPECT_TRUE(fs::exists(tmp.path / f)) << f;

    // OSPA series length equals the step count.
    std::ifstream in(tmp.path / "plot_ospa.csv");
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, cfg.steps);

    // Baseline group-count series is identically zero.
    std::ifstream gin(tmp.path / "plot_groupcount.csv");
    std::getline(gin, line);
    while (std::getline(gin, line)) {
        const auto last_comma = line.rfind(',');
        EXPECT_DOUBLE_EQ(std::stod(line.substr(last_comma + 1)), 0.0);
    }
}

TEST(Plotdata, MissingInputsRaise) {
    TempDir tmp;
    EXPECT_THROW(write_plotdata(tmp.path), ConfigError);
}

TEST(RunAndWrite, ZeroGroupThresholdReportsNoGroups) {
    TempDir tmp;
    ScenarioConfig cfg = quick_config();
    cfg.steps = 12;
    cfg.mc_trials = 1;
    cfg.group_threshold_m = 0.0;
    for (auto& t : cfg.truth.targets) t.death_step = cfg.steps;
    run_and_write(cfg, tmp.path);
    std::ifstream in(tmp.path / "aggregate.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto last_comma = line.rfind(',');
        EXPECT_DOUBLE_EQ(std::stod(line.substr(last_comma + 1)), 0.0) << line;
    }
}

TEST(StateDumps, VerboseRunWritesJsonl) {
    TempDir tmp;
    ScenarioConfig cfg = quick_config();
    cfg.steps = 10;
    cfg.mc_trials = 1;
    for (auto& t : cfg.truth.targets) t.death_step = cfg.steps;
    run_and_write(cfg, tmp.path, /*verbose=*/true);
    EXPECT_TRUE(fs::exists(tmp.path / "trial0_state_augmented.jsonl"));
    EXPECT_TRUE(fs::exists(tmp.path / "trial0_state_baseline.jsonl"));
    EXPECT_TRUE(fs::exists(tmp.path / "trial0_hypotheses_augmented.jsonl") ||
                fs::exists(tmp.path / "trial0_hypotheses_augmented.txt"));
    // Non-comment lines parse back into tracks.
    std::ifstream in(tmp.path / "trial0_state_augmented.jsonl");
    std::stringstream tracks_only;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            tracks_only << line << "\n";
            ++n;
        }
    }
    EXPECT_GT(n, 0);
    EXPECT_NO_THROW(read_lmb_jsonl(tracks_only));
}

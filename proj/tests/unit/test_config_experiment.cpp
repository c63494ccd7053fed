#include <gtest/gtest.h>

#include <sstream>

#include "support/oracles.hpp"

using namespace litaug;

namespace {

AppConfig parse(const std::string& text) { return parse_config(text, "/tmp/cfg/config.toml"); }

std::vector<LabeledTriplet> small_dataset() {
    std::vector<LabeledTriplet> rows;
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            for (int c = 0; c < 2; ++c)
                rows.push_back({make_triplet("d" + std::to_string(a), "d" + std::to_string(b), "c" + std::to_string(c)), (a == 0) == (c == 0) ? 1 : 0});
    return rows;
}

TrainConfig tiny() {
    TrainConfig c;
    c.epochs = 3;
    c.batch_size = 8;
    c.d_emb = 3;
    c.hidden_dim = 4;
    c.hidden_layers = 1;
    return c;
}

}  // namespace

TEST(Config, FixtureConfigLoads) {
    const auto c = load_config(std::string(LITAUG_FIXTURES_DIR) + "/config.toml");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.cluster.k, 6u);
    EXPECT_EQ(c.augment.gamma, 3);
    EXPECT_TRUE(std::filesystem::path(c.corpus).is_absolute());
    EXPECT_EQ(c.eval.seeds, (std::vector<std::uint64_t>{1, 2}));
}

TEST(Config, DefaultsAndRelativePaths) {
    const auto c = parse("[corpus]\npath = \"data/c.jsonl\"\n");
    EXPECT_EQ(c.corpus, "/tmp/cfg/data/c.jsonl");
    EXPECT_EQ(c.augment.gamma, 3);
    EXPECT_EQ(c.gateway.backend, "mock");
    EXPECT_EQ(c.train.warmup_mode, WarmupMode::LearningRate);
    EXPECT_EQ(c.keywords, default_keywords());
}

TEST(Config, InvalidValuesAreRejected) {
    for (const char* bad : {"surprise = 1\n", "[cluster]\nk = 0\n", "[cluster]\nmetric = \"manhattan\"\n", "[gateway]\nbackend = \"grpc\"\n",
                            "[gateway]\ntimeout = 0.0\n", "[synthesis]\ndecoding = \"sample\"\n", "[synthesis]\nvariants = \"some\"\n",
                            "[train]\nlearning_rate = -1.0\n", "[train]\nwarmup_mode = \"later\"\n", "[eval]\nseeds = []\n",
                            "[eval]\nsplit = \"random\"\n", "[loop]\ngamma = \"three\"\n", "seed = \n"})
        EXPECT_THROW(parse(bad), ValidationError) << bad;
}

TEST(Config, MissingFileIsAnIoError) { EXPECT_THROW(load_config("/nonexistent/config.toml"), IoError); }

TEST(Manifest, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, RecordsInputsAndOutputs) {
    const auto dir = oracle::fresh_dir("manifest");
    std::ofstream(dir / "in.txt") << "abc";
    RunManifest m("unit", {"a", "b"}, nlohmann::json::object(), 5);
    m.add_input(dir / "in.txt");
    m.time("stage", 1.5);
    m.write(dir);
    const auto j = nlohmann::json::parse(oracle::slurp(dir / "manifest.json"));
    EXPECT_EQ(j["inputs"][std::filesystem::weakly_canonical(dir / "in.txt").string()], sha256_hex("abc"));
    EXPECT_EQ(j["seed"], 5);
    EXPECT_EQ(j["timings"]["stage"], 1.5);
    EXPECT_TRUE(j["timings"].contains("total"));
}

TEST(Experiment, SettingsShareTheirUnits) {
    const auto rows = small_dataset();
    ExperimentPlan plan;
    plan.folds = 3;
    plan.seeds = {4, 5};
    const auto base = run_setting("no-aug", rows, {}, tiny(), plan);
    ASSERT_EQ(base.units.size(), 2u);
    EXPECT_EQ(base.units[0].size(), 3u);
    plan.jobs = 3;
    const auto again = run_setting("again", rows, {}, tiny(), plan);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(base.units[s][f].auprc, again.units[s][f].auprc);
    const auto same = summarize(again, 0, &base);
    ASSERT_TRUE(same.p_value.has_value());
    EXPECT_EQ(*same.p_value, 0.5);
    EXPECT_FALSE(summarize(base, 0, &base).p_value.has_value());
}

TEST(Experiment, SummaryMatchesHandComputation) {
    SettingResult r{"x", {{{0.2, 0, 0, 0}, {0.4, 0, 0, 0}}, {{0.9, 0, 0, 0}, {0.5, 0, 0, 0}}}};
    const auto s = summarize(r, 0);
    EXPECT_NEAR(s.mean, 0.5, 1e-12);
    EXPECT_NEAR(s.stderr_folds, (0.1 + 0.2) / 2, 1e-12);
    EXPECT_NEAR(s.stderr_seeds, 0.2, 1e-12);
}

TEST(Experiment, UnseenPlanUsesOneUnitPerSeed) {
    ExperimentPlan plan;
    plan.seeds = {1, 2, 3};
    plan.split = SplitMode::Drug;
    plan.holdout_fraction = 0.34;
    const auto r = run_setting("drug", small_dataset(), {}, tiny(), plan);
    ASSERT_EQ(r.units.size(), 3u);
    for (const auto& u : r.units) EXPECT_EQ(u.size(), 1u);
}

TEST(Experiment, TableFormats) {
    SettingResult a{"no-aug", {{{0.2, 0.3, 0.4, 0.1}, {0.4, 0.3, 0.5, 0.2}}}};
    SettingResult b{"iterative", {{{0.3, 0.3, 0.4, 0.1}, {0.6, 0.3, 0.5, 0.2}}}};
    std::ostringstream csv;
    write_table_csv(csv, {a, b}, &a);
    const auto text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "setting,metric,mean,stderr_folds,stderr_seeds,p_value_vs_no_aug");
    EXPECT_NE(text.find("no-aug,AUPRC,0.3,0.1,0,\n"), std::string::npos);
    EXPECT_NE(text.find("iterative,kappa,"), std::string::npos);
    const auto j = table_json({a, b}, &a);
    EXPECT_TRUE(j[0]["metrics"]["AUPRC"]["p_value_vs_no_aug"].is_null());
    EXPECT_FALSE(j[1]["metrics"]["AUPRC"]["p_value_vs_no_aug"].is_null());
    EXPECT_EQ(j[1]["units"][0].size(), 2u);
}

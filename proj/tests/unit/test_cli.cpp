#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::string& args, const fs::path& dir) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const auto cmd = std::string(LITAUG_BINARY) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, oracle::slurp(out), oracle::slurp(err)};
}

// A config in `dir` over the shared fixtures, writing under dir/out.
fs::path write_config(const fs::path& dir, const std::string& extra_eval = "", const std::string& extra_root = "") {
    const std::string fx = LITAUG_FIXTURES_DIR;
    const auto path = dir / "config.toml";
    std::ofstream(path) << extra_root << "seed = 7\n"
                        << "[corpus]\npath = \"" << fx << "/corpus.jsonl\"\n"
                        << "[vocab]\nfiles = [\"" << fx << "/vocab.tsv\"]\ndataset = \"" << fx << "/dataset.csv\"\n"
                        << "[gateway]\nbackend = \"mock\"\nseed = 7\nembedding_dim = 16\ntokens = \"" << fx << "/mock_tokens.tsv\"\n"
                        << "[cluster]\nk = 4\n"
                        << "[synthesis]\nsamples_per_template = 6\n"
                        << "[loop]\ngamma = 2\noutput_dir = \"out\"\n"
                        << "[train]\nepochs = 3\nbatch_size = 32\nd_emb = 4\nhidden_dim = 8\nhidden_layers = 1\n"
                        << "[eval]\nfolds = 2\nseeds = [1]\n"
                        << extra_eval;
    return path;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(oracle::slurp(dir / "manifest.json")); }

std::string key(const fs::path& p) { return fs::weakly_canonical(p).string(); }

}  // namespace

TEST(Cli, HelpAndVersion) {
    const auto dir = oracle::fresh_dir("cli-help");
    auto r = run("--help", dir);
    EXPECT_EQ(r.code, 0);
    for (const char* sub : {"mine", "cluster", "synthesize", "augment", "train", "predict", "evaluate", "audit-leakage", "export-embeddings"})
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
    EXPECT_EQ(run("augment --help", dir).code, 0);
    r = run("--version", dir);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(litaug::kVersion), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
    const auto dir = oracle::fresh_dir("cli-usage");
    EXPECT_EQ(run("frobnicate", dir).code, 1);
    EXPECT_EQ(run("augment", dir).code, 1);
    EXPECT_EQ(run("augment -c x.toml -m bogus", dir).code, 1);
}

TEST(Cli, MissingConfigExitsTwoAndNamesThePath) {
    const auto dir = oracle::fresh_dir("cli-missing");
    const auto r = run("mine -c " + (dir / "nope.toml").string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("nope.toml"), std::string::npos);
}

TEST(Cli, UnknownConfigKeyExitsOne) {
    const auto dir = oracle::fresh_dir("cli-badkey");
    const auto cfg = write_config(dir, "", "colour = \"blue\"\n");
    const auto r = run("mine -c " + cfg.string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST(Cli, UnreachableHttpGatewayExitsThree) {
    const auto dir = oracle::fresh_dir("cli-http");
    auto text = oracle::slurp(write_config(dir));
    text.replace(text.find("backend = \"mock\""), 16, "backend = \"http\"\nurl = \"http://127.0.0.1:1\"\nmax_retries = 0\ntimeout = 1");
    std::ofstream(dir / "config.toml") << text;
    EXPECT_EQ(run("augment -c " + (dir / "config.toml").string(), dir).code, 3);
}

TEST(Cli, JobCountDoesNotChangeOutput) {
    const auto dir = oracle::fresh_dir("cli-jobs");
    const auto cfg = write_config(dir);
    ASSERT_EQ(run("augment -c " + cfg.string() + " -j 1 -o " + (dir / "a").string(), dir).code, 0);
    ASSERT_EQ(run("augment -c " + cfg.string() + " -j 8 -o " + (dir / "b").string(), dir).code, 0);
    for (const char* f : {"synthetic.jsonl", "augmented.jsonl", "templates.jsonl", "vocab.tsv", "stats.json"})
        EXPECT_EQ(oracle::slurp(dir / "a" / f), oracle::slurp(dir / "b" / f)) << f;
}

TEST(Cli, ManifestsChainAugmentTrainEvaluate) {
    const auto dir = oracle::fresh_dir("cli-chain");
    const auto cfg = write_config(dir, "[eval.datasets]\niterative = \"out/iterative/synthetic.jsonl\"\n");
    const auto c = " -c " + cfg.string();
    ASSERT_EQ(run("augment" + c, dir).code, 0);
    const auto aug = dir / "out" / "iterative";
    const auto synthetic = aug / "synthetic.jsonl";
    const auto am = manifest(aug);
    ASSERT_TRUE(am["outputs"].contains(key(synthetic)));
    EXPECT_EQ(am["outputs"][key(synthetic)], litaug::file_sha256(synthetic));
    EXPECT_EQ(am["command"], "augment");
    EXPECT_EQ(am["seed"], 7);

    ASSERT_EQ(run("train" + c + " --synthetic " + synthetic.string(), dir).code, 0);
    const auto train_dir = dir / "out" / "train";
    const auto tm = manifest(train_dir);
    EXPECT_EQ(tm["inputs"][key(synthetic)], am["outputs"][key(synthetic)]);
    const auto model = train_dir / "model.json";
    ASSERT_TRUE(tm["outputs"].contains(key(model)));

    const auto r = run("evaluate" + c + " --model " + model.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto em = manifest(dir / "out" / "evaluate");
    EXPECT_EQ(em["inputs"][key(model)], tm["outputs"][key(model)]);
    EXPECT_EQ(em["inputs"][key(synthetic)], am["outputs"][key(synthetic)]);
    EXPECT_NE(r.out.find("iterative,AUPRC"), std::string::npos);
    EXPECT_NE(r.out.find("no-aug,AUPRC"), std::string::npos);
}

TEST(Cli, PredictWritesOneScorePerRow) {
    const auto dir = oracle::fresh_dir("cli-predict");
    const auto cfg = write_config(dir);
    ASSERT_EQ(run("train -c " + cfg.string(), dir).code, 0);
    std::ofstream(dir / "in.csv") << "drug_a,drug_b,cell_line\ncisplatin,taxol,MCF7\nnever-seen,taxol,MCF7\n";
    const auto r = run("predict --model " + (dir / "out" / "train" / "model.json").string() + " -i " + (dir / "in.csv").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t lines = 0;
    for (char ch : r.out) lines += ch == '\n';
    EXPECT_EQ(lines, 3u);
}

TEST(Cli, ResumeFinishesAnInterruptedRun) {
    const auto dir = oracle::fresh_dir("cli-resume");
    const auto cfg = write_config(dir);
    ASSERT_EQ(run("augment -c " + cfg.string() + " -o " + (dir / "full").string(), dir).code, 0);
    ASSERT_EQ(run("augment -c " + cfg.string() + " -o " + (dir / "part").string(), dir).code, 0);
    fs::remove(dir / "part" / "checkpoints" / litaug::checkpoint_name(2));
    fs::remove(dir / "part" / "synthetic.jsonl");
    ASSERT_EQ(run("augment --resume -c " + cfg.string() + " -o " + (dir / "part").string(), dir).code, 0);
    EXPECT_EQ(oracle::slurp(dir / "part" / "synthetic.jsonl"), oracle::slurp(dir / "full" / "synthetic.jsonl"));
}

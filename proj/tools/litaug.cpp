#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "litaug/litaug.hpp"

namespace fs = std::filesystem;
using namespace litaug;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
    auto* opt = cmd->add_option("-c,--config", c.config, "TOML config file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", c.seed, "Override the config seed");
    cmd->add_option("-j,--jobs", c.jobs, "Worker threads (output does not depend on it)")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--out", c.out, "Output directory");
}

std::vector<std::string> g_argv;

struct Context {
    AppConfig cfg;
    std::uint64_t seed;
    unsigned jobs;
    fs::path out;
    RunManifest manifest;

    Context(const Common& c, const std::string& command, const std::string& default_subdir)
        : cfg(load_config(c.config)), seed(c.seed.value_or(cfg.seed)), jobs(c.jobs),
          out(c.out.empty() ? fs::path(cfg.output_dir) / default_subdir : fs::path(c.out)),
          manifest(command, g_argv, cfg.snapshot, seed) {
        fs::create_directories(out);
        manifest.add_input(cfg.path);
    }

    void finish() { manifest.write(out); }

    template <typename Fn>
    void write(const std::string& name, Fn&& fn) {
        const auto p = out / name;
        std::ofstream f(p);
        if (!f) throw IoError("cannot write " + p.string());
        fn(f);
        f.close();
        if (!f) throw IoError("failed writing " + p.string());
        manifest.add_output(p);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::string require_path(const std::string& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string("config: ") + what + " is required");
    return p;
}

std::vector<Abstract> read_corpus(Context& ctx) {
    const auto path = require_path(ctx.cfg.corpus, "[corpus] path");
    auto load = load_corpus(path);
    ctx.manifest.add_input(path);
    for (const auto& w : load.warnings) warn(w);
    if (load.skipped > 0) warn(std::to_string(load.skipped) + " malformed corpus line(s) skipped in " + path);
    ctx.manifest.note("corpus_skipped_lines", load.skipped);
    return std::move(load.abstracts);
}

SentenceSplitter make_splitter(Context& ctx) {
    if (ctx.cfg.abbreviations.empty()) return {};
    ctx.manifest.add_input(ctx.cfg.abbreviations);
    return SentenceSplitter(load_abbreviations(ctx.cfg.abbreviations));
}

std::vector<LabeledTriplet> read_dataset(Context& ctx) {
    const auto path = require_path(ctx.cfg.dataset, "[vocab] dataset");
    auto load = load_dataset(path);
    ctx.manifest.add_input(path);
    if (load.duplicates_dropped > 0) warn(std::to_string(load.duplicates_dropped) + " duplicate dataset row(s) dropped");
    return std::move(load.rows);
}

EntityVocabulary read_vocab(Context& ctx) {
    EntityVocabulary v;
    for (const auto& f : ctx.cfg.vocab_files) {
        v.merge(load_vocabulary(f));
        ctx.manifest.add_input(f);
    }
    return v;
}

std::unique_ptr<Gateway> open_gateway(Context& ctx) {
    if (ctx.cfg.gateway.backend == "mock" && !ctx.cfg.gateway.mock_tokens.empty()) ctx.manifest.add_input(ctx.cfg.gateway.mock_tokens);
    auto gw = make_gateway(ctx.cfg.gateway);
    ctx.manifest.note("model_id", gw->model_id());
    return gw;
}

// Seed entities plus external lists, with seed counts reported.
EntityVocabulary full_vocab(Context& ctx, const std::vector<LabeledTriplet>& dataset) {
    auto vocab = read_vocab(ctx);
    vocab.add_dataset(dataset);
    std::cerr << "vocabulary: " << vocab.count(EntityType::Drug) << " drugs, " << vocab.count(EntityType::CellLine) << " cell lines ("
              << vocab.count(EntityType::Drug, Source::SeedDataset) << " / " << vocab.count(EntityType::CellLine, Source::SeedDataset)
              << " from the dataset)\n";
    return vocab;
}

MiningOptions mining_options(const Context& ctx) { return {ctx.cfg.keywords, ctx.jobs}; }

void write_templates(std::ostream& out, const std::vector<PromptTemplate>& ts) {
    for (const auto& t : ts) out << to_json(t).dump() << '\n';
}

std::vector<PromptTemplate> read_templates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read templates: " + path);
    std::vector<PromptTemplate> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ValidationError(path + ":" + std::to_string(n) + ": invalid JSON");
        try {
            out.push_back(template_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<MinedSentence> read_mined(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read mined sentences: " + path);
    std::vector<MinedSentence> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ValidationError(path + ":" + std::to_string(n) + ": invalid JSON");
        try {
            out.push_back(mined_sentence_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<MinedSentence> mine_or_read(Context& ctx, const std::string& mined_path) {
    if (!mined_path.empty()) {
        ctx.manifest.add_input(mined_path);
        return read_mined(mined_path);
    }
    const auto corpus = read_corpus(ctx);
    const auto splitter = make_splitter(ctx);
    const auto dataset = read_dataset(ctx);
    const auto vocab = full_vocab(ctx, dataset);
    return mine_candidates(corpus, build_matcher(vocab), mining_options(ctx), splitter);
}

int cmd_mine(const Common& c) {
    Context ctx(c, "mine", "mine");
    const auto t0 = std::chrono::steady_clock::now();
    const auto mined = mine_or_read(ctx, "");
    ctx.manifest.time("mine", seconds_since(t0));
    ctx.write("mined.jsonl", [&](std::ostream& o) {
        for (const auto& m : mined) o << to_json(m).dump() << '\n';
    });
    if (mined.empty()) warn("no candidate sentences mined");
    std::cerr << "mined " << mined.size() << " sentence(s)\n";
    ctx.finish();
    return 0;
}

TemplateMiningOptions cluster_options(const Context& ctx) {
    auto o = ctx.cfg.cluster;
    o.jobs = ctx.jobs;
    return o;
}

int cmd_cluster(const Common& c, const std::string& mined_path, int iteration) {
    Context ctx(c, "cluster", "cluster");
    const auto mined = mine_or_read(ctx, mined_path);
    auto gw = open_gateway(ctx);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = mine_templates(*gw, mined, iteration, cluster_options(ctx));
    ctx.manifest.time("cluster", seconds_since(t0));
    if (r.candidates.empty()) warn("no candidate sentences; no templates produced");
    ctx.write("templates.jsonl", [&](std::ostream& o) { write_templates(o, r.templates); });
    ctx.write("candidates.jsonl", [&](std::ostream& o) { write_templates(o, r.candidates); });
    ctx.write("clustering.json", [&](std::ostream& o) {
        o << nlohmann::json{{"k", r.clustering.k},
                            {"medoids", r.clustering.medoids},
                            {"assignment", r.clustering.assignment},
                            {"total_cost", r.clustering.total_cost},
                            {"build_cost", r.clustering.build_cost},
                            {"cost_trace", r.clustering.cost_trace},
                            {"swaps", r.clustering.swaps}}
                 .dump(2)
          << '\n';
    });
    std::cerr << r.candidates.size() << " candidate template(s), " << r.templates.size() << " medoid template(s)\n";
    ctx.finish();
    return 0;
}

int cmd_export_embeddings(const Common& c, const std::string& mined_path) {
    Context ctx(c, "export-embeddings", "embeddings");
    const auto mined = mine_or_read(ctx, mined_path);
    auto gw = open_gateway(ctx);
    const auto r = mine_templates(*gw, mined, 1, cluster_options(ctx));
    ctx.write("embeddings.tsv", [&](std::ostream& o) {
        o << "template_id\tcluster\tis_medoid\ttext";
        for (std::size_t d = 0; d < gw->dim(); ++d) o << "\tdim" << d;
        o << '\n';
        o.precision(17);
        for (std::size_t i = 0; i < r.candidates.size(); ++i) {
            const bool medoid = std::binary_search(r.clustering.medoids.begin(), r.clustering.medoids.end(), i);
            o << r.candidates[i].id << '\t' << r.clustering.assignment[i] << '\t' << (medoid ? 1 : 0) << '\t' << r.candidates[i].render_masked();
            for (double x : r.embeddings[i]) o << '\t' << x;
            o << '\n';
        }
    });
    ctx.finish();
    return 0;
}

int cmd_synthesize(const Common& c, const std::string& templates_path, bool restricted) {
    Context ctx(c, "synthesize", "synthesize");
    auto dataset = read_dataset(ctx);
    auto gw = open_gateway(ctx);
    std::vector<PromptTemplate> templates;
    bool warm = ctx.cfg.augment.warm_start;
    if (templates_path.empty()) {
        templates = manual_templates();
        warm = ctx.cfg.augment.manual_warm_start;
    } else {
        templates = read_templates(templates_path);
        ctx.manifest.add_input(templates_path);
    }
    auto state = initial_state(restricted ? AugmentMode::Restricted : AugmentMode::Iterative, ctx.seed, full_vocab(ctx, dataset), dataset);
    auto ac = ctx.cfg.augment;
    ac.seed = ctx.seed;
    ac.jobs = ctx.jobs;
    const auto stats = synthesize_round(state, templates, *gw, restricted ? FillMode::Restricted : FillMode::Unrestricted, warm, ac, 1);
    for (const auto& w : stats.warnings) warn(w);
    ctx.write("synthetic.jsonl", [&](std::ostream& o) { write_synthetic(o, state.synthetic); });
    ctx.write("stats.json", [&](std::ostream& o) { o << to_json(stats).dump(2) << '\n'; });
    std::cerr << state.synthetic.size() << " synthetic triplet(s) from " << stats.prompts << " prompt(s), " << stats.discarded << " discarded\n";
    ctx.finish();
    return 0;
}

int cmd_augment(const Common& c, const std::string& mode_name, bool no_warm_start, bool resume) {
    const auto mode = parse_augment_mode(mode_name);
    Context ctx(c, "augment", mode_name + (no_warm_start ? "-no-warm-start" : ""));
    auto corpus = read_corpus(ctx);
    const auto splitter = make_splitter(ctx);
    auto dataset = read_dataset(ctx);
    auto gw = open_gateway(ctx);
    if (ctx.cfg.filter_dataset) {
        const auto before = dataset.size();
        dataset = filter_dataset(dataset, [&](std::string_view s) { return gw->in_vocabulary(s); });
        std::cerr << "dataset filtered to gateway vocabulary: " << dataset.size() << " of " << before << " row(s) kept\n";
        if (dataset.empty()) throw ValidationError("no dataset row has an element in the gateway vocabulary");
    }
    PipelineInputs inputs{std::move(corpus), read_vocab(ctx), dataset};
    auto ac = ctx.cfg.augment;
    ac.seed = ctx.seed;
    ac.jobs = ctx.jobs;
    ac.mining = mining_options(ctx);
    ac.cluster = cluster_options(ctx);
    if (no_warm_start) ac.warm_start = ac.manual_warm_start = false;
    const auto checkpoint_dir = ctx.cfg.checkpoints ? (ctx.out / "checkpoints").string() : std::string{};

    const auto t0 = std::chrono::steady_clock::now();
    const auto state = run_pipeline(inputs, *gw, mode, ac, splitter, checkpoint_dir, resume);
    ctx.manifest.time("augment", seconds_since(t0));

    for (const auto& r : state.history) {
        for (const auto& w : r.warnings) warn(w);
        std::cerr << "iteration " << r.iteration << ": " << r.mined_sentences << " mined, " << r.new_templates << " new template(s), pool "
                  << r.pool_size << ", " << r.prompts << " prompt(s), " << r.added << " new triplet(s), total " << r.synthetic_total << '\n';
    }
    ctx.write("synthetic.jsonl", [&](std::ostream& o) { write_synthetic(o, state.synthetic); });
    ctx.write("augmented.jsonl", [&](std::ostream& o) {
        for (const auto& r : state.dataset)
            o << nlohmann::json{{"drug_a", r.triplet.drug_a}, {"drug_b", r.triplet.drug_b}, {"cell", r.triplet.cell}, {"label", r.label},
                                {"weight", 1.0}, {"synthetic", false}, {"provenance", nullptr}}
                     .dump()
              << '\n';
        for (const auto& w : state.synthetic) {
            auto j = to_json(w);
            j["synthetic"] = true;
            o << j.dump() << '\n';
        }
    });
    ctx.write("templates.jsonl", [&](std::ostream& o) { write_templates(o, state.template_pool); });
    ctx.write("vocab.tsv", [&](std::ostream& o) { write_vocabulary(o, state.vocab); });
    ctx.write("stats.json", [&](std::ostream& o) {
        nlohmann::json h = nlohmann::json::array();
        for (const auto& r : state.history) h.push_back(to_json(r));
        o << nlohmann::json{{"mode", to_string(mode)}, {"iterations", state.iteration}, {"rounds", h}}.dump(2) << '\n';
    });
    ctx.finish();
    return 0;
}

std::vector<WeightedTriplet> read_synthetic_input(Context& ctx, const std::string& path) {
    if (path.empty()) return {};
    ctx.manifest.add_input(path);
    return load_synthetic(path);
}

int cmd_train(const Common& c, const std::string& synthetic_path, bool grid) {
    Context ctx(c, "train", "train");
    const auto dataset = read_dataset(ctx);
    const auto synthetic = read_synthetic_input(ctx, synthetic_path);
    auto tc = ctx.cfg.train;
    tc.seed = ctx.seed;
    if (grid) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = grid_search(Grid{}, cv_auprc_scorer(dataset, synthetic, tc, ctx.cfg.eval.grid_folds, ctx.seed), ctx.jobs);
        ctx.manifest.time("grid_search", seconds_since(t0));
        tc = apply(tc, r.best);
        ctx.write("grid.json", [&](std::ostream& o) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& [p, s] : r.scores)
                rows.push_back({{"learning_rate", p.learning_rate}, {"hidden_dim", p.hidden_dim}, {"warmup_epochs", p.warmup_epochs},
                                {"use_instance_weights", p.use_instance_weights}, {"auprc", s}});
            o << nlohmann::json{{"best_auprc", r.best_score}, {"scores", rows}}.dump(2) << '\n';
        });
    }
    const auto rows = merge_datasets(dataset, synthetic);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = train(rows, tc);
    ctx.manifest.time("train", seconds_since(t0));
    std::cerr << "trained on " << rows.size() << " row(s) (" << synthetic.size() << " synthetic), " << result.model.parameter_count()
              << " parameters, final epoch loss " << (result.loss_trace.empty() ? 0.0 : result.loss_trace.back()) << '\n';
    ctx.manifest.note("parameter_count", result.model.parameter_count());
    ctx.write("model.json", [&](std::ostream& o) { o << result.model.to_json().dump() << '\n'; });
    ctx.write("loss_trace.json", [&](std::ostream& o) { o << nlohmann::json(result.loss_trace).dump() << '\n'; });
    ctx.finish();
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output) {
    const auto model = SynergyModel::load(model_path);
    std::ifstream in(input);
    if (!in) throw IoError("cannot read input: " + input);
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw IoError("cannot write " + output);
    }
    std::ostream& out = output.empty() ? std::cout : file;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(input + ": empty file");
    const auto header = csv::parse_line(line);
    if (header.size() < 3 || header[0] != "drug_a" || header[1] != "drug_b" || header[2] != "cell_line")
        throw ValidationError(input + ": header must start with drug_a,drug_b,cell_line");
    out << "drug_a,drug_b,cell_line,probability,prediction\n";
    out.precision(10);
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto f = csv::parse_line(line);
        if (f.size() < 3) throw ValidationError(input + ":" + std::to_string(n) + ": expected at least 3 fields");
        const auto t = make_triplet(f[0], f[1], f[2]);
        if (t.drug_a == t.drug_b) throw ValidationError(input + ":" + std::to_string(n) + ": drug_a equals drug_b");
        const double p = model.forward(t);
        out << csv::escape(t.drug_a) << ',' << csv::escape(t.drug_b) << ',' << csv::escape(t.cell) << ',' << p << ',' << (p > 0.5 ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& model_path) {
    Context ctx(c, "evaluate", "evaluate");
    const auto dataset = read_dataset(ctx);
    ExperimentPlan plan{ctx.cfg.eval.folds, ctx.cfg.eval.seeds, ctx.cfg.eval.split, ctx.cfg.eval.holdout_fraction, ctx.jobs};
    auto tc = ctx.cfg.train;
    if (c.seed) {
        plan.seeds.clear();
        for (std::size_t i = 0; i < ctx.cfg.eval.seeds.size(); ++i) plan.seeds.push_back(derive_seed(*c.seed, {i}));
    }
    std::vector<SettingResult> results;
    const auto t0 = std::chrono::steady_clock::now();
    results.push_back(run_setting("no-aug", dataset, {}, tc, plan));
    for (const char* name : {"manual", "iterative", "restricted", "no-warm-start"}) {
        auto it = ctx.cfg.eval.datasets.find(name);
        if (it == ctx.cfg.eval.datasets.end()) continue;
        const auto synthetic = read_synthetic_input(ctx, it->second);
        results.push_back(run_setting(name, dataset, synthetic, tc, plan));
    }
    ctx.manifest.time("evaluate", seconds_since(t0));
    const auto* baseline = &results.front();
    ctx.write("metrics.csv", [&](std::ostream& o) { write_table_csv(o, results, baseline); });
    ctx.write("metrics.json", [&](std::ostream& o) {
        o << nlohmann::json{{"split", to_string(plan.split)}, {"folds", plan.folds}, {"seeds", plan.seeds}, {"settings", table_json(results, baseline)}}
                 .dump(2)
          << '\n';
    });
    if (!model_path.empty()) {
        ctx.manifest.add_input(model_path);
        const auto model = SynergyModel::load(model_path);
        const auto m = all_metrics(score(model, dataset));
        ctx.write("model_metrics.json", [&](std::ostream& o) {
            o << nlohmann::json{{"scope", "full dataset (in-sample)"}, {"AUPRC", m.auprc}, {"maxF1", m.max_f1}, {"BACC", m.bacc}, {"kappa", m.kappa}}
                     .dump(2)
              << '\n';
        });
    }
    write_table_csv(std::cout, results, baseline);
    ctx.finish();
    return 0;
}

int cmd_audit(const Common& c) {
    Context ctx(c, "audit-leakage", "leakage");
    const auto corpus = read_corpus(ctx);
    const auto splitter = make_splitter(ctx);
    const auto dataset = read_dataset(ctx);
    const auto vocab = full_vocab(ctx, dataset);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = audit_leakage(corpus, build_matcher(vocab), dataset, AuditOptions{{1, 2, 5, 10, 100, 1000}, ctx.jobs}, splitter);
    ctx.manifest.time("audit", seconds_since(t0));
    ctx.write("leakage.json", [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
    ctx.write("leakage_counts.csv", [&](std::ostream& o) { write_counts_csv(o, report); });
    ctx.finish();
    return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    g_argv.assign(argv, argv + argc);
    CLI::App app{"litaug: literature-mined prompt augmentation for drug-synergy datasets"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common mine_c, cluster_c, synth_c, aug_c, train_c, eval_c, audit_c, emb_c;
    std::string mined_path, emb_mined, templates_path, mode = "iterative", synthetic_path, eval_model;
    std::string model_path, predict_in, predict_out;
    bool restricted = false, no_warm = false, resume = false, grid = false;
    int iteration = 1;

    auto* mine = app.add_subcommand("mine", "Find candidate synergy sentences in the corpus");
    add_common(mine, mine_c);
    auto* cluster = app.add_subcommand("cluster", "Mask, embed and k-medoid cluster mined sentences into templates");
    add_common(cluster, cluster_c);
    cluster->add_option("--mined", mined_path, "Use an existing mined.jsonl instead of mining");
    cluster->add_option("--iteration", iteration, "Iteration tag for template ids")->check(CLI::NonNegativeNumber);
    auto* synth = app.add_subcommand("synthesize", "Fill templates once and write synthetic triplets");
    add_common(synth, synth_c);
    synth->add_option("--templates", templates_path, "templates.jsonl (default: the built-in manual prompts)");
    synth->add_flag("--restricted", restricted, "Restrict fills to valid vocabulary entries");
    auto* aug = app.add_subcommand("augment", "Run an augmentation mode end to end");
    add_common(aug, aug_c);
    aug->add_option("-m,--mode", mode, "manual | iterative | restricted")->check(CLI::IsMember({"manual", "iterative", "restricted"}));
    aug->add_flag("--no-warm-start", no_warm, "Fill templates without warm-start pre-filling");
    aug->add_flag("--resume", resume, "Continue from the latest checkpoint in the output directory");
    auto* tr = app.add_subcommand("train", "Train the synergy classifier");
    add_common(tr, train_c);
    tr->add_option("--synthetic", synthetic_path, "Synthetic triplets (synthetic.jsonl) to add to the dataset");
    tr->add_flag("--grid-search", grid, "Select hyperparameters by cross-validated AUPRC first");
    auto* pred = app.add_subcommand("predict", "Score triplets with a trained model");
    pred->add_option("--model", model_path, "model.json")->required();
    pred->add_option("-i,--input", predict_in, "CSV with drug_a,drug_b,cell_line columns")->required();
    pred->add_option("-o,--output", predict_out, "Output CSV (default: standard output)");
    auto* ev = app.add_subcommand("evaluate", "Cross-validated metric table across augmentation settings");
    add_common(ev, eval_c);
    ev->add_option("--model", eval_model, "Also report in-sample metrics of a trained model");
    auto* audit = app.add_subcommand("audit-leakage", "Count dataset entity co-occurrences in the corpus");
    add_common(audit, audit_c);
    auto* emb = app.add_subcommand("export-embeddings", "Write masked-sentence embeddings with cluster labels");
    add_common(emb, emb_c);
    emb->add_option("--mined", emb_mined, "Use an existing mined.jsonl instead of mining");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    return guarded([&]() -> int {
        if (*mine) return cmd_mine(mine_c);
        if (*cluster) return cmd_cluster(cluster_c, mined_path, iteration);
        if (*synth) return cmd_synthesize(synth_c, templates_path, restricted);
        if (*aug) return cmd_augment(aug_c, mode, no_warm, resume);
        if (*tr) return cmd_train(train_c, synthetic_path, grid);
        if (*pred) return cmd_predict(model_path, predict_in, predict_out);
        if (*ev) return cmd_evaluate(eval_c, eval_model);
        if (*audit) return cmd_audit(audit_c);
        if (*emb) return cmd_export_embeddings(emb_c, emb_mined);
        return 1;
    });
}

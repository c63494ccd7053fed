#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/corpus.hpp"
#include "litaug/error.hpp"
#include "litaug/gateway.hpp"
#include "litaug/matcher.hpp"
#include "litaug/mining.hpp"
#include "litaug/parallel.hpp"
#include "litaug/random.hpp"
#include "litaug/synthesizer.hpp"
#include "litaug/template_miner.hpp"
#include "litaug/triplet.hpp"
#include "litaug/vocabulary.hpp"

namespace litaug {

enum class AugmentMode { Manual, Iterative, Restricted };

inline const char* to_string(AugmentMode m) {
    switch (m) {
        case AugmentMode::Manual: return "manual";
        case AugmentMode::Iterative: return "iterative";
        case AugmentMode::Restricted: return "restricted";
    }
    return "?";
}

inline AugmentMode parse_augment_mode(std::string_view s) {
    if (s == "manual") return AugmentMode::Manual;
    if (s == "iterative") return AugmentMode::Iterative;
    if (s == "restricted") return AugmentMode::Restricted;
    throw ValidationError("unknown augment mode '" + std::string(s) + "' (manual|iterative|restricted)");
}

enum class VariantPolicy { All, One };

struct AugmentConfig {
    int gamma = 3;
    std::size_t samples_per_template = 64;
    bool warm_start = true;
    bool manual_warm_start = false;
    VariantPolicy variants = VariantPolicy::All;
    MiningOptions mining;
    TemplateMiningOptions cluster;
    std::uint64_t seed = 7;
    unsigned jobs = 1;
};

struct RoundStats {
    int iteration = 0;
    std::size_t mined_sentences = 0;
    std::size_t template_candidates = 0;
    std::size_t new_templates = 0;
    std::size_t pool_size = 0;
    std::size_t prompts = 0;
    std::size_t discarded = 0;
    std::size_t assembled = 0;
    std::size_t added = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t vocab_added = 0;
    std::size_t synthetic_total = 0;
    std::vector<std::string> warnings;
};

struct PipelineState {
    AugmentMode mode = AugmentMode::Iterative;
    int iteration = 0;
    std::uint64_t seed = 7;
    EntityVocabulary vocab;
    std::vector<LabeledTriplet> dataset;
    std::vector<WeightedTriplet> synthetic;  // sorted by triplet, unique
    std::vector<PromptTemplate> template_pool;
    std::vector<RoundStats> history;
};

inline PipelineState initial_state(AugmentMode mode, std::uint64_t seed, EntityVocabulary vocab, std::vector<LabeledTriplet> dataset) {
    PipelineState s;
    s.mode = mode;
    s.seed = seed;
    s.vocab = std::move(vocab);
    s.vocab.add_dataset(dataset);
    s.dataset = std::move(dataset);
    return s;
}

// Keeps rows with at least one element the gateway knows as a single token.
inline std::vector<LabeledTriplet> filter_dataset(const std::vector<LabeledTriplet>& rows, const VocabularyPredicate& in_vocabulary) {
    std::vector<LabeledTriplet> out;
    for (const auto& r : rows)
        if (in_vocabulary(r.triplet.drug_a) || in_vocabulary(r.triplet.drug_b) || in_vocabulary(r.triplet.cell)) out.push_back(r);
    return out;
}

namespace detail {

struct PendingPrompt {
    std::size_t template_index;
    WarmStartPrompt prompt;
};

inline std::vector<PendingPrompt> build_prompts(const PipelineState& state, const std::vector<PromptTemplate>& templates,
                                                const Gateway& gateway, bool warm_start, const AugmentConfig& config,
                                                int iteration) {
    std::vector<Triplet> pool;
    pool.reserve(state.dataset.size() + state.synthetic.size());
    for (const auto& r : state.dataset) pool.push_back(r.triplet);
    for (const auto& w : state.synthetic) pool.push_back(w.triplet);

    std::vector<PendingPrompt> out;
    for (std::size_t ti = 0; ti < templates.size(); ++ti) {
        const auto& t = templates[ti];
        if (!warm_start || pool.empty()) {
            out.push_back({ti, cold_prompt(t)});
            continue;
        }
        Rng rng(derive_seed(state.seed, {static_cast<std::uint64_t>(iteration), ti}));
        std::set<std::string> seen;
        for (std::size_t n = 0; n < config.samples_per_template; ++n) {
            const auto& sampled = pool[static_cast<std::size_t>(rng.below(pool.size()))];
            auto variants = warm_start_variants(t, sampled, gateway);
            if (variants.empty()) continue;
            if (config.variants == VariantPolicy::One) {
                auto pick = std::move(variants[static_cast<std::size_t>(rng.below(variants.size()))]);
                variants.assign(1, std::move(pick));
            }
            for (auto& v : variants)
                if (seen.insert(v.rendered_text).second) out.push_back({ti, std::move(v)});
        }
    }
    return out;
}

}  // namespace detail

// Fills every template (warm-started or cold), assembles, deduplicates and
// appends to state.synthetic. Unrestricted rounds also grow the vocabulary.
inline RoundStats synthesize_round(PipelineState& state, const std::vector<PromptTemplate>& templates, const Gateway& gateway,
                                   FillMode mode, bool warm_start, const AugmentConfig& config, int iteration) {
    RoundStats stats;
    stats.iteration = iteration;
    const auto prompts = detail::build_prompts(state, templates, gateway, warm_start, config, iteration);
    stats.prompts = prompts.size();

    std::optional<RestrictionSets> restriction;
    if (mode == FillMode::Restricted) {
        restriction = make_restriction(state.vocab, gateway);
        if (restriction->multi_token_dropped > 0)
            stats.warnings.push_back(std::to_string(restriction->multi_token_dropped) +
                                     " valid entities are not single gateway tokens and cannot be generated");
    }

    std::vector<FillOutcome> outcomes(prompts.size());
    parallel_for(prompts.size(), config.jobs, [&](std::size_t i) {
        outcomes[i] = fill_prompt(gateway, templates[prompts[i].template_index], prompts[i].prompt,
                                  restriction ? &*restriction : nullptr);
    });

    struct Candidate {
        WeightedTriplet triplet;
        std::size_t order;
    };
    std::vector<Candidate> candidates;
    std::vector<MaskFill> all_fills;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (outcomes[i].discarded) {
            ++stats.discarded;
            continue;
        }
        const auto& t = templates[prompts[i].template_index];
        for (auto& w : assemble_triplets(t, prompts[i].prompt, outcomes[i].fills, iteration))
            candidates.push_back({std::move(w), candidates.size()});
        all_fills.insert(all_fills.end(), outcomes[i].fills.begin(), outcomes[i].fills.end());
    }
    stats.assembled = candidates.size();

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.triplet.triplet != b.triplet.triplet) return a.triplet.triplet < b.triplet.triplet;
        if (a.triplet.provenance.template_id != b.triplet.provenance.template_id)
            return a.triplet.provenance.template_id < b.triplet.provenance.template_id;
        return a.order < b.order;
    });
    std::set<Triplet> taken;
    for (const auto& r : state.dataset) taken.insert(r.triplet);
    for (const auto& w : state.synthetic) taken.insert(w.triplet);
    std::vector<WeightedTriplet> fresh;
    for (auto& c : candidates) {
        if (taken.insert(c.triplet.triplet).second) fresh.push_back(std::move(c.triplet));
        else ++stats.duplicates_dropped;
    }
    stats.added = fresh.size();
    state.synthetic.insert(state.synthetic.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
    std::sort(state.synthetic.begin(), state.synthetic.end(),
              [](const WeightedTriplet& a, const WeightedTriplet& b) { return a.triplet < b.triplet; });

    std::sort(all_fills.begin(), all_fills.end(), [](const MaskFill& a, const MaskFill& b) {
        return std::tie(a.type, a.token) < std::tie(b.type, b.token);
    });
    stats.vocab_added = expand_vocabulary(state.vocab, all_fills, mode);
    stats.synthetic_total = state.synthetic.size();
    return stats;
}

inline FillMode fill_mode_for(AugmentMode m) { return m == AugmentMode::Restricted ? FillMode::Restricted : FillMode::Unrestricted; }

// One literature iteration: mine with the current vocabulary, cluster the
// masked sentences, union the medoids into the pool, fill every pooled
// template, and grow the vocabulary (unrestricted only).
inline PipelineState run_iteration(PipelineState state, const std::vector<Abstract>& corpus, const Gateway& gateway,
                                   const AugmentConfig& config, const SentenceSplitter& splitter = {}) {
    if (state.mode == AugmentMode::Manual) throw ValidationError("run_iteration does not apply to manual mode");
    if (state.iteration >= config.gamma)
        throw ValidationError("iteration " + std::to_string(state.iteration) + " already reached gamma " + std::to_string(config.gamma));
    const int it = state.iteration + 1;

    std::vector<MinedSentence> mined;
    if (!state.vocab.empty()) {
        const auto matcher = build_matcher(state.vocab);
        mined = mine_candidates(corpus, matcher, config.mining, splitter);
    }
    auto cluster = config.cluster;
    cluster.jobs = config.jobs;
    const auto mt = mine_templates(gateway, mined, it, cluster);

    std::set<std::string> pooled;
    for (const auto& t : state.template_pool) pooled.insert(t.text());
    std::size_t new_templates = 0;
    for (const auto& t : mt.templates) {
        if (pooled.insert(t.text()).second) {
            state.template_pool.push_back(t);
            ++new_templates;
        }
    }

    auto stats = synthesize_round(state, state.template_pool, gateway, fill_mode_for(state.mode), config.warm_start, config, it);
    stats.mined_sentences = mined.size();
    stats.template_candidates = mt.candidates.size();
    stats.new_templates = new_templates;
    stats.pool_size = state.template_pool.size();
    if (mined.empty()) stats.warnings.insert(stats.warnings.begin(), "iteration " + std::to_string(it) + ": no sentences mined");
    state.history.push_back(std::move(stats));
    state.iteration = it;
    return state;
}

// The eleven manual prompts filled once.
inline PipelineState run_manual(PipelineState state, const Gateway& gateway, const AugmentConfig& config) {
    state.template_pool = manual_templates();
    auto stats = synthesize_round(state, state.template_pool, gateway, FillMode::Unrestricted, config.manual_warm_start, config, 1);
    stats.new_templates = stats.pool_size = state.template_pool.size();
    state.history.push_back(std::move(stats));
    state.iteration = 1;
    return state;
}

inline nlohmann::json to_json(const RoundStats& s) {
    return {{"iteration", s.iteration},
            {"mined_sentences", s.mined_sentences},
            {"template_candidates", s.template_candidates},
            {"new_templates", s.new_templates},
            {"pool_size", s.pool_size},
            {"prompts", s.prompts},
            {"discarded", s.discarded},
            {"assembled", s.assembled},
            {"added", s.added},
            {"duplicates_dropped", s.duplicates_dropped},
            {"vocab_added", s.vocab_added},
            {"synthetic_total", s.synthetic_total},
            {"warnings", s.warnings}};
}

inline RoundStats round_stats_from_json(const nlohmann::json& j) {
    RoundStats s;
    s.iteration = j.at("iteration").get<int>();
    s.mined_sentences = j.at("mined_sentences").get<std::size_t>();
    s.template_candidates = j.at("template_candidates").get<std::size_t>();
    s.new_templates = j.at("new_templates").get<std::size_t>();
    s.pool_size = j.at("pool_size").get<std::size_t>();
    s.prompts = j.at("prompts").get<std::size_t>();
    s.discarded = j.at("discarded").get<std::size_t>();
    s.assembled = j.at("assembled").get<std::size_t>();
    s.added = j.at("added").get<std::size_t>();
    s.duplicates_dropped = j.at("duplicates_dropped").get<std::size_t>();
    s.vocab_added = j.at("vocab_added").get<std::size_t>();
    s.synthetic_total = j.at("synthetic_total").get<std::size_t>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
}

inline void write_synthetic(std::ostream& out, const std::vector<WeightedTriplet>& rows) {
    for (const auto& w : rows) out << to_json(w).dump() << '\n';
}

inline std::vector<WeightedTriplet> read_synthetic(std::istream& in, const std::string& origin = "<stream>") {
    std::vector<WeightedTriplet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(weighted_triplet_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<WeightedTriplet> load_synthetic(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read synthetic dataset: " + path);
    return read_synthetic(in, path);
}

// State header line, then one line per record kind.
inline void write_checkpoint(std::ostream& out, const PipelineState& s) {
    out << nlohmann::json{{"kind", "state"}, {"format", 1}, {"mode", to_string(s.mode)}, {"iteration", s.iteration}, {"seed", s.seed}}.dump()
        << '\n';
    for (const auto& r : s.history) {
        auto j = to_json(r);
        j["kind"] = "round";
        out << j.dump() << '\n';
    }
    for (const auto& r : s.dataset)
        out << nlohmann::json{{"kind", "dataset"}, {"drug_a", r.triplet.drug_a}, {"drug_b", r.triplet.drug_b}, {"cell", r.triplet.cell}, {"label", r.label}}.dump()
            << '\n';
    for (const auto& [k, e] : s.vocab.entries())
        out << nlohmann::json{{"kind", "vocab"}, {"surface", e.surface}, {"type", to_string(e.type)}, {"source", to_string(e.source)}}.dump()
            << '\n';
    for (const auto& t : s.template_pool) {
        auto j = to_json(t);
        j["kind"] = "template";
        out << j.dump() << '\n';
    }
    for (const auto& w : s.synthetic) {
        auto j = to_json(w);
        j["kind"] = "triplet";
        out << j.dump() << '\n';
    }
}

inline PipelineState read_checkpoint(std::istream& in, const std::string& origin = "<checkpoint>") {
    PipelineState s;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto where = origin + ":" + std::to_string(line_no) + ": ";
        try {
            const auto j = nlohmann::json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (!header && kind != "state") throw ValidationError(where + "checkpoint must start with a state line");
            if (kind == "state") {
                if (j.at("format").get<int>() != 1) throw ValidationError(where + "unsupported checkpoint format");
                s.mode = parse_augment_mode(j.at("mode").get<std::string>());
                s.iteration = j.at("iteration").get<int>();
                s.seed = j.at("seed").get<std::uint64_t>();
                header = true;
            } else if (kind == "round") {
                s.history.push_back(round_stats_from_json(j));
            } else if (kind == "dataset") {
                s.dataset.push_back({make_triplet(j.at("drug_a").get<std::string>(), j.at("drug_b").get<std::string>(),
                                                  j.at("cell").get<std::string>()),
                                     j.at("label").get<int>()});
            } else if (kind == "vocab") {
                const auto type = parse_entity_type(j.at("type").get<std::string>());
                const auto source = parse_source(j.at("source").get<std::string>());
                if (!type || !source) throw ValidationError(where + "bad vocabulary entry");
                s.vocab.add(j.at("surface").get<std::string>(), *type, *source);
            } else if (kind == "template") {
                s.template_pool.push_back(template_from_json(j));
            } else if (kind == "triplet") {
                s.synthetic.push_back(weighted_triplet_from_json(j));
            } else {
                throw ValidationError(where + "unknown record kind '" + kind + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where + e.what());
        }
    }
    if (!header) throw ValidationError(origin + ": empty checkpoint");
    return s;
}

inline void save_checkpoint(const std::string& path, const PipelineState& s) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    write_checkpoint(out, s);
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

inline PipelineState load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    return read_checkpoint(in, path);
}

inline std::string checkpoint_name(int iteration) { return "checkpoint-it" + std::to_string(iteration) + ".jsonl"; }

// Highest-iteration checkpoint in dir, if any.
inline std::optional<std::filesystem::path> latest_checkpoint(const std::filesystem::path& dir) {
    std::optional<std::filesystem::path> best;
    int best_it = -1;
    if (!std::filesystem::is_directory(dir)) return best;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("checkpoint-it", 0) != 0 || e.path().extension() != ".jsonl") continue;
        try {
            const int it = std::stoi(name.substr(13));
            if (it > best_it) {
                best_it = it;
                best = e.path();
            }
        } catch (const std::exception&) {
        }
    }
    return best;
}

struct PipelineInputs {
    std::vector<Abstract> corpus;
    EntityVocabulary vocab;
    std::vector<LabeledTriplet> dataset;
};

// Runs one augmentation mode to completion. With a checkpoint directory a
// checkpoint is written after every iteration; `resume` continues from the
// latest one found there.
inline PipelineState run_pipeline(const PipelineInputs& inputs, const Gateway& gateway, AugmentMode mode, const AugmentConfig& config,
                                  const SentenceSplitter& splitter = {}, const std::string& checkpoint_dir = {}, bool resume = false) {
    if (config.gamma < 0) throw ValidationError("gamma must be non-negative");
    PipelineState state;
    bool resumed = false;
    if (resume && !checkpoint_dir.empty()) {
        if (auto path = latest_checkpoint(checkpoint_dir)) {
            state = load_checkpoint(path->string());
            if (state.mode != mode) throw ValidationError("checkpoint " + path->string() + " was written by mode " + to_string(state.mode));
            if (state.seed != config.seed) throw ValidationError("checkpoint " + path->string() + " was written with a different seed");
            resumed = true;
        }
    }
    if (!resumed) state = initial_state(mode, config.seed, inputs.vocab, inputs.dataset);

    auto checkpoint = [&] {
        if (checkpoint_dir.empty()) return;
        std::filesystem::create_directories(checkpoint_dir);
        save_checkpoint((std::filesystem::path(checkpoint_dir) / checkpoint_name(state.iteration)).string(), state);
    };

    if (mode == AugmentMode::Manual) {
        if (state.iteration == 0) {
            state = run_manual(std::move(state), gateway, config);
            checkpoint();
        }
        return state;
    }
    while (state.iteration < config.gamma) {
        state = run_iteration(std::move(state), inputs.corpus, gateway, config, splitter);
        checkpoint();
    }
    return state;
}

struct TrainingRow {
    Triplet triplet;
    int label;
    double weight;
    bool synthetic;
};

// Originals keep weight 1 and their label; synthetic rows colliding with an
// original are dropped.
inline std::vector<TrainingRow> merge_datasets(const std::vector<LabeledTriplet>& original, const std::vector<WeightedTriplet>& synthetic) {
    std::vector<TrainingRow> out;
    std::set<Triplet> seen;
    for (const auto& r : original)
        if (seen.insert(r.triplet).second) out.push_back({r.triplet, r.label, 1.0, false});
    for (const auto& w : synthetic)
        if (seen.insert(w.triplet).second) out.push_back({w.triplet, 1, w.weight, true});
    return out;
}

}  // namespace litaug

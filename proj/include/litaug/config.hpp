#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "litaug/augmentor.hpp"
#include "litaug/error.hpp"
#include "litaug/http_gateway.hpp"
#include "litaug/kmedoids.hpp"
#include "litaug/mock_gateway.hpp"
#include "litaug/splits.hpp"
#include "litaug/trainer.hpp"

namespace litaug {

struct GatewaySettings {
    std::string backend = "mock";
    MockGatewayConfig mock;
    std::string mock_tokens;  // token list file for the mock
    HttpGatewayConfig http;
};

struct EvalSettings {
    std::size_t folds = 5;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    SplitMode split = SplitMode::Standard;
    double holdout_fraction = 0.2;
    bool grid_search = false;
    std::size_t grid_folds = 3;
    std::map<std::string, std::string> datasets;  // setting name -> synthetic JSONL
};

struct AppConfig {
    std::filesystem::path path;
    std::uint64_t seed = 7;

    std::string corpus;
    std::string abbreviations;
    std::vector<std::string> keywords = default_keywords();

    std::vector<std::string> vocab_files;
    std::string dataset;
    bool filter_dataset = false;

    GatewaySettings gateway;
    TemplateMiningOptions cluster;
    AugmentConfig augment;
    std::string output_dir = "out";
    bool checkpoints = true;

    TrainConfig train;
    EvalSettings eval;

    nlohmann::json snapshot;  // parsed config as JSON, for manifests
};

namespace detail {

inline void check_keys(const toml::table& t, const std::string& section, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : t) {
        bool ok = false;
        for (auto a : allowed) ok |= (k.str() == a);
        if (!ok) throw ValidationError("config: unknown key '" + std::string(k.str()) + "' in [" + section + "]");
    }
}

template <typename T>
T get(const toml::table& t, std::string_view key, T fallback, const std::string& section) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node->value_exact<bool>()) return *v;
    } else if constexpr (std::is_integral_v<T>) {
        if (auto v = node->value_exact<std::int64_t>()) {
            if (*v < 0) throw ValidationError("config: [" + section + "] " + std::string(key) + " must be non-negative");
            return static_cast<T>(*v);
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node->value<double>()) return *v;
    } else {
        if (auto v = node->value_exact<std::string>()) return *v;
    }
    throw ValidationError("config: [" + section + "] " + std::string(key) + " has the wrong type");
}

template <typename T>
std::vector<T> get_list(const toml::table& t, std::string_view key, std::vector<T> fallback, const std::string& section) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    const auto* arr = node->as_array();
    if (!arr) throw ValidationError("config: [" + section + "] " + std::string(key) + " must be an array");
    std::vector<T> out;
    for (const auto& el : *arr) {
        if constexpr (std::is_same_v<T, std::string>) {
            auto v = el.value_exact<std::string>();
            if (!v) throw ValidationError("config: [" + section + "] " + std::string(key) + " must hold strings");
            out.push_back(*v);
        } else {
            auto v = el.value_exact<std::int64_t>();
            if (!v || *v < 0) throw ValidationError("config: [" + section + "] " + std::string(key) + " must hold non-negative integers");
            out.push_back(static_cast<T>(*v));
        }
    }
    return out;
}

inline const toml::table& section(const toml::table& root, std::string_view name) {
    static const toml::table empty;
    const auto* node = root.get(name);
    if (!node) return empty;
    const auto* t = node->as_table();
    if (!t) throw ValidationError("config: " + std::string(name) + " must be a table");
    return *t;
}

}  // namespace detail

// Paths in the config are relative to the config file's directory.
inline AppConfig parse_config(const std::string& text, const std::filesystem::path& path) {
    toml::table root;
    try {
        root = toml::parse(text, path.string());
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config " << path.string() << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw ValidationError(msg.str());
    }
    AppConfig c;
    c.path = path;
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) -> std::string {
        if (p.empty()) return p;
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? p : (base / fp).lexically_normal().string();
    };
    detail::check_keys(root, "root", {"seed", "corpus", "vocab", "gateway", "cluster", "synthesis", "loop", "train", "eval"});
    c.seed = detail::get<std::uint64_t>(root, "seed", c.seed, "root");

    const auto& corpus = detail::section(root, "corpus");
    detail::check_keys(corpus, "corpus", {"path", "abbreviations", "keywords"});
    c.corpus = resolve(detail::get<std::string>(corpus, "path", "", "corpus"));
    c.abbreviations = resolve(detail::get<std::string>(corpus, "abbreviations", "", "corpus"));
    c.keywords = detail::get_list<std::string>(corpus, "keywords", c.keywords, "corpus");

    const auto& vocab = detail::section(root, "vocab");
    detail::check_keys(vocab, "vocab", {"files", "dataset", "filter_dataset"});
    for (const auto& f : detail::get_list<std::string>(vocab, "files", {}, "vocab")) c.vocab_files.push_back(resolve(f));
    c.dataset = resolve(detail::get<std::string>(vocab, "dataset", "", "vocab"));
    c.filter_dataset = detail::get<bool>(vocab, "filter_dataset", false, "vocab");

    const auto& gw = detail::section(root, "gateway");
    detail::check_keys(gw, "gateway", {"backend", "seed", "embedding_dim", "tokens", "sharpness", "url", "timeout", "max_retries",
                                       "batch_size", "vocab_file", "client_top_k"});
    c.gateway.backend = detail::get<std::string>(gw, "backend", "mock", "gateway");
    if (c.gateway.backend != "mock" && c.gateway.backend != "http")
        throw ValidationError("config: [gateway] backend must be \"mock\" or \"http\"");
    c.gateway.mock.seed = detail::get<std::uint64_t>(gw, "seed", c.gateway.mock.seed, "gateway");
    const auto dim = detail::get<std::size_t>(gw, "embedding_dim", c.gateway.backend == "mock" ? 64 : 768, "gateway");
    c.gateway.mock.embedding_dim = dim;
    c.gateway.http.embedding_dim = dim;
    c.gateway.mock_tokens = resolve(detail::get<std::string>(gw, "tokens", "", "gateway"));
    c.gateway.mock.sharpness = detail::get<double>(gw, "sharpness", c.gateway.mock.sharpness, "gateway");
    c.gateway.http.base_url = detail::get<std::string>(gw, "url", c.gateway.http.base_url, "gateway");
    c.gateway.http.timeout_seconds = detail::get<double>(gw, "timeout", c.gateway.http.timeout_seconds, "gateway");
    c.gateway.http.max_retries = detail::get<int>(gw, "max_retries", c.gateway.http.max_retries, "gateway");
    c.gateway.http.batch_size = detail::get<std::size_t>(gw, "batch_size", c.gateway.http.batch_size, "gateway");
    c.gateway.http.vocab_file = resolve(detail::get<std::string>(gw, "vocab_file", "", "gateway"));
    c.gateway.http.client_top_k = detail::get<int>(gw, "client_top_k", c.gateway.http.client_top_k, "gateway");
    if (const char* url = std::getenv("LITAUG_GATEWAY_URL"); url && *url) c.gateway.http.base_url = url;
    if (!(c.gateway.http.timeout_seconds > 0)) throw ValidationError("config: [gateway] timeout must be positive");
    if (dim == 0) throw ValidationError("config: [gateway] embedding_dim must be positive");

    const auto& cl = detail::section(root, "cluster");
    detail::check_keys(cl, "cluster", {"k", "max_swaps", "metric"});
    c.cluster.k = detail::get<std::size_t>(cl, "k", c.cluster.k, "cluster");
    c.cluster.max_swaps = detail::get<std::size_t>(cl, "max_swaps", c.cluster.max_swaps, "cluster");
    const auto metric = detail::get<std::string>(cl, "metric", "euclidean", "cluster");
    if (metric == "euclidean") c.cluster.metric = DistanceMetric::Euclidean;
    else if (metric == "cosine") c.cluster.metric = DistanceMetric::Cosine;
    else throw ValidationError("config: [cluster] metric must be \"euclidean\" or \"cosine\"");
    if (c.cluster.k == 0) throw ValidationError("config: [cluster] k must be positive");

    const auto& syn = detail::section(root, "synthesis");
    detail::check_keys(syn, "synthesis", {"samples_per_template", "warm_start", "manual_warm_start", "variants", "decoding"});
    c.augment.samples_per_template = detail::get<std::size_t>(syn, "samples_per_template", c.augment.samples_per_template, "synthesis");
    c.augment.warm_start = detail::get<bool>(syn, "warm_start", true, "synthesis");
    c.augment.manual_warm_start = detail::get<bool>(syn, "manual_warm_start", false, "synthesis");
    const auto variants = detail::get<std::string>(syn, "variants", "all", "synthesis");
    if (variants == "all") c.augment.variants = VariantPolicy::All;
    else if (variants == "one") c.augment.variants = VariantPolicy::One;
    else throw ValidationError("config: [synthesis] variants must be \"all\" or \"one\"");
    const auto decoding = detail::get<std::string>(syn, "decoding", "argmax", "synthesis");
    if (decoding == "sample") throw ValidationError("config: [synthesis] decoding = \"sample\" is not supported; only \"argmax\" is implemented");
    if (decoding != "argmax") throw ValidationError("config: [synthesis] decoding must be \"argmax\"");

    const auto& loop = detail::section(root, "loop");
    detail::check_keys(loop, "loop", {"gamma", "output_dir", "checkpoints"});
    c.augment.gamma = detail::get<int>(loop, "gamma", c.augment.gamma, "loop");
    c.output_dir = resolve(detail::get<std::string>(loop, "output_dir", "out", "loop"));
    c.checkpoints = detail::get<bool>(loop, "checkpoints", true, "loop");

    const auto& tr = detail::section(root, "train");
    detail::check_keys(tr, "train", {"epochs", "batch_size", "learning_rate", "d_emb", "hidden_dim", "hidden_layers", "leaky_slope",
                                     "warmup_epochs", "warmup_mode", "use_instance_weights", "literal_synthetic_sign"});
    c.train.epochs = detail::get<std::size_t>(tr, "epochs", c.train.epochs, "train");
    c.train.batch_size = detail::get<std::size_t>(tr, "batch_size", c.train.batch_size, "train");
    c.train.learning_rate = detail::get<double>(tr, "learning_rate", c.train.learning_rate, "train");
    c.train.d_emb = detail::get<std::size_t>(tr, "d_emb", c.train.d_emb, "train");
    c.train.hidden_dim = detail::get<std::size_t>(tr, "hidden_dim", c.train.hidden_dim, "train");
    c.train.hidden_layers = detail::get<std::size_t>(tr, "hidden_layers", c.train.hidden_layers, "train");
    c.train.leaky_slope = detail::get<double>(tr, "leaky_slope", c.train.leaky_slope, "train");
    c.train.warmup_epochs = detail::get<std::size_t>(tr, "warmup_epochs", c.train.warmup_epochs, "train");
    const auto wm = detail::get<std::string>(tr, "warmup_mode", "lr", "train");
    if (wm == "lr") c.train.warmup_mode = WarmupMode::LearningRate;
    else if (wm == "augment-delay") c.train.warmup_mode = WarmupMode::AugmentDelay;
    else throw ValidationError("config: [train] warmup_mode must be \"lr\" or \"augment-delay\"");
    c.train.use_instance_weights = detail::get<bool>(tr, "use_instance_weights", c.train.use_instance_weights, "train");
    c.train.literal_synthetic_sign = detail::get<bool>(tr, "literal_synthetic_sign", false, "train");
    validate(c.train);

    const auto& ev = detail::section(root, "eval");
    detail::check_keys(ev, "eval", {"folds", "seeds", "split", "holdout_fraction", "grid_search", "grid_folds", "datasets"});
    c.eval.folds = detail::get<std::size_t>(ev, "folds", c.eval.folds, "eval");
    c.eval.seeds = detail::get_list<std::uint64_t>(ev, "seeds", c.eval.seeds, "eval");
    c.eval.split = parse_split_mode(detail::get<std::string>(ev, "split", "standard", "eval"));
    c.eval.holdout_fraction = detail::get<double>(ev, "holdout_fraction", c.eval.holdout_fraction, "eval");
    c.eval.grid_search = detail::get<bool>(ev, "grid_search", false, "eval");
    c.eval.grid_folds = detail::get<std::size_t>(ev, "grid_folds", c.eval.grid_folds, "eval");
    const auto& ds = detail::section(ev, "datasets");
    detail::check_keys(ds, "eval.datasets", {"manual", "iterative", "restricted", "no-warm-start"});
    for (const auto& [k, v] : ds) {
        auto s = v.value_exact<std::string>();
        if (!s) throw ValidationError("config: [eval.datasets] entries must be paths");
        c.eval.datasets[std::string(k.str())] = resolve(*s);
    }
    if (c.eval.seeds.empty()) throw ValidationError("config: [eval] seeds must not be empty");

    std::ostringstream js;
    js << toml::json_formatter{root};
    c.snapshot = nlohmann::json::parse(js.str());
    return c;
}

inline AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::absolute(path));
}

inline std::unique_ptr<Gateway> make_gateway(const GatewaySettings& s) {
    if (s.backend == "http") return std::make_unique<HttpGateway>(s.http);
    auto cfg = s.mock;
    if (!s.mock_tokens.empty()) load_mock_tokens(s.mock_tokens, cfg);
    return std::make_unique<MockGateway>(cfg);
}

}  // namespace litaug

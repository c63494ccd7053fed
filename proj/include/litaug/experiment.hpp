#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/metrics.hpp"
#include "litaug/parallel.hpp"
#include "litaug/splits.hpp"
#include "litaug/stats.hpp"
#include "litaug/trainer.hpp"

namespace litaug {

struct ExperimentPlan {
    std::size_t folds = 5;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    SplitMode split = SplitMode::Standard;
    double holdout_fraction = 0.2;
    unsigned jobs = 1;
};

// Metric values per (seed, fold) unit, seeds outermost.
struct SettingResult {
    std::string name;
    std::vector<std::vector<MetricSet>> units;
};

namespace detail {

struct Unit {
    std::vector<std::size_t> train, test;
    std::uint64_t model_seed;
};

inline std::vector<std::vector<Unit>> plan_units(const std::vector<LabeledTriplet>& original, const ExperimentPlan& plan) {
    std::vector<std::vector<Unit>> out;
    for (auto seed : plan.seeds) {
        std::vector<Unit> per_seed;
        if (plan.split == SplitMode::Standard) {
            const auto folds = stratified_kfold(original, plan.folds, seed);
            for (std::size_t f = 0; f < folds.size(); ++f) per_seed.push_back({folds[f].train, folds[f].test, derive_seed(seed, {20, f})});
        } else {
            const auto s = unseen_split(original, plan.split, plan.holdout_fraction, seed);
            per_seed.push_back({s.train, s.test, derive_seed(seed, {20, 0})});
        }
        out.push_back(std::move(per_seed));
    }
    return out;
}

}  // namespace detail

// Trains and scores every (seed, fold) unit. Units are identical across
// settings given the same original rows and plan, so results pair up.
inline SettingResult run_setting(const std::string& name, const std::vector<LabeledTriplet>& original, const std::vector<WeightedTriplet>& synthetic,
                                 const TrainConfig& config, const ExperimentPlan& plan) {
    const auto units = detail::plan_units(original, plan);
    std::vector<std::pair<std::size_t, std::size_t>> flat;
    for (std::size_t s = 0; s < units.size(); ++s)
        for (std::size_t f = 0; f < units[s].size(); ++f) flat.emplace_back(s, f);
    std::vector<MetricSet> values(flat.size());
    parallel_for(flat.size(), plan.jobs, [&](std::size_t i) {
        const auto& u = units[flat[i].first][flat[i].second];
        auto cfg = config;
        cfg.seed = u.model_seed;
        values[i] = evaluate_fold(original, {u.train, u.test}, synthetic, cfg);
    });
    SettingResult r{name, std::vector<std::vector<MetricSet>>(units.size())};
    for (std::size_t i = 0; i < flat.size(); ++i) r.units[flat[i].first].push_back(values[i]);
    return r;
}

inline const char* const kMetricNames[] = {"AUPRC", "maxF1", "BACC", "kappa"};

inline double metric_value(const MetricSet& m, std::size_t i) {
    switch (i) {
        case 0: return m.auprc;
        case 1: return m.max_f1;
        case 2: return m.bacc;
        default: return m.kappa;
    }
}

struct MetricSummary {
    double mean = 0.0;
    double stderr_folds = 0.0;  // within-seed fold stderr, averaged over seeds
    double stderr_seeds = 0.0;  // stderr of the per-seed means
    std::optional<double> p_value;
};

inline MetricSummary summarize(const SettingResult& r, std::size_t metric, const SettingResult* baseline = nullptr) {
    MetricSummary s;
    std::vector<double> all, seed_means, fold_errs;
    for (const auto& per_seed : r.units) {
        std::vector<double> v;
        for (const auto& m : per_seed) v.push_back(metric_value(m, metric));
        all.insert(all.end(), v.begin(), v.end());
        seed_means.push_back(mean(v));
        fold_errs.push_back(standard_error(v));
    }
    s.mean = mean(all);
    s.stderr_folds = mean(fold_errs);
    s.stderr_seeds = standard_error(seed_means);
    if (baseline && baseline->name != r.name) {
        std::vector<double> base;
        for (const auto& per_seed : baseline->units)
            for (const auto& m : per_seed) base.push_back(metric_value(m, metric));
        if (base.size() == all.size() && all.size() >= 2) s.p_value = paired_t_test_greater(all, base);
    }
    return s;
}

inline void write_table_csv(std::ostream& out, const std::vector<SettingResult>& results, const SettingResult* baseline) {
    out << "setting,metric,mean,stderr_folds,stderr_seeds,p_value_vs_no_aug\n";
    out.precision(10);
    for (const auto& r : results) {
        for (std::size_t m = 0; m < 4; ++m) {
            const auto s = summarize(r, m, baseline);
            out << r.name << ',' << kMetricNames[m] << ',' << s.mean << ',' << s.stderr_folds << ',' << s.stderr_seeds << ',';
            if (s.p_value) out << *s.p_value;
            out << '\n';
        }
    }
}

inline nlohmann::json table_json(const std::vector<SettingResult>& results, const SettingResult* baseline) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json metrics = nlohmann::json::object();
        for (std::size_t m = 0; m < 4; ++m) {
            const auto s = summarize(r, m, baseline);
            metrics[kMetricNames[m]] = {{"mean", s.mean},
                                        {"stderr_folds", s.stderr_folds},
                                        {"stderr_seeds", s.stderr_seeds},
                                        {"p_value_vs_no_aug", s.p_value ? nlohmann::json(*s.p_value) : nlohmann::json(nullptr)}};
        }
        nlohmann::json units = nlohmann::json::array();
        for (const auto& per_seed : r.units) {
            nlohmann::json folds = nlohmann::json::array();
            for (const auto& m : per_seed) folds.push_back({m.auprc, m.max_f1, m.bacc, m.kappa});
            units.push_back(std::move(folds));
        }
        rows.push_back({{"setting", r.name}, {"metrics", std::move(metrics)}, {"units", std::move(units)}});
    }
    return rows;
}

}  // namespace litaug

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/random.hpp"
#include "litaug/triplet.hpp"

namespace litaug {

struct Fold {
    std::vector<std::size_t> train;  // ascending indices
    std::vector<std::size_t> test;
};

// Positives and negatives are shuffled separately and dealt round-robin;
// negatives continue from the fold where positives stopped.
inline std::vector<Fold> stratified_kfold(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("stratified_kfold needs k >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
    if (pos.size() < k || neg.size() < k)
        throw ValidationError("stratified_kfold: each class needs at least " + std::to_string(k) + " members (positives " +
                              std::to_string(pos.size()) + ", negatives " + std::to_string(neg.size()) + ")");
    Rng(derive_seed(seed, {0})).shuffle(pos);
    Rng(derive_seed(seed, {1})).shuffle(neg);
    std::vector<std::size_t> fold_of(labels.size());
    for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % k;
    for (std::size_t j = 0; j < neg.size(); ++j) fold_of[neg[j]] = (pos.size() + j) % k;
    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
    }
    return folds;
}

inline std::vector<Fold> stratified_kfold(const std::vector<LabeledTriplet>& rows, std::size_t k, std::uint64_t seed) {
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (const auto& r : rows) labels.push_back(r.label);
    return stratified_kfold(labels, k, seed);
}

enum class SplitMode { Standard, Drug, Cell, DrugAndCell };

inline const char* to_string(SplitMode m) {
    switch (m) {
        case SplitMode::Standard: return "standard";
        case SplitMode::Drug: return "drug";
        case SplitMode::Cell: return "cell";
        case SplitMode::DrugAndCell: return "drug_cell";
    }
    return "?";
}

inline SplitMode parse_split_mode(std::string_view s) {
    if (s == "standard") return SplitMode::Standard;
    if (s == "drug") return SplitMode::Drug;
    if (s == "cell") return SplitMode::Cell;
    if (s == "drug_cell" || s == "drug&cell") return SplitMode::DrugAndCell;
    throw ValidationError("unknown split mode '" + std::string(s) + "' (standard|drug|cell|drug_cell)");
}

struct UnseenSplit {
    std::set<std::string> held_drugs;
    std::set<std::string> held_cells;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

namespace detail {

inline std::set<std::string> hold_out(const std::set<std::string>& all, double fraction, Rng& rng, const char* what) {
    if (all.size() < 2)
        throw ValidationError(std::string("unseen split needs at least 2 distinct ") + what + ", dataset has " + std::to_string(all.size()));
    std::vector<std::string> v(all.begin(), all.end());
    rng.shuffle(v);
    auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(v.size())));
    n = std::clamp<std::size_t>(n, 1, v.size() - 1);
    return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace detail

// Test rows use only held-out entities of the mode's type(s); train drops
// every row touching any of them.
inline UnseenSplit unseen_split(const std::vector<LabeledTriplet>& rows, SplitMode mode, double holdout_fraction, std::uint64_t seed) {
    if (mode == SplitMode::Standard) throw ValidationError("unseen_split requires drug, cell or drug_cell mode");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw ValidationError("holdout fraction must lie in (0,1)");
    UnseenSplit s;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(mode)}));
    const bool drugs = mode == SplitMode::Drug || mode == SplitMode::DrugAndCell;
    const bool cells = mode == SplitMode::Cell || mode == SplitMode::DrugAndCell;
    if (drugs) s.held_drugs = detail::hold_out(drugs_of(rows), holdout_fraction, rng, "drugs");
    if (cells) s.held_cells = detail::hold_out(cells_of(rows), holdout_fraction, rng, "cell lines");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& t = rows[i].triplet;
        const bool a = s.held_drugs.count(t.drug_a) > 0, b = s.held_drugs.count(t.drug_b) > 0;
        const bool c = s.held_cells.count(t.cell) > 0;
        const bool in_test = (!drugs || (a && b)) && (!cells || c);
        const bool touches = (drugs && (a || b)) || (cells && c);
        if (in_test) s.test.push_back(i);
        else if (!touches) s.train.push_back(i);
    }
    if (s.test.empty() || s.train.empty())
        throw ValidationError(std::string("unseen split (") + to_string(mode) + ") produced an empty " + (s.test.empty() ? "test" : "train") +
                              " set; use a larger dataset or adjust the holdout fraction");
    return s;
}

}  // namespace litaug

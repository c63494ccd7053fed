#pragma once

// Slow, obviously-correct reference implementations and random instance
// generators shared by the unit tests and the acceptance binary. Nothing in
// here calls the code path it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "litaug/litaug.hpp"

namespace oracle {

using litaug::ScoredExample;

inline bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

inline std::string lower(std::string s) {
    for (auto& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return s;
}

// ---- metrics ---------------------------------------------------------------

struct Counts {
    double tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Counts count_at(const std::vector<ScoredExample>& xs, auto predicate) {
    Counts c;
    for (const auto& x : xs) {
        const bool p = predicate(x.score);
        if (p && x.label == 1) c.tp += 1;
        if (p && x.label == 0) c.fp += 1;
        if (!p && x.label == 1) c.fn += 1;
        if (!p && x.label == 0) c.tn += 1;
    }
    return c;
}

inline std::vector<double> distinct_desc(const std::vector<ScoredExample>& xs) {
    std::set<double> s;
    for (const auto& x : xs) s.insert(x.score);
    return {s.rbegin(), s.rend()};
}

// Average precision by enumerating each distinct threshold and recounting.
inline double auprc(const std::vector<ScoredExample>& xs) {
    double positives = 0;
    for (const auto& x : xs) positives += x.label;
    double ap = 0, prev_recall = 0;
    for (double s : distinct_desc(xs)) {
        const auto c = count_at(xs, [s](double v) { return v >= s; });
        const double recall = c.tp / positives;
        ap += (recall - prev_recall) * (c.tp / (c.tp + c.fp));
        prev_recall = recall;
    }
    return ap;
}

inline double max_f1(const std::vector<ScoredExample>& xs) {
    double best = 0;
    for (double s : distinct_desc(xs)) {
        const auto c = count_at(xs, [s](double v) { return v >= s; });
        const double denom = 2 * c.tp + c.fp + c.fn;
        if (denom > 0) best = std::max(best, 2 * c.tp / denom);
    }
    return best;
}

inline double f1_at(const std::vector<ScoredExample>& xs, double threshold) {
    const auto c = count_at(xs, [threshold](double v) { return v > threshold; });
    const double denom = 2 * c.tp + c.fp + c.fn;
    return denom > 0 ? 2 * c.tp / denom : 0.0;
}

inline double bacc(const std::vector<ScoredExample>& xs, double threshold = 0.5) {
    const auto c = count_at(xs, [threshold](double v) { return v > threshold; });
    return (c.tp / (c.tp + c.fn) + c.tn / (c.tn + c.fp)) / 2;
}

// Textbook form: chance agreement as the sum over classes of the product of
// the marginal rates.
inline double kappa(const std::vector<ScoredExample>& xs, double threshold = 0.5) {
    const double n = static_cast<double>(xs.size());
    double agree = 0;
    double true_rate[2] = {0, 0}, pred_rate[2] = {0, 0};
    for (const auto& x : xs) {
        const int p = x.score > threshold ? 1 : 0;
        agree += (p == x.label);
        true_rate[x.label] += 1 / n;
        pred_rate[p] += 1 / n;
    }
    const double po = agree / n;
    const double pe = true_rate[0] * pred_rate[0] + true_rate[1] * pred_rate[1];
    if (pe >= 1) return 0;
    return (po - pe) / (1 - pe);
}

// Random instance with both classes present; scores drawn from a small grid
// so ties are common.
inline std::vector<ScoredExample> random_scored(std::mt19937_64& rng, std::size_t max_n = 50) {
    std::uniform_int_distribution<std::size_t> size(2, max_n);
    const auto n = size(rng);
    std::uniform_int_distribution<int> grid(0, 1 + static_cast<int>(rng() % 12));
    std::bernoulli_distribution coin(0.1 + 0.8 * std::uniform_real_distribution<double>(0, 1)(rng));
    const bool ties = rng() % 2 == 0;
    std::uniform_real_distribution<double> unit(0, 1);
    std::vector<ScoredExample> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back({coin(rng) ? 1 : 0, ties ? grid(rng) / 12.0 : unit(rng)});
    xs[0].label = 1;
    xs[1].label = 0;
    std::shuffle(xs.begin(), xs.end(), rng);
    return xs;
}

// ---- dictionary matching, mining, leakage ----------------------------------

// Every boundary-respecting occurrence of every key, found by direct search.
inline std::vector<litaug::EntityMention> naive_candidates(const litaug::EntityVocabulary& vocab, const std::string& sentence) {
    std::vector<litaug::EntityMention> hits;
    const auto hay = lower(sentence);
    for (const auto& [key, entry] : vocab.entries()) {
        const auto& k = key.first;
        for (std::size_t pos = 0; pos + k.size() <= hay.size(); ++pos) {
            if (hay.compare(pos, k.size(), k) != 0) continue;
            const auto end = pos + k.size();
            if (pos > 0 && alnum(sentence[pos - 1])) continue;
            if (end < sentence.size() && alnum(sentence[end])) continue;
            hits.push_back({sentence.substr(pos, k.size()), k, entry.type, pos, end});
        }
    }
    return hits;
}

inline std::vector<litaug::EntityMention> naive_find(const litaug::EntityVocabulary& vocab, const std::string& sentence) {
    return litaug::resolve_overlaps(naive_candidates(vocab, sentence));
}

inline bool has_word(const std::string& sentence, const std::string& word) {
    const auto hay = lower(sentence), w = lower(word);
    for (std::size_t pos = 0; pos + w.size() <= hay.size(); ++pos) {
        if (hay.compare(pos, w.size(), w) != 0) continue;
        const auto end = pos + w.size();
        if ((pos == 0 || !alnum(hay[pos - 1])) && (end == hay.size() || !alnum(hay[end]))) return true;
    }
    return false;
}

inline std::vector<litaug::MinedSentence> naive_mine(const std::vector<litaug::Abstract>& corpus, const litaug::EntityVocabulary& vocab,
                                                     const std::vector<std::string>& keywords, const litaug::SentenceSplitter& splitter) {
    std::vector<litaug::MinedSentence> out;
    std::vector<litaug::Abstract> docs = corpus;
    std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    for (const auto& doc : docs) {
        for (const auto& s : splitter.split(doc.text)) {
            std::vector<std::pair<std::size_t, std::string>> kw;
            for (const auto& k : keywords) {
                if (!has_word(s.text, k)) continue;
                const auto hay = lower(s.text), needle = lower(k);
                std::size_t first = std::string::npos;
                for (std::size_t pos = 0; pos + needle.size() <= hay.size(); ++pos) {
                    const auto end = pos + needle.size();
                    if (hay.compare(pos, needle.size(), needle) == 0 && (pos == 0 || !alnum(hay[pos - 1])) &&
                        (end == hay.size() || !alnum(hay[end]))) {
                        first = pos;
                        break;
                    }
                }
                kw.emplace_back(first, needle);
            }
            if (kw.empty()) continue;
            std::sort(kw.begin(), kw.end());
            std::vector<std::string> hits;
            for (auto& [p, k] : kw)
                if (std::find(hits.begin(), hits.end(), k) == hits.end()) hits.push_back(k);
            const auto mentions = naive_find(vocab, s.text);
            std::set<std::string> drugs;
            int cells = 0;
            for (const auto& m : mentions) {
                if (m.type == litaug::EntityType::Drug) drugs.insert(m.key);
                else ++cells;
            }
            if (drugs.size() < 2 || cells == 0) continue;
            out.push_back({doc.doc_id, s.index, s.text, mentions, hits});
        }
    }
    return out;
}

struct NaiveLeakage {
    std::map<std::string, litaug::CooccurrenceCount> drugs, cells;
    std::map<std::pair<std::string, std::string>, litaug::CooccurrenceCount> pairs;
    std::map<litaug::Triplet, litaug::CooccurrenceCount> triplets;
    std::size_t sentences = 0;
};

// One pass per (item, unit): does the unit mention every element of the item?
inline NaiveLeakage naive_leakage(const std::vector<litaug::Abstract>& corpus, const litaug::EntityVocabulary& vocab,
                                  const std::vector<litaug::LabeledTriplet>& dataset, const litaug::SentenceSplitter& splitter) {
    struct Unit {
        std::set<std::string> drugs, cells;
    };
    std::vector<std::vector<Unit>> sentence_units;
    std::vector<Unit> abstract_units;
    NaiveLeakage out;
    for (const auto& doc : corpus) {
        std::vector<Unit> per;
        Unit whole;
        for (const auto& s : splitter.split(doc.text)) {
            Unit u;
            for (const auto& m : naive_find(vocab, s.text)) (m.type == litaug::EntityType::Drug ? u.drugs : u.cells).insert(m.key);
            whole.drugs.insert(u.drugs.begin(), u.drugs.end());
            whole.cells.insert(u.cells.begin(), u.cells.end());
            per.push_back(u);
        }
        out.sentences += per.size();
        sentence_units.push_back(per);
        abstract_units.push_back(whole);
    }
    auto count = [&](auto has) {
        litaug::CooccurrenceCount c;
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            for (const auto& u : sentence_units[d]) c.sentences += has(u) ? 1 : 0;
            c.abstracts += has(abstract_units[d]) ? 1 : 0;
        }
        return c;
    };
    for (const auto& row : dataset) {
        const auto& t = row.triplet;
        for (const auto& d : {t.drug_a, t.drug_b}) out.drugs[d] = count([&](const Unit& u) { return u.drugs.count(d) > 0; });
        out.cells[t.cell] = count([&](const Unit& u) { return u.cells.count(t.cell) > 0; });
        out.pairs[{t.drug_a, t.drug_b}] = count([&](const Unit& u) { return u.drugs.count(t.drug_a) && u.drugs.count(t.drug_b); });
        out.triplets[t] = count([&](const Unit& u) { return u.drugs.count(t.drug_a) && u.drugs.count(t.drug_b) && u.cells.count(t.cell); });
    }
    return out;
}

// A toy corpus over a fixed vocabulary, with overlapping names, mixed case,
// abbreviations and keyword variants, plus the matching typed vocabulary and
// a dataset of triplets over the same names.
struct ToyWorld {
    litaug::EntityVocabulary vocab;
    std::vector<litaug::Abstract> corpus;
    std::vector<litaug::LabeledTriplet> dataset;
};

inline ToyWorld toy_world(std::uint64_t seed, std::size_t abstracts) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> drugs = {"cisplatin", "camptothecin", "mek", "mek162", "5-fu", "AZD6244", "erlotinib", "taxol",
                                            "abt-888", "sn-38", "tram", "trametinib"};
    const std::vector<std::string> cells = {"BT-483", "MCF7", "MCF7/ADR", "A549", "HT-29", "HT", "PC-3", "U251"};
    const std::vector<std::string> words = {"and", "in", "cells", "were", "synergistic", "Synergy", "with", "the", "combination",
                                            "inhibited", "growth", "of", "synergistically", "SYNERGISM", "effects", "vs.",
                                            "e.g.", "Fig.", "al.", "treatment", "resistant", "cell", "line", "showed", "no"};
    ToyWorld w;
    for (const auto& d : drugs) w.vocab.add(d, litaug::EntityType::Drug, litaug::Source::SeedDataset);
    for (const auto& c : cells) w.vocab.add(c, litaug::EntityType::CellLine, litaug::Source::SeedDataset);
    w.vocab.add("ht", litaug::EntityType::Drug, litaug::Source::LINCS);  // same key, both types

    auto pick = [&](const auto& v) { return v[rng() % v.size()]; };
    auto casing = [&](std::string s) {
        switch (rng() % 4) {
            case 0: for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c))); break;
            case 1: s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0]))); break;
            default: break;
        }
        return s;
    };
    for (std::size_t i = 0; i < abstracts; ++i) {
        std::string text;
        const auto n_sent = 1 + rng() % 5;
        for (std::size_t s = 0; s < n_sent; ++s) {
            const auto len = 3 + rng() % 12;
            std::string sent;
            for (std::size_t t = 0; t < len; ++t) {
                std::string tok;
                switch (rng() % 6) {
                    case 0: case 1: tok = casing(pick(drugs)); break;
                    case 2: tok = casing(pick(cells)); break;
                    default: tok = pick(words); break;
                }
                if (rng() % 9 == 0) tok += pick(std::vector<std::string>{",", "-resistant", "s", "/", ";"});
                if (!sent.empty()) sent += rng() % 11 == 0 ? "  " : " ";
                sent += tok;
            }
            sent[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sent[0])));
            if (!text.empty()) text += ' ';
            text += sent + pick(std::vector<std::string>{".", ".", "!", "?", "."});
        }
        w.corpus.push_back({"doc" + std::to_string(1000 + (i * 7919) % 100000), "t", text});
    }
    std::set<litaug::Triplet> seen;
    while (w.dataset.size() < 40) {
        const auto a = pick(drugs), b = pick(drugs);
        if (lower(a) == lower(b)) continue;
        auto t = litaug::make_triplet(a, b, pick(cells));
        if (!seen.insert(t).second) continue;
        w.dataset.push_back({t, static_cast<int>(rng() % 2)});
    }
    return w;
}

// ---- k-medoids ---------------------------------------------------------------

inline double cost_of(const litaug::DistanceMatrix& d, const std::vector<std::size_t>& medoids) {
    double total = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (auto m : medoids) best = std::min(best, d(j, m));
        total += best;
    }
    return total;
}

inline double exhaustive_optimum(const litaug::DistanceMatrix& d, std::size_t k) {
    const auto n = d.size();
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        std::vector<std::size_t> m;
        for (std::size_t i = 0; i < n; ++i)
            if (mask[i]) m.push_back(i);
        best = std::min(best, cost_of(d, m));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

inline std::vector<litaug::Embedding> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::normal_distribution<double> g(0, 1);
    const auto centers = 1 + rng() % 4;
    std::vector<litaug::Embedding> cs(centers, litaug::Embedding(dim));
    for (auto& c : cs)
        for (auto& x : c) x = 4 * g(rng);
    std::vector<litaug::Embedding> pts(n, litaug::Embedding(dim));
    for (auto& p : pts) {
        const auto& c = cs[rng() % centers];
        for (std::size_t j = 0; j < dim; ++j) p[j] = c[j] + g(rng);
    }
    return pts;
}

// ---- classifier --------------------------------------------------------------

struct GradCheck {
    double max_rel_error = 0;
    std::size_t checked = 0;
};

// Central differences on every parameter entry, compared to the analytic
// gradient with a relative error floored at 1e-6 in the denominator.
inline GradCheck finite_difference_check(litaug::SynergyModel& model, const std::vector<litaug::IndexedRow>& batch,
                                         const litaug::LossOptions& opt, double h = 1e-5) {
    const auto analytic = litaug::loss_and_gradients(model, batch, opt).grads;
    GradCheck r;
    auto& params = model.params();
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (Eigen::Index i = 0; i < params[p].rows(); ++i) {
            for (Eigen::Index j = 0; j < params[p].cols(); ++j) {
                const double saved = params[p](i, j);
                params[p](i, j) = saved + h;
                const double up = litaug::batch_loss(model, batch, opt);
                params[p](i, j) = saved - h;
                const double down = litaug::batch_loss(model, batch, opt);
                params[p](i, j) = saved;
                const double numeric = (up - down) / (2 * h);
                const double a = analytic[p](i, j);
                const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
                r.max_rel_error = std::max(r.max_rel_error, rel);
                ++r.checked;
            }
        }
    }
    return r;
}

// Four drugs, two cells: a triplet is synergistic exactly when it contains
// drug d0 and the cell is c0. Every pair over every cell is listed.
inline std::vector<litaug::LabeledTriplet> separable_toy() {
    const std::vector<std::string> drugs = {"d0", "d1", "d2", "d3"};
    std::vector<litaug::LabeledTriplet> rows;
    for (std::size_t a = 0; a < drugs.size(); ++a)
        for (std::size_t b = a + 1; b < drugs.size(); ++b)
            for (const std::string c : {"c0", "c1"})
                rows.push_back({litaug::make_triplet(drugs[a], drugs[b], c), (a == 0 && c == "c0") ? 1 : 0});
    return rows;
}

// ---- files -------------------------------------------------------------------

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("litaug-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace oracle

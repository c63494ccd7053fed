#pragma once

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/corpus.hpp"
#include "litaug/csv.hpp"
#include "litaug/matcher.hpp"
#include "litaug/parallel.hpp"
#include "litaug/triplet.hpp"

namespace litaug {

// Distinct drug and cell keys mentioned inside one counting unit.
struct UnitEntities {
    std::set<std::string> drugs;
    std::set<std::string> cells;
};

struct CooccurrenceCount {
    std::size_t sentences = 0;
    std::size_t abstracts = 0;

    bool operator==(const CooccurrenceCount&) const = default;
};

enum class Granularity { Sentence, Abstract };
enum class ItemKind { Drug, Cell, DrugPair, Triplet };

inline const char* to_string(ItemKind k) {
    switch (k) {
        case ItemKind::Drug: return "drug";
        case ItemKind::Cell: return "cell_line";
        case ItemKind::DrugPair: return "drug_pair";
        case ItemKind::Triplet: return "triplet";
    }
    return "?";
}

struct CdfPoint {
    int k;
    double fraction;  // share of items appearing in fewer than k units
};

struct LeakageReport {
    std::size_t abstracts = 0;
    std::size_t sentences = 0;
    std::vector<int> k_buckets;
    std::map<std::string, CooccurrenceCount> drugs;
    std::map<std::string, CooccurrenceCount> cells;
    std::map<std::pair<std::string, std::string>, CooccurrenceCount> pairs;
    std::map<Triplet, CooccurrenceCount> triplets;

    std::vector<CdfPoint> cdf(ItemKind kind, Granularity g) const {
        std::vector<std::size_t> counts;
        auto collect = [&](const auto& m) {
            for (const auto& [k, c] : m) counts.push_back(g == Granularity::Sentence ? c.sentences : c.abstracts);
        };
        switch (kind) {
            case ItemKind::Drug: collect(drugs); break;
            case ItemKind::Cell: collect(cells); break;
            case ItemKind::DrugPair: collect(pairs); break;
            case ItemKind::Triplet: collect(triplets); break;
        }
        std::vector<CdfPoint> out;
        for (int k : k_buckets) {
            std::size_t below = 0;
            for (auto c : counts) below += (static_cast<long long>(c) < k);
            out.push_back({k, counts.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(counts.size())});
        }
        return out;
    }
};

// Per-abstract, per-sentence entity sets as seen by the matcher.
struct ScannedAbstract {
    std::vector<UnitEntities> sentences;
    UnitEntities whole;
};

inline ScannedAbstract scan_abstract(const Abstract& doc, const Matcher& matcher, const SentenceSplitter& splitter) {
    ScannedAbstract out;
    for (const auto& s : splitter.split(doc.text)) {
        UnitEntities u;
        for (const auto& m : matcher.find(s.text)) {
            if (m.type == EntityType::Drug) u.drugs.insert(m.key);
            else u.cells.insert(m.key);
        }
        out.whole.drugs.insert(u.drugs.begin(), u.drugs.end());
        out.whole.cells.insert(u.cells.begin(), u.cells.end());
        out.sentences.push_back(std::move(u));
    }
    return out;
}

struct AuditOptions {
    std::vector<int> k_buckets = {1, 2, 5, 10, 100, 1000};
    unsigned jobs = 1;
};

inline LeakageReport audit_leakage(const std::vector<Abstract>& corpus, const Matcher& matcher,
                                   const std::vector<LabeledTriplet>& dataset, const AuditOptions& options = {},
                                   const SentenceSplitter& splitter = {}) {
    LeakageReport r;
    r.k_buckets = options.k_buckets;
    for (const auto& row : dataset) {
        const auto& t = row.triplet;
        r.drugs.try_emplace(t.drug_a);
        r.drugs.try_emplace(t.drug_b);
        r.cells.try_emplace(t.cell);
        r.pairs.try_emplace(std::pair{t.drug_a, t.drug_b});
        r.triplets.try_emplace(t);
    }

    std::vector<ScannedAbstract> scanned(corpus.size());
    parallel_for(corpus.size(), options.jobs, [&](std::size_t i) { scanned[i] = scan_abstract(corpus[i], matcher, splitter); });

    auto count_unit = [&](const UnitEntities& u, std::size_t CooccurrenceCount::*field) {
        for (const auto& d : u.drugs)
            if (auto it = r.drugs.find(d); it != r.drugs.end()) ++(it->second.*field);
        for (const auto& c : u.cells)
            if (auto it = r.cells.find(c); it != r.cells.end()) ++(it->second.*field);
        for (auto a = u.drugs.begin(); a != u.drugs.end(); ++a) {
            for (auto b = std::next(a); b != u.drugs.end(); ++b) {
                auto pit = r.pairs.find({*a, *b});
                if (pit == r.pairs.end()) continue;
                ++(pit->second.*field);
                for (const auto& c : u.cells)
                    if (auto tit = r.triplets.find(Triplet{*a, *b, c}); tit != r.triplets.end()) ++(tit->second.*field);
            }
        }
    };

    r.abstracts = corpus.size();
    for (const auto& doc : scanned) {
        for (const auto& s : doc.sentences) count_unit(s, &CooccurrenceCount::sentences);
        r.sentences += doc.sentences.size();
        count_unit(doc.whole, &CooccurrenceCount::abstracts);
    }
    return r;
}

inline nlohmann::json to_json(const LeakageReport& r) {
    nlohmann::json cdf;
    for (auto g : {Granularity::Sentence, Granularity::Abstract}) {
        nlohmann::json per_kind;
        for (auto kind : {ItemKind::Drug, ItemKind::Cell, ItemKind::DrugPair, ItemKind::Triplet}) {
            nlohmann::json points = nlohmann::json::array();
            for (const auto& p : r.cdf(kind, g)) points.push_back({{"k", p.k}, {"fraction", p.fraction}});
            per_kind[to_string(kind)] = std::move(points);
        }
        cdf[g == Granularity::Sentence ? "sentence" : "abstract"] = std::move(per_kind);
    }
    return {{"units", {{"abstracts", r.abstracts}, {"sentences", r.sentences}}},
            {"items",
             {{"drug", r.drugs.size()}, {"cell_line", r.cells.size()}, {"drug_pair", r.pairs.size()}, {"triplet", r.triplets.size()}}},
            {"k_buckets", r.k_buckets},
            {"cdf", std::move(cdf)}};
}

inline void write_counts_csv(std::ostream& out, const LeakageReport& r) {
    out << "kind,drug_a,drug_b,cell_line,sentence_count,abstract_count\n";
    auto row = [&](const char* kind, const std::string& a, const std::string& b, const std::string& c,
                   const CooccurrenceCount& n) {
        out << kind << ',' << csv::escape(a) << ',' << csv::escape(b) << ',' << csv::escape(c) << ',' << n.sentences << ','
            << n.abstracts << '\n';
    };
    for (const auto& [d, n] : r.drugs) row("drug", d, "", "", n);
    for (const auto& [c, n] : r.cells) row("cell_line", "", "", c, n);
    for (const auto& [p, n] : r.pairs) row("drug_pair", p.first, p.second, "", n);
    for (const auto& [t, n] : r.triplets) row("triplet", t.drug_a, t.drug_b, t.cell, n);
}

}  // namespace litaug

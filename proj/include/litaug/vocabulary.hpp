#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/text.hpp"
#include "litaug/triplet.hpp"

namespace litaug {

enum class EntityType { Drug, CellLine };

enum class Source { SeedDataset, LINCS, GDSC, CCLE, NCI60, Synthesized };

inline const char* to_string(EntityType t) { return t == EntityType::Drug ? "drug" : "cell_line"; }

inline const char* to_string(Source s) {
    switch (s) {
        case Source::SeedDataset: return "seed";
        case Source::LINCS: return "lincs";
        case Source::GDSC: return "gdsc";
        case Source::CCLE: return "ccle";
        case Source::NCI60: return "nci60";
        case Source::Synthesized: return "synthesized";
    }
    return "?";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
    const auto v = text::lower(text::trim(s));
    if (v == "drug") return EntityType::Drug;
    if (v == "cell_line" || v == "cell" || v == "cellline") return EntityType::CellLine;
    return std::nullopt;
}

inline std::optional<Source> parse_source(std::string_view s) {
    const auto v = text::lower(text::trim(s));
    if (v == "seed" || v == "seeddataset" || v == "dataset") return Source::SeedDataset;
    if (v == "lincs") return Source::LINCS;
    if (v == "gdsc") return Source::GDSC;
    if (v == "ccle") return Source::CCLE;
    if (v == "nci60" || v == "nci-60") return Source::NCI60;
    if (v == "synthesized") return Source::Synthesized;
    return std::nullopt;
}

inline std::string canonical_key(std::string_view surface) { return text::lower(text::trim(surface)); }

struct VocabEntry {
    std::string surface;
    EntityType type;
    Source source;
};

// Typed name lists keyed by (canonical key, type). The first insertion of a
// key/type pair wins; later duplicates are ignored.
class EntityVocabulary {
public:
    using Key = std::pair<std::string, EntityType>;

    bool add(std::string_view surface, EntityType type, Source source) {
        auto key = canonical_key(surface);
        if (key.empty()) return false;
        auto [it, inserted] = entries_.try_emplace({key, type}, VocabEntry{std::string(text::trim(surface)), type, source});
        return inserted;
    }

    bool contains(std::string_view surface, EntityType type) const {
        return entries_.count({canonical_key(surface), type}) > 0;
    }

    const VocabEntry* find(std::string_view surface, EntityType type) const {
        auto it = entries_.find({canonical_key(surface), type});
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const std::map<Key, VocabEntry>& entries() const { return entries_; }

    std::size_t count(EntityType type) const {
        std::size_t n = 0;
        for (const auto& [k, e] : entries_) n += (e.type == type);
        return n;
    }

    std::size_t count(EntityType type, Source source) const {
        std::size_t n = 0;
        for (const auto& [k, e] : entries_) n += (e.type == type && e.source == source);
        return n;
    }

    // Canonical keys of the given type, excluding synthesized entries.
    std::set<std::string> valid_keys(EntityType type) const {
        std::set<std::string> out;
        for (const auto& [k, e] : entries_)
            if (e.type == type && e.source != Source::Synthesized) out.insert(k.first);
        return out;
    }

    // Adds every drug and cell line named by the dataset as seed entries.
    void add_dataset(const std::vector<LabeledTriplet>& rows) {
        for (const auto& r : rows) {
            add(r.triplet.drug_a, EntityType::Drug, Source::SeedDataset);
            add(r.triplet.drug_b, EntityType::Drug, Source::SeedDataset);
            add(r.triplet.cell, EntityType::CellLine, Source::SeedDataset);
        }
    }

    void merge(const EntityVocabulary& other) {
        for (const auto& [k, e] : other.entries_) entries_.try_emplace(k, e);
    }

private:
    std::map<Key, VocabEntry> entries_;
};

inline EntityVocabulary parse_vocabulary(std::istream& in, const std::string& origin = "<stream>") {
    EntityVocabulary vocab;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(origin + ": empty vocabulary file (missing header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::split(line, '\t') != std::vector<std::string>{"surface", "type", "source"})
        throw ValidationError(origin + ": expected header surface<TAB>type<TAB>source");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line, '\t');
        const auto where = origin + ":" + std::to_string(line_no);
        if (f.size() != 3) throw ValidationError(where + ": expected 3 tab-separated fields");
        const auto type = parse_entity_type(f[1]);
        if (!type) throw ValidationError(where + ": unknown entity type '" + f[1] + "'");
        const auto source = parse_source(f[2]);
        if (!source) throw ValidationError(where + ": unknown source '" + f[2] + "'");
        vocab.add(f[0], *type, *source);
    }
    return vocab;
}

inline EntityVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read vocabulary file: " + path);
    return parse_vocabulary(in, path);
}

inline void write_vocabulary(std::ostream& out, const EntityVocabulary& vocab) {
    out << "surface\ttype\tsource\n";
    for (const auto& [k, e] : vocab.entries())
        out << e.surface << '\t' << to_string(e.type) << '\t' << to_string(e.source) << '\n';
}

}  // namespace litaug

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/mining.hpp"
#include "litaug/vocabulary.hpp"

namespace litaug {

enum class SlotType { Drug, Cell };

inline constexpr std::string_view kDrugMarker = "[DRUG_MASK]";
inline constexpr std::string_view kCellMarker = "[CELL_MASK]";
inline constexpr std::string_view kGatewayMask = "[MASK]";

inline const char* to_string(SlotType t) { return t == SlotType::Drug ? "drug" : "cell"; }
inline std::string_view marker(SlotType t) { return t == SlotType::Drug ? kDrugMarker : kCellMarker; }
inline SlotType slot_type_for(EntityType t) { return t == EntityType::Drug ? SlotType::Drug : SlotType::Cell; }
inline EntityType entity_type_for(SlotType t) { return t == SlotType::Drug ? EntityType::Drug : EntityType::CellLine; }

struct TemplateSource {
    enum class Kind { Manual, Mined, Medoid };
    Kind kind = Kind::Manual;
    int iteration = 0;
    int cluster_id = -1;
    std::string doc_id;
    std::size_t sentence_index = 0;

    bool operator==(const TemplateSource&) const = default;
};

// A sentence with typed holes. `pieces` always holds slots.size() + 1
// literal segments; slot i sits between pieces[i] and pieces[i + 1].
struct PromptTemplate {
    std::string id;
    TemplateSource source;
    std::vector<std::string> pieces{""};
    std::vector<SlotType> slots;

    bool operator==(const PromptTemplate&) const = default;

    std::size_t count(SlotType t) const {
        std::size_t n = 0;
        for (auto s : slots) n += (s == t);
        return n;
    }

    // Text with typed markers, e.g. "[DRUG_MASK] and [DRUG_MASK] in [CELL_MASK]".
    std::string text() const {
        std::string out = pieces[0];
        for (std::size_t i = 0; i < slots.size(); ++i) {
            out += marker(slots[i]);
            out += pieces[i + 1];
        }
        return out;
    }

    // Substitutes fills where present and `mask` elsewhere.
    std::string render(const std::vector<std::optional<std::string>>& fills, std::string_view mask = kGatewayMask) const {
        std::string out = pieces[0];
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (i < fills.size() && fills[i]) out += *fills[i];
            else out += mask;
            out += pieces[i + 1];
        }
        return out;
    }

    std::string render_masked(std::string_view mask = kGatewayMask) const { return render({}, mask); }
};

// Parses text containing [DRUG_MASK]/[CELL_MASK] markers.
inline PromptTemplate parse_template(std::string_view marked, std::string id = {}, TemplateSource source = {}) {
    PromptTemplate t;
    t.id = std::move(id);
    t.source = std::move(source);
    t.pieces.clear();
    std::string current;
    std::size_t i = 0;
    while (i < marked.size()) {
        if (marked.substr(i, kDrugMarker.size()) == kDrugMarker) {
            t.pieces.push_back(std::move(current));
            current.clear();
            t.slots.push_back(SlotType::Drug);
            i += kDrugMarker.size();
        } else if (marked.substr(i, kCellMarker.size()) == kCellMarker) {
            t.pieces.push_back(std::move(current));
            current.clear();
            t.slots.push_back(SlotType::Cell);
            i += kCellMarker.size();
        } else {
            current.push_back(marked[i++]);
        }
    }
    t.pieces.push_back(std::move(current));
    return t;
}

// Replaces every mention span with a slot of the mention's type.
inline PromptTemplate mask_sentence(const MinedSentence& mined) {
    PromptTemplate t;
    t.source.kind = TemplateSource::Kind::Mined;
    t.source.doc_id = mined.doc_id;
    t.source.sentence_index = mined.sentence_index;
    t.id = mined.doc_id + "#" + std::to_string(mined.sentence_index);
    t.pieces.clear();
    std::size_t cursor = 0;
    for (const auto& m : mined.mentions) {
        if (m.begin < cursor || m.end > mined.text.size())
            throw ValidationError("mention spans of " + t.id + " overlap or run past the sentence");
        t.pieces.push_back(mined.text.substr(cursor, m.begin - cursor));
        t.slots.push_back(slot_type_for(m.type));
        cursor = m.end;
    }
    t.pieces.push_back(mined.text.substr(cursor));
    return t;
}

inline std::string unmask(const PromptTemplate& t, const std::vector<std::string>& surfaces) {
    if (surfaces.size() != t.slots.size()) throw ValidationError("unmask: surface count does not match slot count");
    std::vector<std::optional<std::string>> fills(surfaces.begin(), surfaces.end());
    return t.render(fills);
}

inline nlohmann::json to_json(const TemplateSource& s) {
    switch (s.kind) {
        case TemplateSource::Kind::Manual: return {{"kind", "manual"}};
        case TemplateSource::Kind::Mined:
            return {{"kind", "mined"}, {"doc_id", s.doc_id}, {"sentence_index", s.sentence_index}};
        case TemplateSource::Kind::Medoid:
            return {{"kind", "medoid"},
                    {"iteration", s.iteration},
                    {"cluster_id", s.cluster_id},
                    {"doc_id", s.doc_id},
                    {"sentence_index", s.sentence_index}};
    }
    return {};
}

inline nlohmann::json to_json(const PromptTemplate& t) {
    nlohmann::json slots = nlohmann::json::array();
    for (std::size_t i = 0; i < t.slots.size(); ++i) slots.push_back({{"index", i}, {"type", to_string(t.slots[i])}});
    return {{"template_id", t.id}, {"source", to_json(t.source)}, {"text", t.text()}, {"slots", std::move(slots)}};
}

inline PromptTemplate template_from_json(const nlohmann::json& j) {
    TemplateSource src;
    const auto& s = j.at("source");
    const auto kind = s.at("kind").get<std::string>();
    if (kind == "manual") {
        src.kind = TemplateSource::Kind::Manual;
    } else if (kind == "mined" || kind == "medoid") {
        src.kind = kind == "mined" ? TemplateSource::Kind::Mined : TemplateSource::Kind::Medoid;
        src.doc_id = s.at("doc_id").get<std::string>();
        src.sentence_index = s.at("sentence_index").get<std::size_t>();
        src.iteration = s.value("iteration", 0);
        src.cluster_id = s.value("cluster_id", -1);
    } else {
        throw ValidationError("template: unknown source kind '" + kind + "'");
    }
    auto t = parse_template(j.at("text").get<std::string>(), j.at("template_id").get<std::string>(), src);
    const auto& slots = j.at("slots");
    if (slots.size() != t.slots.size())
        throw ValidationError("template " + t.id + ": slot list does not match markers in text");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].at("index").get<std::size_t>() != i || slots[i].at("type").get<std::string>() != to_string(t.slots[i]))
            throw ValidationError("template " + t.id + ": slot list does not match markers in text");
    }
    return t;
}

}  // namespace litaug

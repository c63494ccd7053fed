#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/gateway.hpp"
#include "litaug/prompt_template.hpp"
#include "litaug/triplet.hpp"
#include "litaug/vocabulary.hpp"

namespace litaug {

// The eleven hand-written cloze prompts, each with two drug slots and one
// cell-line slot.
inline std::vector<PromptTemplate> manual_templates() {
    static const char* const kTexts[] = {
        "On cell line [CELL_MASK], [DRUG_MASK] has synergy with [DRUG_MASK].",
        "On cell line [CELL_MASK], [DRUG_MASK] are synergistic with [DRUG_MASK].",
        "[DRUG_MASK] has synergy with [DRUG_MASK] on cell line [CELL_MASK].",
        "[DRUG_MASK] and [DRUG_MASK] are synergistic on cell line [CELL_MASK].",
        "On cell line [CELL_MASK], there is a synergy between [DRUG_MASK] and [DRUG_MASK].",
        "There is a synergy between [DRUG_MASK] and [DRUG_MASK] on cell line [CELL_MASK].",
        "[DRUG_MASK] and [DRUG_MASK] are effective to treat to cell line [CELL_MASK].",
        "[DRUG_MASK] and [DRUG_MASK] are effective on cell line [CELL_MASK].",
        "On cell line [CELL_MASK], [DRUG_MASK] and [DRUG_MASK] are effective.",
        "On cell line [CELL_MASK], [DRUG_MASK] and [DRUG_MASK] are synergistic.",
        "On cell line [CELL_MASK], [DRUG_MASK] and [DRUG_MASK] have an synergy.",
    };
    std::vector<PromptTemplate> out;
    int n = 0;
    for (const char* t : kTexts) {
        ++n;
        out.push_back(parse_template(t, (n < 10 ? "manual-0" : "manual-") + std::to_string(n), {}));
    }
    return out;
}

struct PrefilledSlot {
    std::size_t slot;
    std::string surface;
    EntityType type;

    bool operator==(const PrefilledSlot&) const = default;
};

// A template with zero, one or two slots pre-filled from an existing triplet.
struct WarmStartPrompt {
    std::string template_id;
    std::vector<PrefilledSlot> filled;
    std::vector<std::size_t> remaining;  // slot indices left for the model
    std::string rendered_text;           // remaining slots rendered as [MASK]
    std::optional<Triplet> source;

    bool operator==(const WarmStartPrompt&) const = default;
};

inline WarmStartPrompt make_prompt(const PromptTemplate& t, std::vector<PrefilledSlot> filled, std::optional<Triplet> source) {
    WarmStartPrompt p;
    p.template_id = t.id;
    std::sort(filled.begin(), filled.end(), [](const auto& a, const auto& b) { return a.slot < b.slot; });
    std::vector<std::optional<std::string>> fills(t.slots.size());
    for (const auto& f : filled) fills[f.slot] = f.surface;
    for (std::size_t i = 0; i < t.slots.size(); ++i)
        if (!fills[i]) p.remaining.push_back(i);
    p.filled = std::move(filled);
    p.rendered_text = t.render(fills);
    p.source = std::move(source);
    return p;
}

// The template with every slot left for the model.
inline WarmStartPrompt cold_prompt(const PromptTemplate& t) { return make_prompt(t, {}, std::nullopt); }

using VocabularyPredicate = std::function<bool(std::string_view)>;

// Every placement of one or two in-vocabulary triplet elements into
// type-matching slots that leaves at least one slot open, deduplicated by
// rendered text (first occurrence kept).
inline std::vector<WarmStartPrompt> warm_start_variants(const PromptTemplate& t, const Triplet& triplet,
                                                        const VocabularyPredicate& in_vocabulary) {
    struct Element {
        std::string surface;
        EntityType type;
    };
    std::vector<Element> elements;
    if (in_vocabulary(triplet.drug_a)) elements.push_back({triplet.drug_a, EntityType::Drug});
    if (in_vocabulary(triplet.drug_b)) elements.push_back({triplet.drug_b, EntityType::Drug});
    if (in_vocabulary(triplet.cell)) elements.push_back({triplet.cell, EntityType::CellLine});

    auto slots_for = [&](EntityType type) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < t.slots.size(); ++i)
            if (t.slots[i] == slot_type_for(type)) s.push_back(i);
        return s;
    };

    std::vector<WarmStartPrompt> out;
    std::set<std::string> seen;
    auto emit = [&](std::vector<PrefilledSlot> filled) {
        if (filled.size() >= t.slots.size()) return;
        auto p = make_prompt(t, std::move(filled), triplet);
        if (seen.insert(p.rendered_text).second) out.push_back(std::move(p));
    };

    for (const auto& e : elements)
        for (auto s : slots_for(e.type)) emit({{s, e.surface, e.type}});
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = i + 1; j < elements.size(); ++j) {
            for (auto si : slots_for(elements[i].type))
                for (auto sj : slots_for(elements[j].type))
                    if (si != sj) emit({{si, elements[i].surface, elements[i].type}, {sj, elements[j].surface, elements[j].type}});
        }
    }
    return out;
}

inline std::vector<WarmStartPrompt> warm_start_variants(const PromptTemplate& t, const Triplet& triplet, const Gateway& gateway) {
    return warm_start_variants(t, triplet, [&](std::string_view s) { return gateway.in_vocabulary(s); });
}

struct MaskFill {
    std::size_t slot;
    std::string token;
    double probability;
    SlotType type;

    bool operator==(const MaskFill&) const = default;
};

enum class FillMode { Unrestricted, Restricted };

inline const char* to_string(FillMode m) { return m == FillMode::Restricted ? "restricted" : "unrestricted"; }

// Per-type candidate lists for restricted decoding: valid (non-synthesized)
// vocabulary entries that the model can emit as a single token.
struct RestrictionSets {
    std::vector<std::string> drugs;
    std::vector<std::string> cells;
    std::size_t multi_token_dropped = 0;

    const std::vector<std::string>& for_slot(SlotType t) const { return t == SlotType::Drug ? drugs : cells; }
};

inline RestrictionSets make_restriction(const EntityVocabulary& vocab, const VocabularyPredicate& in_vocabulary) {
    RestrictionSets r;
    for (auto type : {EntityType::Drug, EntityType::CellLine}) {
        auto& dst = type == EntityType::Drug ? r.drugs : r.cells;
        for (const auto& key : vocab.valid_keys(type)) {
            if (in_vocabulary(key)) dst.push_back(key);
            else ++r.multi_token_dropped;
        }
    }
    return r;
}

inline RestrictionSets make_restriction(const EntityVocabulary& vocab, const Gateway& gateway) {
    return make_restriction(vocab, [&](std::string_view s) { return gateway.in_vocabulary(s); });
}

struct FillOutcome {
    std::vector<MaskFill> fills;
    bool discarded = false;  // a restricted slot had no admissible token
};

// Top-1 decoding of all remaining slots in one gateway call.
inline FillOutcome fill_prompt(const Gateway& gateway, const PromptTemplate& t, const WarmStartPrompt& prompt,
                               const RestrictionSets* restriction = nullptr) {
    if (prompt.remaining.empty()) throw ValidationError("fill_prompt: prompt has no remaining slot");
    FillOutcome out;
    FillRequest request;
    request.text = prompt.rendered_text;
    request.top_k = 1;
    for (auto s : prompt.remaining) request.slot_types.push_back(t.slots[s]);
    if (restriction) {
        std::vector<std::vector<std::string>> allowed;
        for (auto type : request.slot_types) {
            if (restriction->for_slot(type).empty()) {
                out.discarded = true;
                return out;
            }
            allowed.push_back(restriction->for_slot(type));
        }
        request.allowed_tokens = std::move(allowed);
    }
    const auto response = gateway.fill(request);
    if (response.slots.size() != prompt.remaining.size())
        throw ProtocolError("fill response slot count does not match the prompt");
    for (std::size_t i = 0; i < prompt.remaining.size(); ++i) {
        const auto& list = response.slots[i];
        if (list.empty()) {
            out.discarded = true;
            out.fills.clear();
            return out;
        }
        out.fills.push_back({prompt.remaining[i], list.front().token, list.front().prob, request.slot_types[i]});
    }
    return out;
}

struct Provenance {
    std::string template_id;
    int iteration = 0;
    std::optional<Triplet> warm_start_source;
    std::vector<PrefilledSlot> warm_start_slots;
    std::vector<MaskFill> fills;
    std::string prompt;

    bool operator==(const Provenance&) const = default;
};

struct WeightedTriplet {
    Triplet triplet;
    int label = 1;
    double weight = 1.0;
    Provenance provenance;

    bool operator==(const WeightedTriplet&) const = default;
};

// Pools drug and cell surfaces from pre-filled and model-filled slots and
// emits one triplet per (unordered distinct drug pair, cell). The weight is
// the geometric mean of the fill probabilities of the model-filled members;
// pre-filled members contribute no term.
inline std::vector<WeightedTriplet> assemble_triplets(const PromptTemplate& t, const WarmStartPrompt& prompt,
                                                      const std::vector<MaskFill>& fills, int iteration = 0) {
    // key -> probability term (nullopt for pre-filled). A repeated key keeps
    // the pre-filled occurrence, else its highest probability.
    std::map<std::string, std::optional<double>> drugs, cells;
    auto add = [](auto& pool, const std::string& raw, std::optional<double> p) {
        auto key = canonical_key(raw);
        if (key.empty()) return;
        auto [it, inserted] = pool.try_emplace(key, p);
        if (!inserted && it->second && (!p || *p > *it->second)) it->second = p;
    };
    for (const auto& f : prompt.filled) add(f.type == EntityType::Drug ? drugs : cells, f.surface, std::nullopt);
    std::set<std::size_t> covered;
    for (const auto& f : fills) {
        add(f.type == SlotType::Drug ? drugs : cells, f.token, f.probability);
        covered.insert(f.slot);
    }
    for (auto s : prompt.remaining)
        if (!covered.count(s)) throw ValidationError("assemble_triplets: fills do not cover slot " + std::to_string(s) + " of " + t.id);

    std::vector<WeightedTriplet> out;
    for (auto a = drugs.begin(); a != drugs.end(); ++a) {
        for (auto b = std::next(a); b != drugs.end(); ++b) {
            for (const auto& [cell, pc] : cells) {
                double log_sum = 0.0;
                int terms = 0;
                for (const auto* p : std::array<const std::optional<double>*, 3>{&a->second, &b->second, &pc}) {
                    if (*p) {
                        log_sum += std::log(**p);
                        ++terms;
                    }
                }
                WeightedTriplet w;
                w.triplet = Triplet{a->first, b->first, cell};
                w.weight = terms == 0 ? 1.0 : std::exp(log_sum / terms);
                w.provenance = {t.id, iteration, prompt.source, prompt.filled, fills, prompt.rendered_text};
                out.push_back(std::move(w));
            }
        }
    }
    return out;
}

// Adds every filled token under its slot's entity type as a synthesized
// entry. Restricted decoding never grows the vocabulary.
inline std::size_t expand_vocabulary(EntityVocabulary& vocab, const std::vector<MaskFill>& fills, FillMode mode) {
    if (mode == FillMode::Restricted) return 0;
    std::size_t added = 0;
    for (const auto& f : fills) added += vocab.add(f.token, entity_type_for(f.type), Source::Synthesized);
    return added;
}

inline nlohmann::json to_json(const Triplet& t) { return nlohmann::json::array({t.drug_a, t.drug_b, t.cell}); }

inline nlohmann::json to_json(const WeightedTriplet& w) {
    nlohmann::json fills = nlohmann::json::array();
    for (const auto& f : w.provenance.fills)
        fills.push_back({{"slot", f.slot}, {"token", f.token}, {"prob", f.probability}, {"type", to_string(f.type)}});
    nlohmann::json warm = nullptr;
    if (w.provenance.warm_start_source || !w.provenance.warm_start_slots.empty()) {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& s : w.provenance.warm_start_slots)
            slots.push_back({{"slot", s.slot}, {"surface", s.surface}, {"type", to_string(s.type)}});
        warm = {{"source", w.provenance.warm_start_source ? to_json(*w.provenance.warm_start_source) : nlohmann::json(nullptr)},
                {"slots", std::move(slots)}};
    }
    return {{"drug_a", w.triplet.drug_a},
            {"drug_b", w.triplet.drug_b},
            {"cell", w.triplet.cell},
            {"label", w.label},
            {"weight", w.weight},
            {"provenance",
             {{"template_id", w.provenance.template_id},
              {"iteration", w.provenance.iteration},
              {"prompt", w.provenance.prompt},
              {"warm_start", std::move(warm)},
              {"fills", std::move(fills)}}}};
}

inline WeightedTriplet weighted_triplet_from_json(const nlohmann::json& j) {
    WeightedTriplet w;
    w.triplet = make_triplet(j.at("drug_a").get<std::string>(), j.at("drug_b").get<std::string>(), j.at("cell").get<std::string>());
    w.label = j.value("label", 1);
    w.weight = j.at("weight").get<double>();
    if (w.label != 1) throw ValidationError("synthetic triplet must carry label 1");
    if (!(w.weight > 0.0 && w.weight <= 1.0)) throw ValidationError("synthetic triplet weight outside (0,1]");
    if (w.triplet.drug_a == w.triplet.drug_b) throw ValidationError("synthetic triplet repeats a drug");
    if (j.contains("provenance")) {
        const auto& p = j["provenance"];
        w.provenance.template_id = p.value("template_id", std::string{});
        w.provenance.iteration = p.value("iteration", 0);
        w.provenance.prompt = p.value("prompt", std::string{});
        if (p.contains("warm_start") && !p["warm_start"].is_null()) {
            const auto& ws = p["warm_start"];
            if (ws.contains("source") && ws["source"].is_array() && ws["source"].size() == 3)
                w.provenance.warm_start_source = make_triplet(ws["source"][0].get<std::string>(), ws["source"][1].get<std::string>(),
                                                              ws["source"][2].get<std::string>());
            for (const auto& s : ws.value("slots", nlohmann::json::array())) {
                const auto type = parse_entity_type(s.at("type").get<std::string>());
                if (!type) throw ValidationError("synthetic triplet: bad warm-start slot type");
                w.provenance.warm_start_slots.push_back({s.at("slot").get<std::size_t>(), s.at("surface").get<std::string>(), *type});
            }
        }
        for (const auto& f : p.value("fills", nlohmann::json::array())) {
            const auto type = f.at("type").get<std::string>();
            w.provenance.fills.push_back({f.at("slot").get<std::size_t>(), f.at("token").get<std::string>(),
                                          f.at("prob").get<double>(), type == "drug" ? SlotType::Drug : SlotType::Cell});
        }
    }
    return w;
}

}  // namespace litaug

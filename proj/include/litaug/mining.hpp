#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/corpus.hpp"
#include "litaug/error.hpp"
#include "litaug/matcher.hpp"
#include "litaug/parallel.hpp"

namespace litaug {

inline std::vector<std::string> default_keywords() {
    return {"synergy", "synergistic", "synergism", "synergize", "synergizes", "synergistically"};
}

struct MinedSentence {
    std::string doc_id;
    std::size_t sentence_index = 0;
    std::string text;
    std::vector<EntityMention> mentions;
    std::vector<std::string> keyword_hits;

    bool operator==(const MinedSentence&) const = default;
};

// Whole-word, case-insensitive keyword hits in text order (each keyword once).
inline std::vector<std::string> keyword_hits(std::string_view sentence, const std::vector<std::string>& keywords) {
    const auto lowered = text::lower(sentence);
    std::vector<std::pair<std::size_t, std::string>> found;
    for (const auto& kw_raw : keywords) {
        const auto kw = text::lower(text::trim(kw_raw));
        if (kw.empty()) continue;
        for (auto pos = lowered.find(kw); pos != std::string::npos; pos = lowered.find(kw, pos + 1)) {
            if (text::on_word_boundary(lowered, pos, pos + kw.size())) {
                found.emplace_back(pos, kw);
                break;
            }
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<std::string> out;
    for (auto& [pos, kw] : found)
        if (std::find(out.begin(), out.end(), kw) == out.end()) out.push_back(std::move(kw));
    return out;
}

// At least two drugs with distinct keys, one cell line and one keyword.
inline bool is_candidate(const std::vector<EntityMention>& mentions, const std::vector<std::string>& hits) {
    if (hits.empty()) return false;
    std::set<std::string> drugs;
    bool cell = false;
    for (const auto& m : mentions) {
        if (m.type == EntityType::Drug) drugs.insert(m.key);
        else cell = true;
    }
    return cell && drugs.size() >= 2;
}

struct MiningOptions {
    std::vector<std::string> keywords = default_keywords();
    unsigned jobs = 1;
};

inline std::vector<MinedSentence> mine_candidates(const std::vector<Abstract>& corpus, const Matcher& matcher,
                                                  const MiningOptions& options = {},
                                                  const SentenceSplitter& splitter = {}) {
    if (options.keywords.empty()) throw ValidationError("keyword list must not be empty");
    std::vector<std::vector<MinedSentence>> per_doc(corpus.size());
    parallel_for(corpus.size(), options.jobs, [&](std::size_t d) {
        const auto& doc = corpus[d];
        for (auto& s : splitter.split(doc.text)) {
            auto hits = keyword_hits(s.text, options.keywords);
            if (hits.empty()) continue;
            auto mentions = matcher.find(s.text);
            if (!is_candidate(mentions, hits)) continue;
            per_doc[d].push_back({doc.doc_id, s.index, std::move(s.text), std::move(mentions), std::move(hits)});
        }
    });
    std::vector<MinedSentence> out;
    for (auto& v : per_doc)
        for (auto& m : v) out.push_back(std::move(m));
    std::stable_sort(out.begin(), out.end(), [](const MinedSentence& a, const MinedSentence& b) {
        return std::tie(a.doc_id, a.sentence_index) < std::tie(b.doc_id, b.sentence_index);
    });
    return out;
}

inline nlohmann::json to_json(const EntityMention& m) {
    return {{"surface", m.surface}, {"key", m.key}, {"type", to_string(m.type)}, {"begin", m.begin}, {"end", m.end}};
}

inline nlohmann::json to_json(const MinedSentence& s) {
    nlohmann::json mentions = nlohmann::json::array();
    for (const auto& m : s.mentions) mentions.push_back(to_json(m));
    return {{"doc_id", s.doc_id},
            {"sentence_index", s.sentence_index},
            {"text", s.text},
            {"mentions", std::move(mentions)},
            {"keyword_hits", s.keyword_hits}};
}

inline MinedSentence mined_sentence_from_json(const nlohmann::json& j) {
    MinedSentence s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.sentence_index = j.at("sentence_index").get<std::size_t>();
    s.text = j.at("text").get<std::string>();
    for (const auto& m : j.at("mentions")) {
        const auto type = parse_entity_type(m.at("type").get<std::string>());
        if (!type) throw ValidationError("mined sentence: bad mention type");
        EntityMention em{m.at("surface").get<std::string>(), m.at("key").get<std::string>(), *type,
                         m.at("begin").get<std::size_t>(), m.at("end").get<std::size_t>()};
        if (em.end > s.text.size() || em.begin >= em.end || s.text.substr(em.begin, em.end - em.begin) != em.surface)
            throw ValidationError("mined sentence " + s.doc_id + ": mention span does not match text");
        s.mentions.push_back(std::move(em));
    }
    s.keyword_hits = j.at("keyword_hits").get<std::vector<std::string>>();
    return s;
}

}  // namespace litaug

#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/text.hpp"
#include "litaug/vocabulary.hpp"

namespace litaug {

struct EntityMention {
    std::string surface;  // exact bytes of the sentence at [begin, end)
    std::string key;      // canonical key of the matched vocabulary entry
    EntityType type;
    std::size_t begin;
    std::size_t end;

    bool operator==(const EntityMention&) const = default;
};

// Leftmost-longest selection over raw candidate hits. Equal spans prefer Drug
// over CellLine, then the lexicographically smaller key.
inline std::vector<EntityMention> resolve_overlaps(std::vector<EntityMention> hits) {
    std::sort(hits.begin(), hits.end(), [](const EntityMention& a, const EntityMention& b) {
        const auto la = a.end - a.begin, lb = b.end - b.begin;
        return std::tuple(a.begin, lb, a.type, a.key) < std::tuple(b.begin, la, b.type, b.key);
    });
    std::vector<EntityMention> out;
    std::size_t cursor = 0;
    for (auto& h : hits) {
        if (h.begin < cursor) continue;
        cursor = h.end;
        out.push_back(std::move(h));
    }
    return out;
}

// Aho-Corasick automaton over the canonical keys of a vocabulary. Matching
// is ASCII case-insensitive and requires non-alphanumeric flanks.
class Matcher {
public:
    explicit Matcher(const EntityVocabulary& vocab) {
        if (vocab.empty()) throw ValidationError("cannot build a matcher from an empty vocabulary");
        nodes_.emplace_back();
        for (const auto& [key, entry] : vocab.entries()) insert(key.first, entry.type);
        link();
    }

    std::size_t pattern_count() const { return patterns_.size(); }

    // Every boundary-respecting occurrence of every pattern, unresolved.
    std::vector<EntityMention> candidates(std::string_view sentence) const {
        std::vector<EntityMention> hits;
        std::int32_t state = 0;
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            const char c = text::fold(sentence[i]);
            while (state != 0 && child(state, c) < 0) state = nodes_[state].fail;
            const auto next = child(state, c);
            state = next < 0 ? 0 : next;
            for (std::int32_t n = nodes_[state].output ? state : nodes_[state].dict; n > 0; n = nodes_[n].dict) {
                for (auto pid : nodes_[n].patterns) {
                    const auto& p = patterns_[pid];
                    const std::size_t end = i + 1;
                    const std::size_t begin = end - p.key.size();
                    if (!text::on_word_boundary(sentence, begin, end)) continue;
                    hits.push_back({std::string(sentence.substr(begin, end - begin)), p.key, p.type, begin, end});
                }
            }
        }
        return hits;
    }

    std::vector<EntityMention> find(std::string_view sentence) const { return resolve_overlaps(candidates(sentence)); }

private:
    struct Pattern {
        std::string key;
        EntityType type;
    };

    struct Node {
        std::vector<std::pair<char, std::int32_t>> next;  // sorted by char
        std::int32_t fail = 0;
        std::int32_t dict = 0;  // nearest proper suffix node carrying output, 0 if none
        bool output = false;
        std::vector<std::uint32_t> patterns;
    };

    std::int32_t child(std::int32_t node, char c) const {
        const auto& nx = nodes_[node].next;
        auto it = std::lower_bound(nx.begin(), nx.end(), c, [](const auto& e, char ch) { return e.first < ch; });
        return (it != nx.end() && it->first == c) ? it->second : -1;
    }

    void insert(const std::string& key, EntityType type) {
        std::int32_t state = 0;
        for (char raw : key) {
            const char c = text::fold(raw);
            auto found = child(state, c);
            if (found < 0) {
                found = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
                auto& nx = nodes_[state].next;
                auto it = std::lower_bound(nx.begin(), nx.end(), c, [](const auto& e, char ch) { return e.first < ch; });
                nx.insert(it, {c, found});
            }
            state = found;
        }
        nodes_[state].output = true;
        nodes_[state].patterns.push_back(static_cast<std::uint32_t>(patterns_.size()));
        patterns_.push_back({key, type});
    }

    void link() {
        std::queue<std::int32_t> q;
        for (const auto& [c, n] : nodes_[0].next) {
            nodes_[n].fail = 0;
            q.push(n);
        }
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (const auto& [c, v] : nodes_[u].next) {
                auto f = nodes_[u].fail;
                while (f != 0 && child(f, c) < 0) f = nodes_[f].fail;
                const auto target = child(f, c);
                nodes_[v].fail = (target >= 0 && target != v) ? target : 0;
                const auto fv = nodes_[v].fail;
                nodes_[v].dict = nodes_[fv].output ? fv : nodes_[fv].dict;
                q.push(v);
            }
        }
    }

    std::vector<Node> nodes_;
    std::vector<Pattern> patterns_;
};

inline Matcher build_matcher(const EntityVocabulary& vocab) { return Matcher(vocab); }

}  // namespace litaug

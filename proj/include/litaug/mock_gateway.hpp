#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/gateway.hpp"
#include "litaug/random.hpp"
#include "litaug/text.hpp"

namespace litaug {

struct MockGatewayConfig {
    std::uint64_t seed = 7;
    std::size_t embedding_dim = 64;
    std::vector<std::string> drug_tokens;
    std::vector<std::string> cell_tokens;
    std::vector<std::string> other_tokens;  // admissible in either slot type
    double sharpness = 8.0;                 // logit scale of the hashed scores
};

// Reads `token<TAB>kind` lines, kind in {drug, cell, other}.
inline void load_mock_tokens(const std::string& path, MockGatewayConfig& config) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read mock token list: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        const auto f = text::split(line, '\t');
        if (f.size() != 2) throw ValidationError(path + ":" + std::to_string(line_no) + ": expected token<TAB>kind");
        const auto kind = text::lower(text::trim(f[1]));
        auto token = text::lower(text::trim(f[0]));
        if (kind == "drug") config.drug_tokens.push_back(std::move(token));
        else if (kind == "cell") config.cell_tokens.push_back(std::move(token));
        else if (kind == "other") config.other_tokens.push_back(std::move(token));
        else throw ValidationError(path + ":" + std::to_string(line_no) + ": unknown kind '" + f[1] + "'");
    }
}

// Deterministic stand-in for a masked LM. Each candidate token of a slot gets
// a logit hashed from (seed, normalized text, slot index, token); the slot
// distribution is the softmax over the slot's candidates (the typed token
// list, or allowed_tokens when given). Embeddings are character 3-gram
// counts pushed through a seeded Gaussian projection.
class MockGateway final : public Gateway {
public:
    explicit MockGateway(MockGatewayConfig config) : config_(std::move(config)) {
        if (config_.embedding_dim == 0) throw ValidationError("mock gateway: embedding_dim must be positive");
        auto canon = [](std::vector<std::string>& v) {
            for (auto& t : v) t = text::lower(text::trim(t));
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            v.erase(std::remove(v.begin(), v.end(), std::string{}), v.end());
        };
        canon(config_.drug_tokens);
        canon(config_.cell_tokens);
        canon(config_.other_tokens);
        drug_candidates_ = merged(config_.drug_tokens, config_.other_tokens);
        cell_candidates_ = merged(config_.cell_tokens, config_.other_tokens);
        all_candidates_ = merged(drug_candidates_, config_.cell_tokens);
        if (all_candidates_.empty()) throw ValidationError("mock gateway: token lists are empty");
        vocab_.insert(all_candidates_.begin(), all_candidates_.end());
    }

    const MockGatewayConfig& config() const { return config_; }

    // Full ranked distribution per slot (no top_k truncation).
    FillResponse distribution(const FillRequest& request) const {
        validate_request(request);
        const auto masks = count_masks(request.text);
        const auto norm = text::normalize(request.text);
        const auto text_hash = hash_bytes(norm, config_.seed);
        FillResponse out;
        for (std::size_t s = 0; s < masks; ++s) {
            const auto& candidates = request.allowed_tokens ? (*request.allowed_tokens)[s] : candidates_for(request, s);
            std::vector<std::pair<std::string, double>> logits;
            std::set<std::string> seen;
            for (const auto& raw : candidates) {
                if (!seen.insert(raw).second) continue;
                const auto h = hash_combine(hash_combine(text_hash, s), hash_bytes(text::lower(raw), config_.seed));
                logits.emplace_back(raw, config_.sharpness * unit_from_hash(h));
            }
            double max_logit = -INFINITY;
            for (const auto& [t, l] : logits) max_logit = std::max(max_logit, l);
            double z = 0.0;
            for (const auto& [t, l] : logits) z += std::exp(l - max_logit);
            std::vector<TokenProb> list;
            list.reserve(logits.size());
            for (const auto& [t, l] : logits) list.push_back({t, std::exp(l - max_logit) / z});
            std::sort(list.begin(), list.end(), [](const TokenProb& a, const TokenProb& b) {
                return a.prob != b.prob ? a.prob > b.prob : a.token < b.token;
            });
            out.slots.push_back(std::move(list));
        }
        return out;
    }

    FillResponse fill(const FillRequest& request) const override {
        auto out = distribution(request);
        for (auto& list : out.slots)
            if (list.size() > static_cast<std::size_t>(request.top_k)) list.resize(static_cast<std::size_t>(request.top_k));
        return out;
    }

    std::vector<Embedding> embed(const std::vector<std::string>& texts) const override {
        std::vector<Embedding> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

    bool in_vocabulary(std::string_view token) const override { return vocab_.count(text::lower(token)) > 0; }
    std::size_t dim() const override { return config_.embedding_dim; }
    std::string model_id() const override { return "mock-seed-" + std::to_string(config_.seed); }

    Embedding embed_one(std::string_view raw) const {
        const auto norm = text::normalize(raw);
        std::map<std::string, int> grams;
        if (norm.size() < 3) {
            grams[norm] = 1;
        } else {
            for (std::size_t i = 0; i + 3 <= norm.size(); ++i) ++grams[norm.substr(i, 3)];
        }
        const auto dim = config_.embedding_dim;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
        Embedding v(dim, 0.0);
        for (const auto& [g, count] : grams) {
            Rng rng(hash_bytes(g, config_.seed ^ 0x5bd1e995ULL));
            for (std::size_t j = 0; j < dim; ++j) v[j] += count * scale * rng.normal();
        }
        return v;
    }

private:
    static std::vector<std::string> merged(const std::vector<std::string>& a, const std::vector<std::string>& b) {
        std::vector<std::string> out;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }

    const std::vector<std::string>& candidates_for(const FillRequest& r, std::size_t slot) const {
        if (r.slot_types.size() != count_masks(r.text)) return all_candidates_;
        return r.slot_types[slot] == SlotType::Drug ? drug_candidates_ : cell_candidates_;
    }

    MockGatewayConfig config_;
    std::vector<std::string> drug_candidates_;
    std::vector<std::string> cell_candidates_;
    std::vector<std::string> all_candidates_;
    std::set<std::string> vocab_;
};

}  // namespace litaug

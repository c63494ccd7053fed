#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/kmedoids.hpp"
#include "litaug/prompt_template.hpp"

namespace litaug {

struct FillRequest {
    std::string text;  // contains one "[MASK]" per slot
    std::optional<std::vector<std::vector<std::string>>> allowed_tokens;
    int top_k = 1;
    // In-process hint for backends that type their candidate lists. Never
    // sent over the wire.
    std::vector<SlotType> slot_types;
};

struct TokenProb {
    std::string token;
    double prob;

    bool operator==(const TokenProb&) const = default;
};

struct FillResponse {
    std::vector<std::vector<TokenProb>> slots;

    bool operator==(const FillResponse&) const = default;
};

inline std::size_t count_masks(std::string_view text) {
    std::size_t n = 0;
    for (auto pos = text.find(kGatewayMask); pos != std::string_view::npos; pos = text.find(kGatewayMask, pos + kGatewayMask.size()))
        ++n;
    return n;
}

inline void validate_request(const FillRequest& r) {
    const auto masks = count_masks(r.text);
    if (masks == 0) throw ValidationError("fill request has no [MASK] marker");
    if (r.top_k < 1) throw ValidationError("fill request top_k must be >= 1");
    if (r.allowed_tokens) {
        if (r.allowed_tokens->size() != masks)
            throw ValidationError("fill request: allowed_tokens has " + std::to_string(r.allowed_tokens->size()) +
                                  " lists for " + std::to_string(masks) + " masks");
        for (const auto& a : *r.allowed_tokens)
            if (a.empty()) throw ValidationError("fill request: empty allowed_tokens list");
    }
}

// Checks a response against the wire contract: one ranked list per mask,
// probabilities descending within (0, 1], per-slot mass <= 1 + 1e-6, and
// tokens drawn from allowed_tokens when a restriction was requested.
inline void validate_response(const FillRequest& request, const FillResponse& response) {
    const auto masks = count_masks(request.text);
    if (response.slots.size() != masks)
        throw ProtocolError("fill response has " + std::to_string(response.slots.size()) + " slot lists for " +
                            std::to_string(masks) + " masks");
    for (std::size_t s = 0; s < masks; ++s) {
        const auto& list = response.slots[s];
        if (list.empty()) throw ProtocolError("fill response slot " + std::to_string(s) + " is empty");
        if (list.size() > static_cast<std::size_t>(request.top_k))
            throw ProtocolError("fill response slot " + std::to_string(s) + " exceeds top_k");
        double sum = 0.0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const double p = list[i].prob;
            if (!std::isfinite(p) || p <= 0.0 || p > 1.0)
                throw ProtocolError("fill response probability out of (0,1] in slot " + std::to_string(s));
            if (i > 0 && p > list[i - 1].prob) throw ProtocolError("fill response probabilities not descending in slot " + std::to_string(s));
            sum += p;
            if (request.allowed_tokens) {
                const auto& allowed = (*request.allowed_tokens)[s];
                if (std::find(allowed.begin(), allowed.end(), list[i].token) == allowed.end())
                    throw ProtocolError("fill response token '" + list[i].token + "' not in allowed_tokens");
            }
        }
        if (sum > 1.0 + 1e-6) throw ProtocolError("fill response probabilities sum above 1 in slot " + std::to_string(s));
    }
}

// Keeps the allowed tokens of each slot list, renormalizes the kept mass to
// one and truncates to top_k. A slot with no allowed token comes back empty.
inline FillResponse restrict_response(const FillResponse& wide, const std::vector<std::vector<std::string>>& allowed, int top_k) {
    if (allowed.size() != wide.slots.size()) throw ValidationError("restrict_response: allowed list count does not match slot count");
    FillResponse out;
    for (std::size_t s = 0; s < wide.slots.size(); ++s) {
        std::vector<TokenProb> kept;
        double mass = 0.0;
        for (const auto& tp : wide.slots[s]) {
            if (std::find(allowed[s].begin(), allowed[s].end(), tp.token) != allowed[s].end()) {
                kept.push_back(tp);
                mass += tp.prob;
            }
        }
        for (auto& tp : kept) tp.prob /= mass;
        if (kept.size() > static_cast<std::size_t>(top_k)) kept.resize(static_cast<std::size_t>(top_k));
        out.slots.push_back(std::move(kept));
    }
    return out;
}

inline nlohmann::json to_wire(const FillRequest& r) {
    nlohmann::json j{{"text", r.text}, {"top_k", r.top_k}};
    j["allowed_tokens"] = r.allowed_tokens ? nlohmann::json(*r.allowed_tokens) : nlohmann::json(nullptr);
    return j;
}

inline FillRequest fill_request_from_wire(const nlohmann::json& j) {
    FillRequest r;
    r.text = j.at("text").get<std::string>();
    r.top_k = j.value("top_k", 1);
    if (j.contains("allowed_tokens") && !j["allowed_tokens"].is_null())
        r.allowed_tokens = j["allowed_tokens"].get<std::vector<std::vector<std::string>>>();
    return r;
}

inline nlohmann::json to_wire(const FillResponse& r) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& list : r.slots) {
        nlohmann::json l = nlohmann::json::array();
        for (const auto& tp : list) l.push_back({{"token", tp.token}, {"prob", tp.prob}});
        slots.push_back(std::move(l));
    }
    return {{"slots", std::move(slots)}};
}

inline FillResponse fill_response_from_wire(const nlohmann::json& j) {
    FillResponse r;
    try {
        for (const auto& list : j.at("slots")) {
            std::vector<TokenProb> l;
            for (const auto& tp : list) l.push_back({tp.at("token").get<std::string>(), tp.at("prob").get<double>()});
            r.slots.push_back(std::move(l));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("malformed fill response: ") + e.what());
    }
    return r;
}

// Mask filling and sentence embedding behind one boundary. Implementations
// must be safe to call concurrently.
class Gateway {
public:
    virtual ~Gateway() = default;
    virtual FillResponse fill(const FillRequest& request) const = 0;
    virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) const = 0;
    // Whether a surface form is a single token of the model's vocabulary.
    virtual bool in_vocabulary(std::string_view token) const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string model_id() const = 0;
};

}  // namespace litaug

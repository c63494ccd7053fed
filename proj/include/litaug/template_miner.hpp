#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/gateway.hpp"
#include "litaug/kmedoids.hpp"
#include "litaug/mining.hpp"
#include "litaug/prompt_template.hpp"

namespace litaug {

// Embeds the gateway rendering of each template (slots become [MASK]).
inline std::vector<Embedding> embed_batch(const Gateway& gateway, const std::vector<PromptTemplate>& templates) {
    if (templates.empty()) return {};
    std::vector<std::string> texts;
    texts.reserve(templates.size());
    for (const auto& t : templates) texts.push_back(t.render_masked());
    auto vectors = gateway.embed(texts);
    if (vectors.size() != templates.size()) throw ProtocolError("gateway returned a different number of embeddings");
    for (const auto& v : vectors) {
        if (v.size() != gateway.dim())
            throw ProtocolError("embedding dim " + std::to_string(v.size()) + " != gateway dim " + std::to_string(gateway.dim()));
        for (double x : v)
            if (!std::isfinite(x)) throw ProtocolError("embedding contains a non-finite value");
    }
    return vectors;
}

// Keeps the first template for each distinct masked text.
inline std::vector<PromptTemplate> dedup_templates(std::vector<PromptTemplate> templates) {
    std::set<std::string> seen;
    std::vector<PromptTemplate> out;
    for (auto& t : templates)
        if (seen.insert(t.text()).second) out.push_back(std::move(t));
    return out;
}

inline std::vector<PromptTemplate> extract_templates(const Clustering& clustering, const std::vector<PromptTemplate>& templates,
                                                     int iteration) {
    std::vector<PromptTemplate> out;
    out.reserve(clustering.medoids.size());
    for (std::size_t c = 0; c < clustering.medoids.size(); ++c) {
        const auto idx = clustering.medoids[c];
        if (idx >= templates.size()) throw ValidationError("medoid index out of range of the template list");
        auto t = templates[idx];
        t.source.kind = TemplateSource::Kind::Medoid;
        t.source.iteration = iteration;
        t.source.cluster_id = static_cast<int>(c);
        t.id = "it" + std::to_string(iteration) + "-c" + std::to_string(c) + ":" + t.source.doc_id + "#" +
               std::to_string(t.source.sentence_index);
        out.push_back(std::move(t));
    }
    return out;
}

struct TemplateMiningOptions {
    std::size_t k = 10;
    std::size_t max_swaps = 1000;
    DistanceMetric metric = DistanceMetric::Euclidean;
    unsigned jobs = 1;
};

struct TemplateMiningResult {
    std::vector<PromptTemplate> candidates;  // deduplicated masked sentences
    std::vector<Embedding> embeddings;       // one per candidate
    Clustering clustering;
    std::vector<PromptTemplate> templates;  // medoids
};

// mask -> dedup -> embed -> k-medoids -> medoid templates. k is capped at the
// number of distinct candidates; no candidates yields no templates.
inline TemplateMiningResult mine_templates(const Gateway& gateway, const std::vector<MinedSentence>& mined, int iteration,
                                           const TemplateMiningOptions& options = {}) {
    TemplateMiningResult r;
    std::vector<PromptTemplate> masked;
    masked.reserve(mined.size());
    for (const auto& m : mined) masked.push_back(mask_sentence(m));
    r.candidates = dedup_templates(std::move(masked));
    if (r.candidates.empty()) return r;
    r.embeddings = embed_batch(gateway, r.candidates);
    const auto k = std::min(options.k, r.candidates.size());
    r.clustering = k_medoids(DistanceMatrix::from_points(r.embeddings, options.metric, options.jobs), {k, options.max_swaps});
    r.templates = extract_templates(r.clustering, r.candidates, iteration);
    return r;
}

}  // namespace litaug

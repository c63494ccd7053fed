#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "litaug/error.hpp"

namespace litaug {

struct ScoredExample {
    int label;     // 0 or 1
    double score;  // finite
};

namespace detail {

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline void check_scores(const std::vector<ScoredExample>& xs) {
    for (const auto& x : xs) {
        if (!std::isfinite(x.score)) throw ValidationError("metric input contains a non-finite score");
        if (x.label != 0 && x.label != 1) throw ValidationError("metric input label must be 0 or 1");
    }
}

inline std::pair<std::size_t, std::size_t> class_counts(const std::vector<ScoredExample>& xs) {
    std::size_t pos = 0;
    for (const auto& x : xs) pos += (x.label == 1);
    return {pos, xs.size() - pos};
}

inline void require_both_classes(const std::vector<ScoredExample>& xs, const char* metric) {
    const auto [pos, neg] = class_counts(xs);
    if (pos == 0 || neg == 0) throw ValidationError(std::string(metric) + " is undefined without both positive and negative examples");
}

inline Confusion confusion(const std::vector<ScoredExample>& xs, double threshold) {
    Confusion c;
    for (const auto& x : xs) {
        const bool pred = x.score > threshold;
        if (pred && x.label == 1) ++c.tp;
        else if (pred) ++c.fp;
        else if (x.label == 1) ++c.fn;
        else ++c.tn;
    }
    return c;
}

// Indices sorted by descending score.
inline std::vector<std::size_t> by_score_desc(const std::vector<ScoredExample>& xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a].score > xs[b].score; });
    return idx;
}

}  // namespace detail

// Step-wise average precision; equal scores form one threshold step.
inline double auprc(const std::vector<ScoredExample>& xs) {
    detail::check_scores(xs);
    detail::require_both_classes(xs, "AUPRC");
    const auto [pos, neg] = detail::class_counts(xs);
    const auto idx = detail::by_score_desc(xs);
    double ap = 0.0, prev_recall = 0.0;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && xs[idx[j]].score == xs[idx[i]].score) {
            (xs[idx[j]].label == 1 ? tp : fp)++;
            ++j;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    (void)neg;
    return ap;
}

// Best F1 over the thresholds "score >= s" for every distinct s, plus the
// empty prediction.
inline double max_f1(const std::vector<ScoredExample>& xs) {
    detail::check_scores(xs);
    const auto [pos, neg] = detail::class_counts(xs);
    (void)neg;
    if (pos == 0) return 0.0;
    const auto idx = detail::by_score_desc(xs);
    double best = 0.0;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && xs[idx[j]].score == xs[idx[i]].score) {
            (xs[idx[j]].label == 1 ? tp : fp)++;
            ++j;
        }
        const auto fn = pos - tp;
        best = std::max(best, 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn));
        i = j;
    }
    return best;
}

inline double bacc(const std::vector<ScoredExample>& xs, double threshold = 0.5) {
    detail::check_scores(xs);
    detail::require_both_classes(xs, "BACC");
    const auto c = detail::confusion(xs, threshold);
    const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return 0.5 * (tpr + tnr);
}

inline double cohens_kappa(const std::vector<ScoredExample>& xs, double threshold = 0.5) {
    detail::check_scores(xs);
    detail::require_both_classes(xs, "kappa");
    const auto c = detail::confusion(xs, threshold);
    const double n = static_cast<double>(xs.size());
    const double po = static_cast<double>(c.tp + c.tn) / n;
    const double pe = (static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) +
                       static_cast<double>(c.tn + c.fn) * static_cast<double>(c.tn + c.fp)) /
                      (n * n);
    if (pe >= 1.0) return 0.0;
    return (po - pe) / (1.0 - pe);
}

struct MetricSet {
    double auprc = 0.0;
    double max_f1 = 0.0;
    double bacc = 0.0;
    double kappa = 0.0;
};

inline MetricSet all_metrics(const std::vector<ScoredExample>& xs) {
    return {auprc(xs), max_f1(xs), bacc(xs), cohens_kappa(xs)};
}

}  // namespace litaug

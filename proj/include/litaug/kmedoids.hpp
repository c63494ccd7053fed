#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "litaug/error.hpp"
#include "litaug/parallel.hpp"

namespace litaug {

using Embedding = std::vector<double>;

enum class DistanceMetric { Euclidean, Cosine };

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// 1 - cos(a, b); zero vectors are treated as orthogonal to everything.
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return std::max(0.0, 1.0 - dot / (std::sqrt(na) * std::sqrt(nb)));
}

class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    static DistanceMatrix from_points(const std::vector<Embedding>& points, DistanceMetric metric = DistanceMetric::Euclidean,
                                      unsigned jobs = 1) {
        const std::size_t n = points.size();
        for (const auto& p : points) {
            if (!points.empty() && p.size() != points.front().size())
                throw ValidationError("embedding dimensions differ within one clustering run");
            for (double v : p)
                if (!std::isfinite(v)) throw ValidationError("embedding contains a non-finite value");
        }
        DistanceMatrix m(n);
        parallel_for(n, jobs, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = metric == DistanceMetric::Euclidean ? euclidean(points[i], points[j])
                                                                     : cosine_distance(points[i], points[j]);
                m.d_[i * n + j] = d;
                m.d_[j * n + i] = d;
            }
        });
        return m;
    }

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    double& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> medoids;     // ascending dataset indices; cluster id = position
    std::vector<std::size_t> assignment;  // point -> cluster id
    double total_cost = 0.0;
    double build_cost = 0.0;
    std::vector<double> cost_trace;  // BUILD cost, then cost after every accepted swap
    std::size_t swaps = 0;
};

struct KMedoidsOptions {
    std::size_t k = 10;
    std::size_t max_swaps = 1000;
};

namespace detail {

struct NearestTable {
    std::vector<double> nearest;
    std::vector<double> second;
    std::vector<std::size_t> owner;  // dataset index of the nearest medoid
};

inline NearestTable nearest_table(const DistanceMatrix& d, const std::vector<std::size_t>& medoids) {
    const auto n = d.size();
    NearestTable t{std::vector<double>(n, std::numeric_limits<double>::infinity()),
                   std::vector<double>(n, std::numeric_limits<double>::infinity()), std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
        for (auto m : medoids) {
            const double dist = d(j, m);
            if (dist < t.nearest[j]) {
                t.second[j] = t.nearest[j];
                t.nearest[j] = dist;
                t.owner[j] = m;
            } else if (dist < t.second[j]) {
                t.second[j] = dist;
            }
        }
    }
    return t;
}

inline double total_cost(const DistanceMatrix& d, const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (double v : nearest_table(d, medoids).nearest) cost += v;
    return cost;
}

}  // namespace detail

// PAM: greedy BUILD, then best-improvement SWAP until no single
// medoid/non-medoid exchange lowers the cost or max_swaps is reached.
// Every tie resolves to the lowest index, so the result is deterministic.
inline Clustering k_medoids(const DistanceMatrix& d, const KMedoidsOptions& options = {}) {
    const std::size_t n = d.size();
    const std::size_t k = options.k;
    if (k == 0) throw ValidationError("k-medoids: k must be at least 1");
    if (k > n) throw ValidationError("k-medoids: k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(n) + ")");

    std::vector<char> is_medoid(n, 0);
    std::vector<std::size_t> medoids;

    // BUILD: first the point with minimal total distance, then repeatedly the
    // point with the largest cost reduction.
    {
        std::size_t best = 0;
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += d(i, j);
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        std::vector<double> nearest(n);
        for (std::size_t j = 0; j < n; ++j) nearest[j] = d(j, best);
        while (medoids.size() < k) {
            std::size_t pick = n;
            double best_gain = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (is_medoid[i]) continue;
                double gain = 0.0;
                for (std::size_t j = 0; j < n; ++j) gain += std::max(nearest[j] - d(i, j), 0.0);
                if (gain > best_gain) {
                    best_gain = gain;
                    pick = i;
                }
            }
            medoids.push_back(pick);
            is_medoid[pick] = 1;
            for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, pick));
        }
    }

    Clustering c;
    c.k = k;
    c.build_cost = detail::total_cost(d, medoids);
    c.cost_trace.push_back(c.build_cost);
    double cost = c.build_cost;

    // SWAP
    while (c.swaps < options.max_swaps) {
        std::sort(medoids.begin(), medoids.end());
        const auto table = detail::nearest_table(d, medoids);
        double best_delta = 0.0;
        std::size_t best_slot = k, best_candidate = n;
        for (std::size_t slot = 0; slot < k; ++slot) {
            const auto m = medoids[slot];
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                double delta = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double dh = d(j, h);
                    if (table.owner[j] == m) delta += std::min(dh, table.second[j]) - table.nearest[j];
                    else if (dh < table.nearest[j]) delta += dh - table.nearest[j];
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_slot = slot;
                    best_candidate = h;
                }
            }
        }
        if (best_slot == k || best_delta >= -1e-12 * (1.0 + cost)) break;
        is_medoid[medoids[best_slot]] = 0;
        is_medoid[best_candidate] = 1;
        medoids[best_slot] = best_candidate;
        ++c.swaps;
        cost = detail::total_cost(d, medoids);
        c.cost_trace.push_back(cost);
    }

    std::sort(medoids.begin(), medoids.end());
    c.medoids = medoids;
    c.assignment.assign(n, 0);
    c.total_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t slot = 0; slot < k; ++slot) {
            if (medoids[slot] == j) {
                best = slot;
                best_d = 0.0;
                break;
            }
            const double dist = d(j, medoids[slot]);
            if (dist < best_d) {
                best_d = dist;
                best = slot;
            }
        }
        c.assignment[j] = best;
        c.total_cost += best_d;
    }
    return c;
}

inline Clustering k_medoids(const std::vector<Embedding>& points, const KMedoidsOptions& options = {},
                            DistanceMetric metric = DistanceMetric::Euclidean, unsigned jobs = 1) {
    return k_medoids(DistanceMatrix::from_points(points, metric, jobs), options);
}

}  // namespace litaug

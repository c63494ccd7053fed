#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "litaug/augmentor.hpp"
#include "litaug/error.hpp"
#include "litaug/metrics.hpp"
#include "litaug/model.hpp"
#include "litaug/parallel.hpp"
#include "litaug/random.hpp"
#include "litaug/splits.hpp"

namespace litaug {

// A training example resolved to table indices (a < b).
struct IndexedRow {
    std::size_t a, b, c;
    double label;
    double weight;
    bool synthetic;
};

struct LossOptions {
    bool literal_synthetic_sign = false;  // +w*log(p) for synthetic rows
};

inline constexpr double kProbClamp = 1e-7;

using Gradients = std::vector<Eigen::MatrixXd>;

struct LossAndGradients {
    double loss = 0.0;
    Gradients grads;
    std::vector<double> probabilities;
};

inline IndexedRow index_row(const SynergyModel& m, const TrainingRow& r, bool use_instance_weights = true) {
    auto a = m.drug_index(r.triplet.drug_a), b = m.drug_index(r.triplet.drug_b);
    auto c = m.cell_index(r.triplet.cell);
    if (!a || !b || !c) throw ValidationError("training triplet " + r.triplet.drug_a + "," + r.triplet.drug_b + "," + r.triplet.cell +
                                              " names an entity missing from the model");
    if (*a == *b) throw ValidationError("training triplet repeats a drug");
    if (*a > *b) std::swap(a, b);
    return {*a, *b, *c, static_cast<double>(r.synthetic ? 1 : r.label), r.synthetic && use_instance_weights ? r.weight : 1.0, r.synthetic};
}

namespace detail {

inline void check_indices(const SynergyModel& m, const IndexedRow& r) {
    if (r.a >= m.drug_names().size() || r.b >= m.drug_names().size() || r.c >= m.cell_names().size())
        throw ValidationError("triplet index out of range");
    if (r.a == r.b) throw ValidationError("triplet repeats a drug index");
}

inline double leaky(double v, double slope) { return v > 0 ? v : slope * v; }

inline double term(const IndexedRow& r, double p, const LossOptions& opt) {
    const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    if (r.synthetic) return (opt.literal_synthetic_sign ? 1.0 : -1.0) * r.weight * std::log(q);
    return -r.weight * (r.label * std::log(q) + (1.0 - r.label) * std::log(1.0 - q));
}

}  // namespace detail

// Probability for table indices; drugs are ordered by index before lookup.
inline double forward(const SynergyModel& m, std::size_t a, std::size_t b, std::size_t c) {
    detail::check_indices(m, {a, b, c, 0, 1, false});
    if (a > b) std::swap(a, b);
    const auto d = static_cast<Eigen::Index>(m.config().d_emb);
    Eigen::VectorXd h(3 * d);
    h.segment(0, d) = m.params()[0].row(static_cast<Eigen::Index>(a)).transpose();
    h.segment(d, d) = m.params()[0].row(static_cast<Eigen::Index>(b)).transpose();
    h.segment(2 * d, d) = m.params()[1].row(static_cast<Eigen::Index>(c)).transpose();
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        Eigen::VectorXd z = m.weight(l) * h + m.bias(l).col(0);
        if (l + 1 < m.layer_count()) z = z.unaryExpr([&](double v) { return detail::leaky(v, m.config().leaky_slope); });
        h = std::move(z);
    }
    return SynergyModel::sigmoid(h(0));
}

// Summed loss: BCE on original rows plus w*(-log p) on synthetic rows.
// Probabilities are clamped for the reported value only; the gradient on
// the output logit is weight*(p - y) (sign-flipped for literal synthetic).
inline LossAndGradients loss_and_gradients(const SynergyModel& m, const std::vector<IndexedRow>& batch, const LossOptions& opt = {}) {
    LossAndGradients out;
    out.grads.reserve(m.params().size());
    for (const auto& p : m.params()) out.grads.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    if (batch.empty()) return out;
    for (const auto& r : batch) detail::check_indices(m, r);

    const auto d = static_cast<Eigen::Index>(m.config().d_emb);
    const auto n = static_cast<Eigen::Index>(batch.size());
    const double slope = m.config().leaky_slope;
    const auto& drug = m.params()[0];
    const auto& cell = m.params()[1];

    Eigen::MatrixXd x(3 * d, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = batch[static_cast<std::size_t>(i)];
        x.block(0, i, d, 1) = drug.row(static_cast<Eigen::Index>(r.a)).transpose();
        x.block(d, i, d, 1) = drug.row(static_cast<Eigen::Index>(r.b)).transpose();
        x.block(2 * d, i, d, 1) = cell.row(static_cast<Eigen::Index>(r.c)).transpose();
    }

    const std::size_t layers = m.layer_count();
    std::vector<Eigen::MatrixXd> pre(layers), act(layers + 1);
    act[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
        pre[l] = (m.weight(l) * act[l]).colwise() + m.bias(l).col(0);
        act[l + 1] = l + 1 < layers ? pre[l].unaryExpr([&](double v) { return detail::leaky(v, slope); }) : pre[l];
    }

    Eigen::MatrixXd delta(1, n);
    out.probabilities.resize(batch.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = batch[static_cast<std::size_t>(i)];
        const double p = SynergyModel::sigmoid(pre[layers - 1](0, i));
        out.probabilities[static_cast<std::size_t>(i)] = p;
        out.loss += detail::term(r, p, opt);
        const double sign = (r.synthetic && opt.literal_synthetic_sign) ? -1.0 : 1.0;
        delta(0, i) = sign * r.weight * (p - r.label);
    }

    for (std::size_t l = layers; l-- > 0;) {
        out.grads[2 + 2 * l] = delta * act[l].transpose();
        out.grads[3 + 2 * l] = delta.rowwise().sum();
        Eigen::MatrixXd back = m.weight(l).transpose() * delta;
        if (l > 0) back = back.cwiseProduct(pre[l - 1].unaryExpr([&](double v) { return v > 0 ? 1.0 : slope; }));
        delta = std::move(back);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = batch[static_cast<std::size_t>(i)];
        out.grads[0].row(static_cast<Eigen::Index>(r.a)) += delta.block(0, i, d, 1).transpose();
        out.grads[0].row(static_cast<Eigen::Index>(r.b)) += delta.block(d, i, d, 1).transpose();
        out.grads[1].row(static_cast<Eigen::Index>(r.c)) += delta.block(2 * d, i, d, 1).transpose();
    }
    return out;
}

inline double batch_loss(const SynergyModel& m, const std::vector<IndexedRow>& batch, const LossOptions& opt = {}) {
    double loss = 0.0;
    for (const auto& r : batch) loss += detail::term(r, forward(m, r.a, r.b, r.c), opt);
    return loss;
}

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Eigen::MatrixXd> m, v;
    long t = 0;

    explicit AdamState(const std::vector<Eigen::MatrixXd>& params = {}) {
        for (const auto& p : params) {
            m.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
            v.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
        }
    }
};

inline void adam_step(std::vector<Eigen::MatrixXd>& params, const Gradients& grads, AdamState& state, double lr, const AdamConfig& cfg = {}) {
    if (grads.size() != params.size() || state.m.size() != params.size()) throw ValidationError("adam_step: parameter/gradient count mismatch");
    ++state.t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols()) throw ValidationError("adam_step: shape mismatch");
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i].cwiseProduct(grads[i]);
        params[i].array() -= lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + cfg.eps);
    }
}

enum class WarmupMode { LearningRate, AugmentDelay };

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    double learning_rate = 0.001;
    std::size_t d_emb = 64;
    std::size_t hidden_dim = 128;
    std::size_t hidden_layers = 2;
    double leaky_slope = 0.01;
    std::size_t warmup_epochs = 0;
    WarmupMode warmup_mode = WarmupMode::LearningRate;
    bool use_instance_weights = true;
    bool literal_synthetic_sign = false;
    AdamConfig adam;
    std::uint64_t seed = 7;

    ModelConfig model_config() const { return {d_emb, std::vector<std::size_t>(hidden_layers, hidden_dim), leaky_slope}; }
};

inline void validate(const TrainConfig& c) {
    if (c.batch_size == 0) throw ValidationError("batch_size must be positive");
    if (!(c.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
    if (c.d_emb == 0 || c.hidden_dim == 0) throw ValidationError("d_emb and hidden_dim must be positive");
}

// Model over every entity named by the rows plus any extra names.
inline SynergyModel make_model(const std::vector<TrainingRow>& rows, const TrainConfig& config, const std::set<std::string>& extra_drugs = {},
                               const std::set<std::string>& extra_cells = {}) {
    std::set<std::string> drugs = extra_drugs, cells = extra_cells;
    for (const auto& r : rows) {
        drugs.insert(r.triplet.drug_a);
        drugs.insert(r.triplet.drug_b);
        cells.insert(r.triplet.cell);
    }
    return SynergyModel(drugs, cells, config.model_config(), derive_seed(config.seed, {10}));
}

// Mini-batch Adam over seeded per-epoch shuffles. Returns the summed loss of
// every epoch (evaluated on each batch before its update).
inline std::vector<double> train_model(SynergyModel& model, const std::vector<TrainingRow>& rows, const TrainConfig& config) {
    validate(config);
    if (rows.empty()) throw ValidationError("training set is empty");
    std::vector<IndexedRow> indexed;
    indexed.reserve(rows.size());
    for (const auto& r : rows) indexed.push_back(index_row(model, r, config.use_instance_weights));

    const LossOptions opt{config.literal_synthetic_sign};
    AdamState adam(model.params());
    const std::size_t steps_per_epoch = (rows.size() + config.batch_size - 1) / config.batch_size;
    const double warm_steps = static_cast<double>(config.warmup_epochs * steps_per_epoch);
    std::vector<double> trace;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order;
        const bool originals_only = config.warmup_mode == WarmupMode::AugmentDelay && epoch < config.warmup_epochs;
        for (std::size_t i = 0; i < indexed.size(); ++i)
            if (!originals_only || !indexed[i].synthetic) order.push_back(i);
        Rng(derive_seed(config.seed, {3, epoch})).shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::vector<IndexedRow> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) batch.push_back(indexed[order[i]]);
            auto lg = loss_and_gradients(model, batch, opt);
            if (!std::isfinite(lg.loss))
                throw ValidationError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch starting at " + std::to_string(start) +
                                      "; lower the learning rate");
            epoch_loss += lg.loss;
            double lr = config.learning_rate;
            if (config.warmup_mode == WarmupMode::LearningRate && warm_steps > 0)
                lr *= std::min(1.0, static_cast<double>(adam.t + 1) / warm_steps);
            adam_step(model.params(), lg.grads, adam, lr, config.adam);
        }
        trace.push_back(epoch_loss);
    }
    return trace;
}

struct TrainResult {
    SynergyModel model;
    std::vector<double> loss_trace;
};

inline TrainResult train(const std::vector<TrainingRow>& rows, const TrainConfig& config, const std::set<std::string>& extra_drugs = {},
                         const std::set<std::string>& extra_cells = {}) {
    TrainResult r{make_model(rows, config, extra_drugs, extra_cells), {}};
    r.loss_trace = train_model(r.model, rows, config);
    return r;
}

inline std::vector<ScoredExample> score(const SynergyModel& m, const std::vector<LabeledTriplet>& rows) {
    std::vector<ScoredExample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.label, m.forward(r.triplet)});
    return out;
}

// Training rows for one fold: the train originals plus every synthetic
// triplet that does not coincide with a held-out row.
inline std::vector<TrainingRow> fold_training_rows(const std::vector<LabeledTriplet>& original, const std::vector<std::size_t>& train_idx,
                                                   const std::vector<std::size_t>& test_idx, const std::vector<WeightedTriplet>& synthetic) {
    std::vector<LabeledTriplet> train;
    for (auto i : train_idx) train.push_back(original[i]);
    std::set<Triplet> held;
    for (auto i : test_idx) held.insert(original[i].triplet);
    std::vector<WeightedTriplet> syn;
    for (const auto& w : synthetic)
        if (!held.count(w.triplet)) syn.push_back(w);
    return merge_datasets(train, syn);
}

// Trains on the fold rows and scores the held-out originals.
inline MetricSet evaluate_fold(const std::vector<LabeledTriplet>& original, const Fold& fold, const std::vector<WeightedTriplet>& synthetic,
                               const TrainConfig& config) {
    const auto rows = fold_training_rows(original, fold.train, fold.test, synthetic);
    std::vector<LabeledTriplet> test;
    for (auto i : fold.test) test.push_back(original[i]);
    const auto result = train(rows, config, drugs_of(test), cells_of(test));
    return all_metrics(score(result.model, test));
}

struct GridPoint {
    double learning_rate;
    std::size_t hidden_dim;
    std::size_t warmup_epochs;
    bool use_instance_weights;

    bool operator==(const GridPoint&) const = default;
};

struct Grid {
    std::vector<double> learning_rates{0.01, 0.005, 0.001};
    std::vector<std::size_t> hidden_dims{128, 256, 512};
    std::vector<std::size_t> warmup_epochs{0, 5, 10, 20, 30, 40};
    std::vector<bool> instance_weights{false, true};
};

// Points in tie-break order: lower lr, smaller hidden, smaller warm-up,
// weights off first.
inline std::vector<GridPoint> enumerate_grid(const Grid& g) {
    auto lrs = g.learning_rates;
    auto hs = g.hidden_dims;
    auto ws = g.warmup_epochs;
    auto iw = g.instance_weights;
    std::sort(lrs.begin(), lrs.end());
    std::sort(hs.begin(), hs.end());
    std::sort(ws.begin(), ws.end());
    std::sort(iw.begin(), iw.end());
    lrs.erase(std::unique(lrs.begin(), lrs.end()), lrs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    iw.erase(std::unique(iw.begin(), iw.end()), iw.end());
    std::vector<GridPoint> out;
    for (double lr : lrs)
        for (auto h : hs)
            for (auto w : ws)
                for (bool i : iw) out.push_back({lr, h, w, i});
    return out;
}

inline TrainConfig apply(TrainConfig base, const GridPoint& p) {
    base.learning_rate = p.learning_rate;
    base.hidden_dim = p.hidden_dim;
    base.warmup_epochs = p.warmup_epochs;
    base.use_instance_weights = p.use_instance_weights;
    return base;
}

using GridScorer = std::function<double(const GridPoint&)>;

struct GridSearchResult {
    GridPoint best;
    double best_score;
    std::vector<std::pair<GridPoint, double>> scores;
};

inline GridSearchResult grid_search(const Grid& grid, const GridScorer& scorer, unsigned jobs = 1) {
    const auto points = enumerate_grid(grid);
    if (points.empty()) throw ValidationError("hyperparameter grid is empty");
    std::vector<double> scores(points.size());
    parallel_for(points.size(), jobs, [&](std::size_t i) { scores[i] = scorer(points[i]); });
    GridSearchResult r{points[0], scores[0], {}};
    for (std::size_t i = 0; i < points.size(); ++i) {
        r.scores.emplace_back(points[i], scores[i]);
        if (scores[i] > r.best_score) r.best = points[i], r.best_score = scores[i];
    }
    return r;
}

// Mean validation AUPRC over stratified folds of the original rows.
inline GridScorer cv_auprc_scorer(const std::vector<LabeledTriplet>& original, const std::vector<WeightedTriplet>& synthetic, TrainConfig base,
                                  std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ValidationError("grid search needs at least 2 folds");
    auto splits = stratified_kfold(original, folds, seed);
    return [=](const GridPoint& p) {
        const auto cfg = apply(base, p);
        double total = 0.0;
        for (const auto& f : splits) total += evaluate_fold(original, f, synthetic, cfg).auprc;
        return total / static_cast<double>(splits.size());
    };
}

}  // namespace litaug

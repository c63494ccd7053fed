#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/random.hpp"
#include "litaug/triplet.hpp"

namespace litaug {

struct ModelConfig {
    std::size_t d_emb = 64;
    std::vector<std::size_t> hidden{128, 128};
    double leaky_slope = 0.01;
};

// Parameters live in one list: [drug table, cell table, W1, b1, W2, b2, ...].
// Tables are (entities x d_emb); layer weights are (out x in); biases (out x 1).
class SynergyModel {
public:
    SynergyModel() = default;

    // Embedding rows are seeded per entity name, so a name absent from the
    // tables gets the same row it would have had if it were present.
    SynergyModel(const std::set<std::string>& drugs, const std::set<std::string>& cells, ModelConfig config, std::uint64_t seed)
        : config_(std::move(config)), seed_(seed) {
        if (config_.d_emb == 0) throw ValidationError("d_emb must be positive");
        for (auto h : config_.hidden)
            if (h == 0) throw ValidationError("hidden layer widths must be positive");
        for (const auto& d : drugs) drug_index_.emplace(d, drug_names_.size()), drug_names_.push_back(d);
        for (const auto& c : cells) cell_index_.emplace(c, cell_names_.size()), cell_names_.push_back(c);

        params_.push_back(Eigen::MatrixXd(drug_names_.size(), config_.d_emb));
        params_.push_back(Eigen::MatrixXd(cell_names_.size(), config_.d_emb));
        for (std::size_t i = 0; i < drug_names_.size(); ++i) params_[0].row(static_cast<Eigen::Index>(i)) = init_row(0, drug_names_[i]);
        for (std::size_t i = 0; i < cell_names_.size(); ++i) params_[1].row(static_cast<Eigen::Index>(i)) = init_row(1, cell_names_[i]);

        std::size_t in = 3 * config_.d_emb;
        std::vector<std::size_t> widths = config_.hidden;
        widths.push_back(1);
        Rng rng(derive_seed(seed_, {2}));
        for (auto out : widths) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            Eigen::MatrixXd w(out, in), b(out, 1);
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
            for (Eigen::Index r = 0; r < b.rows(); ++r) b(r, 0) = rng.uniform(-bound, bound);
            params_.push_back(std::move(w));
            params_.push_back(std::move(b));
            in = out;
        }
    }

    const ModelConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    std::vector<Eigen::MatrixXd>& params() { return params_; }
    const std::vector<Eigen::MatrixXd>& params() const { return params_; }
    std::size_t layer_count() const { return (params_.size() - 2) / 2; }
    const Eigen::MatrixXd& weight(std::size_t l) const { return params_[2 + 2 * l]; }
    const Eigen::MatrixXd& bias(std::size_t l) const { return params_[3 + 2 * l]; }
    const std::vector<std::string>& drug_names() const { return drug_names_; }
    const std::vector<std::string>& cell_names() const { return cell_names_; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
        return n;
    }

    // Input vector [drug_a | drug_b | cell] with the drugs in name order.
    Eigen::VectorXd input(const Triplet& t) const {
        const auto& [first, second] = std::minmax(t.drug_a, t.drug_b);
        const auto d = static_cast<Eigen::Index>(config_.d_emb);
        Eigen::VectorXd x(3 * d);
        x.segment(0, d) = drug_row(first);
        x.segment(d, d) = drug_row(second);
        x.segment(2 * d, d) = cell_row(t.cell);
        return x;
    }

    double logit(const Triplet& t) const {
        Eigen::VectorXd h = input(t);
        for (std::size_t l = 0; l < layer_count(); ++l) {
            Eigen::VectorXd a = weight(l) * h + bias(l).col(0);
            if (l + 1 < layer_count()) a = a.unaryExpr([this](double v) { return v > 0 ? v : config_.leaky_slope * v; });
            h = std::move(a);
        }
        return h(0);
    }

    double forward(const Triplet& t) const { return sigmoid(logit(t)); }

    int predict(const Triplet& t) const { return forward(t) > 0.5 ? 1 : 0; }

    std::optional<std::size_t> drug_index(const std::string& name) const {
        auto it = drug_index_.find(name);
        return it == drug_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    }
    std::optional<std::size_t> cell_index(const std::string& name) const {
        auto it = cell_index_.find(name);
        return it == cell_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    }

    static double sigmoid(double z) {
        if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
        const double e = std::exp(z);
        return e / (1.0 + e);
    }

    nlohmann::json to_json() const {
        nlohmann::json params = nlohmann::json::array();
        for (const auto& p : params_) {
            std::vector<double> data;
            data.reserve(static_cast<std::size_t>(p.size()));
            for (Eigen::Index r = 0; r < p.rows(); ++r)
                for (Eigen::Index c = 0; c < p.cols(); ++c) data.push_back(p(r, c));
            params.push_back({{"rows", p.rows()}, {"cols", p.cols()}, {"data", std::move(data)}});
        }
        return {{"format", 1},
                {"seed", seed_},
                {"config", {{"d_emb", config_.d_emb}, {"hidden", config_.hidden}, {"leaky_slope", config_.leaky_slope}}},
                {"drugs", drug_names_},
                {"cells", cell_names_},
                {"params", std::move(params)}};
    }

    static SynergyModel from_json(const nlohmann::json& j) {
        try {
            if (j.at("format").get<int>() != 1) throw ValidationError("unsupported model format");
            SynergyModel m;
            m.seed_ = j.at("seed").get<std::uint64_t>();
            m.config_.d_emb = j.at("config").at("d_emb").get<std::size_t>();
            m.config_.hidden = j.at("config").at("hidden").get<std::vector<std::size_t>>();
            m.config_.leaky_slope = j.at("config").at("leaky_slope").get<double>();
            m.drug_names_ = j.at("drugs").get<std::vector<std::string>>();
            m.cell_names_ = j.at("cells").get<std::vector<std::string>>();
            for (std::size_t i = 0; i < m.drug_names_.size(); ++i) m.drug_index_.emplace(m.drug_names_[i], i);
            for (std::size_t i = 0; i < m.cell_names_.size(); ++i) m.cell_index_.emplace(m.cell_names_[i], i);
            for (const auto& p : j.at("params")) {
                const auto rows = p.at("rows").get<Eigen::Index>(), cols = p.at("cols").get<Eigen::Index>();
                const auto data = p.at("data").get<std::vector<double>>();
                if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ValidationError("model matrix size does not match its dims");
                Eigen::MatrixXd mat(rows, cols);
                for (Eigen::Index r = 0; r < rows; ++r)
                    for (Eigen::Index c = 0; c < cols; ++c) mat(r, c) = data[static_cast<std::size_t>(r * cols + c)];
                m.params_.push_back(std::move(mat));
            }
            const auto d = static_cast<Eigen::Index>(m.config_.d_emb);
            if (m.params_.size() != 2 * (m.config_.hidden.size() + 2) || m.params_[0].cols() != d || m.params_[1].cols() != d ||
                m.params_[0].rows() != static_cast<Eigen::Index>(m.drug_names_.size()) ||
                m.params_[1].rows() != static_cast<Eigen::Index>(m.cell_names_.size()) || m.params_[2].cols() != 3 * d)
                throw ValidationError("model parameter shapes are inconsistent");
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed model file: ") + e.what());
        }
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write model: " + path);
        out << to_json().dump() << '\n';
    }

    static SynergyModel load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read model: " + path);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ValidationError("model file is not JSON: " + path);
        return from_json(j);
    }

private:
    Eigen::RowVectorXd init_row(std::uint64_t table, const std::string& name) const {
        Rng rng(derive_seed(seed_, {table, hash_bytes(name)}));
        const double bound = 1.0 / std::sqrt(static_cast<double>(config_.d_emb));
        Eigen::RowVectorXd r(config_.d_emb);
        for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = rng.uniform(-bound, bound);
        return r;
    }

    Eigen::RowVectorXd drug_row(const std::string& name) const {
        auto it = drug_index_.find(name);
        return it == drug_index_.end() ? init_row(0, name) : Eigen::RowVectorXd(params_[0].row(static_cast<Eigen::Index>(it->second)));
    }
    Eigen::RowVectorXd cell_row(const std::string& name) const {
        auto it = cell_index_.find(name);
        return it == cell_index_.end() ? init_row(1, name) : Eigen::RowVectorXd(params_[1].row(static_cast<Eigen::Index>(it->second)));
    }

    ModelConfig config_;
    std::uint64_t seed_ = 0;
    std::vector<std::string> drug_names_, cell_names_;
    std::map<std::string, std::size_t> drug_index_, cell_index_;
    std::vector<Eigen::MatrixXd> params_;
};

}  // namespace litaug

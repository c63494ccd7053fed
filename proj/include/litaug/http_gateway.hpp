#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
// <resolv.h> defines _res as a macro, which breaks Eigen headers included later.
#ifdef _res
#undef _res
#endif
#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/gateway.hpp"
#include "litaug/text.hpp"

namespace litaug {

struct HttpGatewayConfig {
    std::string base_url = "http://127.0.0.1:8000";
    double timeout_seconds = 30.0;
    int max_retries = 3;
    std::size_t batch_size = 32;
    std::size_t embedding_dim = 768;
    std::string vocab_file;  // one token per line (BERT vocab.txt); optional
    int client_top_k = 200;  // candidate depth for client-side restriction
};

struct Capabilities {
    std::size_t vocab_size = 0;
    std::size_t dim = 0;
    bool server_side_restriction = false;
    std::string model_id;
};

// Client for the JSON wire protocol (/fill, /embed, /capabilities). Each
// call opens its own connection, so one instance can be shared by threads.
class HttpGateway final : public Gateway {
public:
    explicit HttpGateway(HttpGatewayConfig config) : config_(std::move(config)) {
        if (config_.timeout_seconds <= 0) throw ValidationError("gateway timeout must be positive");
        if (config_.embedding_dim == 0) throw ValidationError("gateway embedding_dim must be positive");
        if (config_.batch_size == 0) throw ValidationError("gateway batch_size must be positive");
        if (!config_.vocab_file.empty()) {
            std::ifstream in(config_.vocab_file);
            if (!in) throw IoError("cannot read gateway vocabulary: " + config_.vocab_file);
            std::string line;
            while (std::getline(in, line)) {
                auto t = text::trim(line);
                if (!t.empty()) vocab_.insert(text::lower(t));
            }
        }
        const auto caps = call("GET", "/capabilities", nullptr);
        try {
            caps_.vocab_size = caps.at("vocab_size").get<std::size_t>();
            caps_.dim = caps.at("dim").get<std::size_t>();
            caps_.server_side_restriction = caps.at("server_side_restriction").get<bool>();
            caps_.model_id = caps.at("model_id").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("malformed /capabilities response: ") + e.what());
        }
        if (caps_.dim != config_.embedding_dim)
            throw ProtocolError("gateway reports dim " + std::to_string(caps_.dim) + ", configured " +
                                std::to_string(config_.embedding_dim));
    }

    const Capabilities& capabilities() const { return caps_; }

    FillResponse fill(const FillRequest& request) const override {
        validate_request(request);
        if (!request.allowed_tokens || caps_.server_side_restriction) {
            auto resp = fill_response_from_wire(call("POST", "/fill", to_wire(request)));
            validate_response(request, resp);
            return resp;
        }
        // Client-side restriction: fetch a deep unrestricted ranking, keep the
        // allowed tokens and renormalize. Allowed tokens outside the fetched
        // depth are invisible; a slot with none left comes back empty.
        FillRequest wide = request;
        wide.allowed_tokens.reset();
        wide.top_k = std::max(request.top_k, config_.client_top_k);
        auto resp = fill_response_from_wire(call("POST", "/fill", to_wire(wide)));
        validate_response(wide, resp);
        return restrict_response(resp, *request.allowed_tokens, request.top_k);
    }

    std::vector<Embedding> embed(const std::vector<std::string>& texts) const override {
        std::vector<Embedding> out;
        out.reserve(texts.size());
        for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
            const auto stop = std::min(texts.size(), start + config_.batch_size);
            nlohmann::json body{{"texts", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                                   texts.begin() + static_cast<std::ptrdiff_t>(stop))},
                                {"pooling", "mean"}};
            const auto resp = call("POST", "/embed", body);
            try {
                const auto dim = resp.at("dim").get<std::size_t>();
                if (dim != config_.embedding_dim)
                    throw ProtocolError("embed response dim " + std::to_string(dim) + " != configured " +
                                        std::to_string(config_.embedding_dim));
                const auto& vectors = resp.at("vectors");
                if (vectors.size() != stop - start) throw ProtocolError("embed response vector count mismatch");
                for (const auto& v : vectors) {
                    auto vec = v.get<Embedding>();
                    if (vec.size() != dim) throw ProtocolError("embed response vector length != dim");
                    for (double x : vec)
                        if (!std::isfinite(x)) throw ProtocolError("embed response contains a non-finite value");
                    out.push_back(std::move(vec));
                }
            } catch (const nlohmann::json::exception& e) {
                throw ProtocolError(std::string("malformed /embed response: ") + e.what());
            }
        }
        return out;
    }

    // Without a vocabulary file every whitespace-free surface counts as one token.
    bool in_vocabulary(std::string_view token) const override {
        if (vocab_.empty()) return !token.empty() && !text::contains_whitespace(token);
        return vocab_.count(text::lower(token)) > 0;
    }

    std::size_t dim() const override { return config_.embedding_dim; }
    std::string model_id() const override { return caps_.model_id; }

private:
    nlohmann::json call(const std::string& method, const std::string& path, const nlohmann::json& body) const {
        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << std::min(attempt, 6)));
            httplib::Client client(config_.base_url);
            const auto secs = std::chrono::duration<double>(config_.timeout_seconds);
            client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
            client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
            client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
            auto res = method == "GET" ? client.Get(path) : client.Post(path, body.dump(), "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw ProtocolError(method + " " + path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
            auto j = nlohmann::json::parse(res->body, nullptr, false);
            if (j.is_discarded()) throw ProtocolError(method + " " + path + " returned invalid JSON");
            return j;
        }
        throw GatewayError(method + " " + config_.base_url + path + " failed after " +
                           std::to_string(config_.max_retries + 1) + " attempt(s): " + last_error);
    }

    HttpGatewayConfig config_;
    Capabilities caps_;
    std::set<std::string> vocab_;
};

}  // namespace litaug

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "litaug/error.hpp"

namespace litaug {

inline constexpr const char* kVersion = "0.1.0";

inline std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error(ErrorKind::Io, "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

inline std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file for digest: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(data);
}

// Per-run record written next to the outputs as manifest.json.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv, nlohmann::json config, std::uint64_t seed)
        : command_(std::move(command)), argv_(std::move(argv)), config_(std::move(config)), seed_(seed),
          start_(std::chrono::steady_clock::now()) {}

    void add_input(const std::filesystem::path& p) {
        if (!p.empty()) inputs_[std::filesystem::weakly_canonical(p).string()] = file_sha256(p);
    }
    void add_output(const std::filesystem::path& p) { outputs_[std::filesystem::weakly_canonical(p).string()] = file_sha256(p); }
    void time(const std::string& stage, double seconds) { timings_[stage] = seconds; }
    void note(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

    const std::map<std::string, std::string>& inputs() const { return inputs_; }
    const std::map<std::string, std::string>& outputs() const { return outputs_; }

    nlohmann::json to_json() const {
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        auto timings = timings_;
        timings["total"] = total;
        return {{"command", command_}, {"argv", argv_},     {"config", config_},   {"seed", seed_},   {"inputs", inputs_},
                {"outputs", outputs_}, {"timings", timings}, {"version", kVersion}, {"extra", extra_}};
    }

    void write(const std::filesystem::path& dir) const {
        std::ofstream out(dir / "manifest.json");
        if (!out) throw IoError("cannot write manifest in " + dir.string());
        out << to_json().dump(2) << '\n';
    }

private:
    std::string command_;
    std::vector<std::string> argv_;
    nlohmann::json config_;
    std::uint64_t seed_;
    std::chrono::steady_clock::time_point start_;
    std::map<std::string, std::string> inputs_, outputs_;
    std::map<std::string, double> timings_;
    nlohmann::json extra_ = nlohmann::json::object();
};

}  // namespace litaug

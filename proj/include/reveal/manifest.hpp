#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace reveal::manifest {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

// Accumulates everything needed to replay a run: command, config, seeds,
// input/output digests, and timings. Written atomically at run end.
class RunManifest {
public:
    RunManifest(std::string command, nlohmann::json config);

    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void set(const std::string& key, nlohmann::json value);

    // Finalizes timings and writes <out_dir>/manifest.json via a temp file
    // and rename.
    void write(const std::string& out_dir);

    const nlohmann::json& config() const { return config_; }
    std::string config_hash() const;

private:
    nlohmann::json config_;
    nlohmann::json extras_;
    std::string command_;
    std::vector<std::pair<std::string, std::string>> inputs_;  // path, digest
    std::vector<std::pair<std::string, std::string>> outputs_;
    std::chrono::steady_clock::time_point start_;
};

// Writes content to path through a temporary file plus rename.
void atomic_write(const std::string& path, const std::string& content);

} // namespace reveal::manifest

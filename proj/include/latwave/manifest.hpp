#pragma once

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latwave/errors.hpp"

namespace latwave {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Reproducibility record for one CLI run. Everything that shaped the outputs
/// (config text, seed, tolerances, grid choices) goes in; wall-clock is for
/// humans and excluded from determinism comparisons.
class RunManifest {
public:
    RunManifest(std::string command, std::string config_text, std::uint64_t seed)
        : start_(std::chrono::steady_clock::now()) {
        j_["command"] = std::move(command);
        j_["config"] = std::move(config_text);
        j_["seed"] = seed;
        j_["version"] = kLibraryVersion;
        j_["artifacts"] = nlohmann::json::array();
    }

    void set(const std::string& key, double v) { j_["parameters"][key] = v; }
    void set(const std::string& key, const std::string& v) { j_["parameters"][key] = v; }
    void set_int(const std::string& key, long v) { j_["parameters"][key] = v; }

    void add_artifact(const std::string& path) { j_["artifacts"].push_back(path); }

    void write(const std::string& path) {
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
        j_["wall_clock_seconds"] = elapsed.count();
        std::ofstream out(path);
        if (!out) throw Error("cannot open manifest for writing: " + path);
        out << j_.dump(2) << '\n';
    }

private:
    nlohmann::json j_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace latwave

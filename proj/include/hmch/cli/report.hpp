#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace hmch::cli {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// Written by every command, on success and on failure.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::vector<std::string> outputs;
    bool passed = false;
    int exit_code = 0;
    std::string summary;
    json extra = json::object();

    json to_json() const {
        json j;
        j["command"] = command;
        j["config"] = config;
        j["version"] = kVersion;
        j["timestamp"] = utc_timestamp();
        j["outputs"] = outputs;
        j["passed"] = passed;
        j["exit_code"] = exit_code;
        j["summary"] = summary;
        for (const auto& [k, v] : extra.items()) j[k] = v;
        return j;
    }

    static std::string utc_timestamp() {
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }
};

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path, std::ios::binary);
    os << j.dump(2) << '\n';
}

/// Finite doubles as numbers, anything else as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace hmch::cli

#pragma once

// Run manifest: the command, the fully resolved parameter set, the master
// seed and the hash of every output file. Re-running the command with the
// recorded parameters must reproduce the hashes (same build).

#include "gravdiff/errors.hpp"
#include "gravdiff/hash.hpp"
#include "gravdiff/io/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gravdiff::io {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string hash_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read '" + path + "' for hashing");
    Fnv1a h;
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        h.update(std::string_view(buf, static_cast<std::size_t>(f.gcount())));
    }
    return h.hex();
}

struct OutputRecord {
    std::string path;  // relative to the manifest directory
    std::string hash;
};

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t master_seed = 0;
    std::string seed_source = "none";  // "flag", "config", "entropy" or "none"
    std::string tool_version = kToolVersion;
    std::string config_hash;
    std::vector<OutputRecord> outputs;

    json to_json() const {
        json outs = json::array();
        for (const auto& o : outputs) outs.push_back(json{{"path", o.path}, {"hash", o.hash}});
        return json{{"command", command},         {"params", params},
                    {"master_seed", master_seed}, {"seed_source", seed_source},
                    {"tool_version", tool_version}, {"config_hash", config_hash},
                    {"outputs", outs}};
    }

    static RunManifest from_json(const json& j) {
        RunManifest m;
        try {
            m.command = j.at("command").get<std::string>();
            m.params = j.at("params").get<std::map<std::string, std::string>>();
            m.master_seed = j.at("master_seed").get<std::uint64_t>();
            m.seed_source = j.at("seed_source").get<std::string>();
            m.tool_version = j.at("tool_version").get<std::string>();
            m.config_hash = j.at("config_hash").get<std::string>();
            for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("path"), o.at("hash")});
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
        return m;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write manifest '" + path + "'");
        f << to_json().dump(2) << '\n';
        if (!f) throw IoError("write to '" + path + "' failed");
    }

    static RunManifest load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open manifest '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        json j;
        try {
            j = json::parse(ss.str());
        } catch (const json::exception& e) {
            throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
};

} // namespace gravdiff::io

#pragma once

// Flat key = value configuration. '#' and ';' start comments; a "[name]"
// line prefixes the following keys with "name.". Every lookup is recorded so
// the resolved parameter set (including defaults) can go into the manifest.

#include "gravdiff/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace gravdiff::io {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Shortest decimal representation that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;  // 0: set programmatically
    };

    Config() = default;

    static Config parse(std::string_view text, std::string source = "<config>") {
        Config cfg;
        cfg.source_ = std::move(source);
        std::istringstream in{std::string(text)};
        std::string raw;
        std::string section;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find_first_of("#;");
            const std::string line = trim(std::string_view(raw).substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') cfg.fail(line_no, "unterminated section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) cfg.fail(line_no, "expected 'key = value'");
            std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key.empty()) cfg.fail(line_no, "empty key");
            if (!section.empty()) key = section + "." + key;
            if (cfg.entries_.count(key)) cfg.fail(line_no, "duplicate key '" + key + "'");
            cfg.entries_[key] = Entry{value, line_no};
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    /// Overrides (or adds) a key, e.g. from a command-line flag.
    void set(const std::string& key, std::string value) { entries_[key] = Entry{std::move(value), 0}; }

    /// Adds a key only when absent (preset values).
    void set_default(const std::string& key, std::string value) {
        if (!entries_.count(key)) entries_[key] = Entry{std::move(value), 0};
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double get_double(const std::string& key) const { return parse_double(key, require(key)); }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) {
            resolved_[key] = format_double(fallback);
            return fallback;
        }
        return get_double(key);
    }

    std::uint64_t get_uint(const std::string& key) const { return parse_uint(key, require(key)); }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) {
            resolved_[key] = std::to_string(fallback);
            return fallback;
        }
        return get_uint(key);
    }

    std::string get_string(const std::string& key) const { return require(key).value; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) {
            resolved_[key] = fallback;
            return fallback;
        }
        return get_string(key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const std::string v = get_string(key, fallback ? "true" : "false");
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw ConfigError(where(key) + "key '" + key + "': expected a boolean, got '" + v + "'");
    }

    /// Every key read so far with the value used.
    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    const std::map<std::string, Entry>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

    /// Keys present in the file but never read.
    std::vector<std::string> unused_keys() const {
        std::vector<std::string> out;
        for (const auto& [k, e] : entries_)
            if (!resolved_.count(k)) out.push_back(k);
        return out;
    }

private:
    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
    }

    std::string where(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end() || it->second.line == 0) return "";
        return source_ + ":" + std::to_string(it->second.line) + ": ";
    }

    const Entry& require(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
        resolved_[key] = it->second.value;
        return it->second;
    }

    double parse_double(const std::string& key, const Entry& e) const {
        double v = 0.0;
        const char* b = e.value.data();
        const char* end = b + e.value.size();
        const auto res = std::from_chars(b, end, v);
        if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
            throw ConfigError(where(key) + "key '" + key + "': expected a finite number, got '" + e.value + "'");
        return v;
    }

    std::uint64_t parse_uint(const std::string& key, const Entry& e) const {
        std::uint64_t v = 0;
        const char* b = e.value.data();
        const char* end = b + e.value.size();
        const auto res = std::from_chars(b, end, v);
        if (res.ec != std::errc() || res.ptr != end)
            throw ConfigError(where(key) + "key '" + key + "': expected a non-negative integer, got '" + e.value + "'");
        return v;
    }

    std::string source_ = "<config>";
    std::map<std::string, Entry> entries_;
    mutable std::map<std::string, std::string> resolved_;
};

} // namespace gravdiff::io

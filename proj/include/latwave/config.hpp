#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "latwave/errors.hpp"

namespace latwave {

struct SchemaError : Error { using Error::Error; };

/// Key-value config with [section] headers, `key = value` lines, and `#` comments.
class Config {
public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path);
    }

    static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        cfg.text_ = text;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw SchemaError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw SchemaError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw SchemaError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[section + "." + key] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get_str(const std::string& section, const std::string& key) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw SchemaError("missing config key [" + section + "] " + key);
        return it->second;
    }

    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
        auto it = values_.find(section + "." + key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_num(const std::string& section, const std::string& key) const {
        return to_num(section, key, get_str(section, key));
    }

    double get_num(const std::string& section, const std::string& key, double fallback) const {
        auto it = values_.find(section + "." + key);
        return it == values_.end() ? fallback : to_num(section, key, it->second);
    }

    long get_int(const std::string& section, const std::string& key, long fallback) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        return static_cast<long>(to_num(section, key, it->second));
    }

    const std::string& raw_text() const { return text_; }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    static double to_num(const std::string& section, const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw SchemaError("config key [" + section + "] " + key + ": not a number: " + v);
        }
    }
    std::map<std::string, std::string> values_;
    std::string text_;
};

}  // namespace latwave

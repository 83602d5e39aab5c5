#include "qnls/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qnls {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

const std::string& RunConfig::str(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing config field: " + key);
    return it->second;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double RunConfig::num(const std::string& key) const {
    const std::string& s = str(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("config field " + key + " is not a number: " + s);
    return v;
}

double RunConfig::num(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

int RunConfig::integer(const std::string& key) const {
    const double v = num(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config field " + key + " is not an integer");
    return i;
}

int RunConfig::integer(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::uint64_t h = 1469598103934665603ull;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv[key] = val;
    }
    // canonical content hash over the sorted key=value pairs
    for (const auto& [k, v] : cfg.kv) {
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    }
    cfg.hash = h;
    cfg.kind = cfg.str("experiment", "");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

} // namespace qnls

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qnls/errors.hpp"

namespace qnls {

/// Plain-text key=value configuration with section-prefixed keys
/// (e.g. grid.n=512, evolve.dt=1e-3). '#' starts a comment.
struct RunConfig {
    std::string kind;                         // experiment kind
    std::map<std::string, std::string> kv;
    std::string out_dir = ".";
    std::uint64_t hash = 0;                   // content hash (provenance)

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    const std::string& str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Dispatch one experiment. Returns 0 iff every asserted check passed.
int run_subcommand(const RunConfig& cfg);

} // namespace qnls

#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "types.hpp"

namespace dsvp {

// Node configuration, normally read from a key = value file:
//
//   node_id = nodeB
//   listen = 127.0.0.1:7021
//   connect_timeout_ms = 1000
//   retry_attempts = 3
//   retry_backoff_ms = 50
//   retry_backoff_mult = 2.0
//   watchdog_grace_ms = 250
//   default_block = 128
//   # place NAME = ENDPOINT [RESOURCE] [exclusive]
//   place workerC = 127.0.0.1:7022 cpu
//   place counter = local ctr exclusive
//
// '#' starts a comment. An ENDPOINT of "local" names a place on this
// node. DSVP_LISTEN overrides the listen endpoint; DSVP_LOG sets the
// log level (debug|info|warn|error|off).
struct NodeConfig {
    struct PlaceEntry {
        std::string name;
        std::string endpoint; // "local" or host:port
        std::string resource;
        bool exclusive = false;
    };

    std::string node_id = "node";
    std::string listen; // empty: client only
    std::vector<PlaceEntry> places;
    int connect_timeout_ms = 1000;
    int retry_attempts = 3;
    int retry_backoff_ms = 50;
    double retry_backoff_mult = 2.0;
    int watchdog_grace_ms = 250;
    int default_block = 128;

    static NodeConfig from_string(const std::string &text);
    static NodeConfig from_file(const std::string &path);

    void apply_env() {
        if (const char *ep = std::getenv("DSVP_LISTEN")) listen = ep;
    }
};

namespace detail {

inline std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline int parse_int(const std::string &key, const std::string &v) {
    try {
        size_t used = 0;
        int n = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception &) {
        fail(Errc::config, key + ": expected an integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string &key, const std::string &v) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception &) {
        fail(Errc::config, key + ": expected a number, got '" + v + "'");
    }
}

} // namespace detail

inline NodeConfig NodeConfig::from_string(const std::string &text) {
    NodeConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(Errc::config, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));

        if (key.rfind("place ", 0) == 0 || key.rfind("place\t", 0) == 0) {
            PlaceEntry p;
            p.name = detail::trim(key.substr(6));
            if (p.name.empty())
                fail(Errc::config, "line " + std::to_string(lineno) + ": place needs a name");
            if (p.name == kLocalNode)
                fail(Errc::config, "the place name 'local' is reserved");
            auto toks = detail::split_ws(value);
            if (toks.empty())
                fail(Errc::config, "line " + std::to_string(lineno) + ": place needs an endpoint");
            p.endpoint = toks[0];
            size_t i = 1;
            if (i < toks.size() && toks[i] != "exclusive") p.resource = toks[i++];
            if (i < toks.size() && toks[i] == "exclusive") {
                p.exclusive = true;
                ++i;
            }
            if (i != toks.size())
                fail(Errc::config, "line " + std::to_string(lineno) + ": trailing tokens");
            for (const auto &other : cfg.places)
                if (other.name == p.name) fail(Errc::config, "duplicate place '" + p.name + "'");
            cfg.places.push_back(std::move(p));
        } else if (key == "node_id") {
            cfg.node_id = value;
        } else if (key == "listen") {
            cfg.listen = value;
        } else if (key == "connect_timeout_ms") {
            cfg.connect_timeout_ms = detail::parse_int(key, value);
        } else if (key == "retry_attempts") {
            cfg.retry_attempts = detail::parse_int(key, value);
        } else if (key == "retry_backoff_ms") {
            cfg.retry_backoff_ms = detail::parse_int(key, value);
        } else if (key == "retry_backoff_mult") {
            cfg.retry_backoff_mult = detail::parse_double(key, value);
        } else if (key == "watchdog_grace_ms") {
            cfg.watchdog_grace_ms = detail::parse_int(key, value);
        } else if (key == "default_block") {
            cfg.default_block = detail::parse_int(key, value);
        } else {
            fail(Errc::config, "unknown key '" + key + "'");
        }
    }
    if (cfg.retry_attempts < 1) fail(Errc::config, "retry_attempts must be at least 1");
    if (cfg.default_block < 1) fail(Errc::config, "default_block must be at least 1");
    return cfg;
}

inline NodeConfig NodeConfig::from_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) fail(Errc::config, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

} // namespace dsvp

#include "singulax/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace singulax {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char ch : k) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' ||
                        ch == '-';
        if (!ok) return false;
    }
    return true;
}

/// Strip a comment that starts at '#' preceded by start-of-line or whitespace.
std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
            return line.substr(0, i);
    }
    return line;
}

std::string format_double_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected `key = value`, got `" + body + "`");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": invalid key `" + key +
                              "`");
        if (cfg.entries_.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key `" + key +
                              "`");
        cfg.entries_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("invalid key `" + key + "`");
    entries_[key] = value;
}

void KeyValueConfig::apply_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value, got `" + assignment + "`");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string KeyValueConfig::raw_or_throw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing key `" + key + "`");
    return it->second;
}

void KeyValueConfig::note(const std::string& key, const std::string& value) const {
    recognized_.insert(key);
    resolved_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    const std::string v = it == entries_.end() ? fallback : it->second;
    note(key, v);
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    double v = fallback;
    if (it != entries_.end()) {
        const char* start = it->second.c_str();
        char* end = nullptr;
        v = std::strtod(start, &end);
        if (end == start || *end != '\0')
            throw ConfigError("key `" + key + "`: expected a number, got `" + it->second + "`");
    }
    note(key, format_double_value(v));
    return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = entries_.find(key);
    long long v = fallback;
    if (it != entries_.end()) {
        const char* start = it->second.c_str();
        char* end = nullptr;
        v = std::strtoll(start, &end, 10);
        if (end == start || *end != '\0')
            throw ConfigError("key `" + key + "`: expected an integer, got `" + it->second + "`");
    }
    note(key, std::to_string(v));
    return v;
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
    const long long v = get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError("key `" + key + "`: expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    bool v = fallback;
    if (it != entries_.end()) {
        const std::string& s = it->second;
        if (s == "true" || s == "1" || s == "yes" || s == "on")
            v = true;
        else if (s == "false" || s == "0" || s == "no" || s == "off")
            v = false;
        else
            throw ConfigError("key `" + key + "`: expected a boolean, got `" + s + "`");
    }
    note(key, v ? "true" : "false");
    return v;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    std::vector<double> v;
    if (it == entries_.end()) {
        v = fallback;
    } else {
        std::istringstream in(it->second);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (tok.empty())
                throw ConfigError("key `" + key + "`: empty list element");
            const char* start = tok.c_str();
            char* end = nullptr;
            const double x = std::strtod(start, &end);
            if (end == start || *end != '\0')
                throw ConfigError("key `" + key + "`: expected a number, got `" + tok + "`");
            v.push_back(x);
        }
        if (v.empty()) throw ConfigError("key `" + key + "`: empty list");
    }
    std::string disp;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) disp += ",";
        disp += format_double_value(v[i]);
    }
    note(key, disp);
    return v;
}

void KeyValueConfig::reject_unknown() const {
    std::string bad;
    for (const auto& [k, v] : entries_) {
        if (!recognized_.count(k)) {
            if (!bad.empty()) bad += ", ";
            bad += k;
        }
    }
    if (!bad.empty()) throw ConfigError("unrecognized config keys: " + bad);
}

void check_admissible(double p, double m, double exponent, const std::string& context) {
    if (!(p >= 1.0)) throw ConfigError(context + ": requires p >= 1, got p = " +
                                       format_double_value(p));
    const double ratio = (m + 1.0) / p;
    if (!(ratio > 0.0) || !(ratio < exponent + 1.0))
        throw ConfigError(context + ": requires 0 < (m+1)/p < exponent+1; got (m+1)/p = " +
                          format_double_value(ratio) + " with exponent+1 = " +
                          format_double_value(exponent + 1.0));
}

}  // namespace singulax

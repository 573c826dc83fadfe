/// @file config.hpp
/// @brief Key-value experiment configuration with typed, defaulted access.
///
/// Format: one `key = value` pair per line; `#` starts a comment (full line
/// or after whitespace); blank lines ignored.  Keys match
/// [A-Za-z0-9_.-]+ and may appear at most once.  CLI overrides are applied
/// with the same `key=value` syntax.
///
/// Every typed getter records the key it consumed and the value it resolved
/// (default included), so reports can be fully self-describing and unknown
/// keys can be rejected after an experiment has declared its schema through
/// its reads.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace singulax {

/// Configuration or hypothesis-validation failure; carries a field-level
/// message and maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_text(const std::string& text);
    static KeyValueConfig from_file(const std::filesystem::path& path);

    /// Insert or replace (CLI --set overrides use this).
    void set(const std::string& key, const std::string& value);

    /// Parse a single "key=value" assignment and apply it.
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list of doubles.
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Keys present in the config but never consumed by a getter; call after
    /// all reads to reject typos with a field-level error.
    void reject_unknown() const;

    /// Every key a getter resolved, with the value actually used (defaults
    /// included), as display strings.  Deterministic (sorted by key).
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

private:
    std::string raw_or_throw(const std::string& key) const;
    void note(const std::string& key, const std::string& value) const;

    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> recognized_;
    mutable std::map<std::string, std::string> resolved_;
};

/// Throws ConfigError unless 0 < (m + 1)/p < exponent + 1; `context` names
/// the experiment or operator for the message.
void check_admissible(double p, double m, double exponent, const std::string& context);

}  // namespace singulax

/// @file report.hpp
/// @brief Byte-deterministic JSON/CSV report emission.
///
/// The writer keeps object fields in insertion order, formats every floating
/// value with %.17g under the C locale, and contains no clocks, hostnames, or
/// other run-dependent state, so identical inputs produce identical bytes.
/// Non-finite values (JSON cannot express them) are emitted as the quoted
/// strings "inf", "-inf", "nan".
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace singulax {

/// %.17g with non-finite mapping (unquoted; callers add quotes as needed).
std::string format_g17(double v);

/// Ordered JSON document node.
class JsonNode {
public:
    static JsonNode object();
    static JsonNode array();
    static JsonNode number(double v);
    static JsonNode integer(long long v);
    static JsonNode boolean(bool v);
    static JsonNode text(std::string v);

    /// Object insertion (keeps order); returns *this for chaining.
    JsonNode& field(const std::string& key, JsonNode v);
    JsonNode& field(const std::string& key, double v) { return field(key, number(v)); }
    JsonNode& field(const std::string& key, long long v) { return field(key, integer(v)); }
    JsonNode& field(const std::string& key, std::size_t v) {
        return field(key, integer(static_cast<long long>(v)));
    }
    JsonNode& field(const std::string& key, int v) { return field(key, integer(v)); }
    JsonNode& field(const std::string& key, bool v) { return field(key, boolean(v)); }
    JsonNode& field(const std::string& key, const char* v) { return field(key, text(v)); }
    JsonNode& field(const std::string& key, const std::string& v) { return field(key, text(v)); }

    /// Array append; returns *this.
    JsonNode& push(JsonNode v);

    std::string dump(int indent = 2) const;

private:
    enum class Kind { object, array, number, integer, boolean, text };

    void render(std::string& out, int indent, int depth) const;

    Kind kind_ = Kind::object;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::string str_;
    std::vector<std::string> keys_;    ///< object field names
    std::vector<JsonNode> children_;   ///< object/array payload
};

struct MetricRow {
    std::string name;
    double value = 0.0;
    std::string threshold;  ///< human-readable acceptance condition
    bool pass = false;
};

/// Accumulates a self-describing experiment report and writes report.json.
class ReportBuilder {
public:
    explicit ReportBuilder(std::string experiment);

    void params(const std::map<std::string, std::string>& resolved);
    void metric(const std::string& name, double value, const std::string& threshold, bool pass);
    void note(const std::string& text);
    void artifact(const std::string& filename);
    /// Free-form extra block appended under "sections".
    void section(const std::string& name, JsonNode node);

    bool all_pass() const;
    const std::vector<MetricRow>& metrics() const { return metrics_; }

    std::string to_json() const;
    /// Writes <out_dir>/report.json (creating directories) and returns its path.
    std::filesystem::path write(const std::filesystem::path& out_dir) const;

private:
    std::string experiment_;
    std::map<std::string, std::string> params_;
    std::vector<MetricRow> metrics_;
    std::vector<std::string> notes_;
    std::vector<std::string> artifacts_;
    std::vector<std::string> section_names_;
    std::vector<JsonNode> sections_;
};

/// Deterministic CSV table (LF line endings, %.17g numbers).
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);

    void row(std::span<const double> values);
    void row_mixed(const std::vector<std::string>& cells);

    const std::string& text() const { return text_; }
    /// Writes <out_dir>/<filename> and returns the path.
    std::filesystem::path write(const std::filesystem::path& out_dir,
                                const std::string& filename) const;

private:
    std::size_t n_cols_ = 0;
    std::string text_;
};

}  // namespace singulax

#include "singulax/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace singulax {

std::string format_g17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (ch < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += static_cast<char>(ch);
                }
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

JsonNode JsonNode::object() {
    JsonNode n;
    n.kind_ = Kind::object;
    return n;
}
JsonNode JsonNode::array() {
    JsonNode n;
    n.kind_ = Kind::array;
    return n;
}
JsonNode JsonNode::number(double v) {
    JsonNode n;
    n.kind_ = Kind::number;
    n.num_ = v;
    return n;
}
JsonNode JsonNode::integer(long long v) {
    JsonNode n;
    n.kind_ = Kind::integer;
    n.int_ = v;
    return n;
}
JsonNode JsonNode::boolean(bool v) {
    JsonNode n;
    n.kind_ = Kind::boolean;
    n.bool_ = v;
    return n;
}
JsonNode JsonNode::text(std::string v) {
    JsonNode n;
    n.kind_ = Kind::text;
    n.str_ = std::move(v);
    return n;
}

JsonNode& JsonNode::field(const std::string& key, JsonNode v) {
    if (kind_ != Kind::object) throw std::logic_error("JsonNode::field on a non-object");
    keys_.push_back(key);
    children_.push_back(std::move(v));
    return *this;
}

JsonNode& JsonNode::push(JsonNode v) {
    if (kind_ != Kind::array) throw std::logic_error("JsonNode::push on a non-array");
    children_.push_back(std::move(v));
    return *this;
}

void JsonNode::render(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (kind_) {
        case Kind::number: {
            const std::string s = format_g17(num_);
            if (std::isfinite(num_))
                out += s;
            else
                out += "\"" + s + "\"";
            break;
        }
        case Kind::integer: {
            char buf[24];
            std::snprintf(buf, sizeof buf, "%lld", int_);
            out += buf;
            break;
        }
        case Kind::boolean:
            out += bool_ ? "true" : "false";
            break;
        case Kind::text:
            out += "\"" + escape_json(str_) + "\"";
            break;
        case Kind::array: {
            if (children_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < children_.size(); ++i) {
                out += pad;
                children_[i].render(out, indent, depth + 1);
                out += i + 1 < children_.size() ? ",\n" : "\n";
            }
            out += close_pad + "]";
            break;
        }
        case Kind::object: {
            if (children_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < children_.size(); ++i) {
                out += pad + "\"" + escape_json(keys_[i]) + "\": ";
                children_[i].render(out, indent, depth + 1);
                out += i + 1 < children_.size() ? ",\n" : "\n";
            }
            out += close_pad + "}";
            break;
        }
    }
}

std::string JsonNode::dump(int indent) const {
    std::string out;
    render(out, indent, 0);
    out += "\n";
    return out;
}

ReportBuilder::ReportBuilder(std::string experiment) : experiment_(std::move(experiment)) {}

void ReportBuilder::params(const std::map<std::string, std::string>& resolved) {
    for (const auto& [k, v] : resolved) params_[k] = v;
}

void ReportBuilder::metric(const std::string& name, double value, const std::string& threshold,
                           bool pass) {
    metrics_.push_back({name, value, threshold, pass});
}

void ReportBuilder::note(const std::string& text) { notes_.push_back(text); }

void ReportBuilder::artifact(const std::string& filename) { artifacts_.push_back(filename); }

void ReportBuilder::section(const std::string& name, JsonNode node) {
    section_names_.push_back(name);
    sections_.push_back(std::move(node));
}

bool ReportBuilder::all_pass() const {
    for (const MetricRow& m : metrics_)
        if (!m.pass) return false;
    return true;
}

std::string ReportBuilder::to_json() const {
    JsonNode root = JsonNode::object();
    root.field("schema_version", 1);
    root.field("experiment", experiment_);

    JsonNode params = JsonNode::object();
    for (const auto& [k, v] : params_) params.field(k, v);
    root.field("params", std::move(params));

    JsonNode metrics = JsonNode::array();
    for (const MetricRow& m : metrics_) {
        JsonNode row = JsonNode::object();
        row.field("name", m.name);
        row.field("value", m.value);
        row.field("threshold", m.threshold);
        row.field("pass", m.pass);
        metrics.push(std::move(row));
    }
    root.field("metrics", std::move(metrics));

    if (!notes_.empty()) {
        JsonNode notes = JsonNode::array();
        for (const std::string& s : notes_) notes.push(JsonNode::text(s));
        root.field("notes", std::move(notes));
    }
    if (!sections_.empty()) {
        JsonNode sections = JsonNode::object();
        for (std::size_t i = 0; i < sections_.size(); ++i)
            sections.field(section_names_[i], sections_[i]);
        root.field("sections", std::move(sections));
    }
    if (!artifacts_.empty()) {
        JsonNode arts = JsonNode::array();
        for (const std::string& s : artifacts_) arts.push(JsonNode::text(s));
        root.field("artifacts", std::move(arts));
    }
    root.field("pass", all_pass());
    return root.dump();
}

std::filesystem::path ReportBuilder::write(const std::filesystem::path& out_dir) const {
    const std::filesystem::path path = out_dir / "report.json";
    std::filesystem::create_directories(out_dir);
    write_file(path, to_json());
    return path;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : n_cols_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ",";
        text_ += columns[i];
    }
    text_ += "\n";
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != n_cols_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ",";
        text_ += format_g17(values[i]);
    }
    text_ += "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ",";
        text_ += cells[i];
    }
    text_ += "\n";
}

std::filesystem::path CsvWriter::write(const std::filesystem::path& out_dir,
                                       const std::string& filename) const {
    const std::filesystem::path path = out_dir / filename;
    std::filesystem::create_directories(out_dir);
    write_file(path, text_);
    return path;
}

}  // namespace singulax

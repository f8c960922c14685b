#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqpoint/error.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

enum class TraceFormat { csv, json };

inline std::string_view to_string(TraceFormat f) { return f == TraceFormat::csv ? "csv" : "json"; }

inline TraceFormat parse_format(std::string_view name) {
    if (name == "csv") {
        return TraceFormat::csv;
    }
    if (name == "json") {
        return TraceFormat::json;
    }
    throw ParameterError("unknown trace format '" + std::string(name) + "'");
}

/// Picks the format from a file extension; anything but .json is CSV.
inline TraceFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? TraceFormat::json : TraceFormat::csv;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading " + path.string());
    }
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::string_view column, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("bad value '" + std::string(field) + "' in column " + std::string(column), line);
    }
    return value;
}

inline SeqLen checked_seq_len(std::int64_t raw, std::size_t line) {
    if (raw < 1) {
        throw ValidationError("line " + std::to_string(line) + ": seq_len must be ≥ 1");
    }
    if (raw > static_cast<std::int64_t>(std::numeric_limits<SeqLen>::max())) {
        throw ValidationError("line " + std::to_string(line) + ": seq_len out of range");
    }
    return static_cast<SeqLen>(raw);
}

inline double checked_runtime(double raw, std::size_t line) {
    if (!(raw > 0.0) || !std::isfinite(raw)) {
        throw ValidationError("line " + std::to_string(line) + ": runtime must be > 0");
    }
    return raw;
}

inline void apply_meta(EpochTrace::Info& info, std::string_view key, std::string_view value, std::size_t line) {
    if (key == "config_id") {
        info.config_id = std::string(value);
    } else if (key == "dataset_id") {
        info.dataset_id = std::string(value);
    } else if (key == "batch_size") {
        info.batch_size = parse_number<std::uint64_t>(value, key, line);
    } else if (key == "vocab_size") {
        info.vocab_size = parse_number<std::uint64_t>(value, key, line);
    }
}

inline EpochTrace parse_csv(std::string_view source) {
    EpochTrace::Info info;
    std::vector<IterationRecord> records;

    std::optional<std::size_t> col_index, col_sl, col_runtime;
    std::vector<std::pair<std::size_t, std::string>> metric_cols;
    std::size_t n_cols = 0;
    bool have_header = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        auto nl = source.find('\n', pos);
        std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") {
            line.remove_prefix(3);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            // "# key=value" metadata, only before the header
            if (!have_header) {
                auto body = trim(line.substr(1));
                auto eq = body.find('=');
                if (eq != std::string_view::npos) {
                    apply_meta(info, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line_no);
                }
            }
            continue;
        }
        auto fields = split_csv(line);
        if (!have_header) {
            have_header = true;
            n_cols = fields.size();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                auto name = fields[i];
                if (name == "index") {
                    col_index = i;
                } else if (name == "seq_len") {
                    col_sl = i;
                } else if (name == "runtime_s") {
                    col_runtime = i;
                } else if (name.substr(0, 7) == "metric:" && name.size() > 7) {
                    metric_cols.emplace_back(i, std::string(name.substr(7)));
                } else {
                    throw ParseError("unknown column '" + std::string(name) + "'", line_no);
                }
            }
            if (!col_index || !col_sl || !col_runtime) {
                throw ParseError("header must contain index, seq_len and runtime_s columns", line_no);
            }
            continue;
        }
        if (fields.size() != n_cols) {
            throw ParseError("expected " + std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        IterationRecord r;
        r.index = parse_number<std::size_t>(fields[*col_index], "index", line_no);
        r.seq_len = checked_seq_len(parse_number<std::int64_t>(fields[*col_sl], "seq_len", line_no), line_no);
        r.runtime = checked_runtime(parse_number<double>(fields[*col_runtime], "runtime_s", line_no), line_no);
        for (const auto& [col, name] : metric_cols) {
            r.metrics.emplace(name, parse_number<double>(fields[col], name, line_no));
        }
        records.push_back(std::move(r));
    }
    if (!have_header) {
        throw ParseError("missing header row", line_no);
    }
    return EpochTrace(std::move(records), std::move(info));
}

inline EpochTrace parse_json(std::string_view source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    try {
        EpochTrace::Info info;
        info.config_id = doc.value("config_id", std::string());
        info.dataset_id = doc.value("dataset_id", std::string());
        info.batch_size = doc.value("batch_size", std::uint64_t{1});
        info.vocab_size = doc.value("vocab_size", std::uint64_t{1});
        if (!doc.contains("records") || !doc.at("records").is_array()) {
            throw ParseError("missing 'records' array");
        }
        std::vector<IterationRecord> records;
        std::size_t i = 0;
        for (const auto& item : doc.at("records")) {
            ++i;
            IterationRecord r;
            r.index = item.at("index").get<std::size_t>();
            r.seq_len = checked_seq_len(item.at("seq_len").get<std::int64_t>(), i);
            r.runtime = checked_runtime(item.at("runtime_s").get<double>(), i);
            if (item.contains("metrics")) {
                for (const auto& [name, value] : item.at("metrics").items()) {
                    r.metrics.emplace(name, value.get<double>());
                }
            }
            records.push_back(std::move(r));
        }
        return EpochTrace(std::move(records), std::move(info));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

} // namespace detail

/// Parses a trace from bytes. CSV sources may carry `# key=value` metadata
/// lines (config_id, dataset_id, batch_size, vocab_size) before the header.
inline EpochTrace parse_trace(std::string_view source, TraceFormat format) {
    return format == TraceFormat::csv ? detail::parse_csv(source) : detail::parse_json(source);
}

inline EpochTrace load_trace(const std::filesystem::path& path, std::optional<TraceFormat> format = std::nullopt) {
    return parse_trace(read_file(path), format.value_or(format_for_path(path)));
}

inline std::string serialize_csv(const EpochTrace& trace) {
    std::string out;
    out.reserve(trace.size() * 24);
    const auto& info = trace.info();
    out += "# config_id=" + info.config_id + "\n";
    out += "# dataset_id=" + info.dataset_id + "\n";
    out += "# batch_size=" + std::to_string(info.batch_size) + "\n";
    out += "# vocab_size=" + std::to_string(info.vocab_size) + "\n";
    out += "index,seq_len,runtime_s";
    for (const auto& name : trace.metric_names()) {
        out += ",metric:" + name;
    }
    out += '\n';
    for (const auto& r : trace.records()) {
        out += std::to_string(r.index);
        out += ',';
        out += std::to_string(r.seq_len);
        out += ',';
        out += format_double(r.runtime);
        for (const auto& [name, value] : r.metrics) {
            out += ',';
            out += format_double(value);
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json trace_to_json(const EpochTrace& trace) {
    nlohmann::ordered_json doc;
    doc["config_id"] = trace.config_id();
    doc["dataset_id"] = trace.dataset_id();
    doc["batch_size"] = trace.batch_size();
    doc["vocab_size"] = trace.vocab_size();
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : trace.records()) {
        nlohmann::ordered_json item;
        item["index"] = r.index;
        item["seq_len"] = r.seq_len;
        item["runtime_s"] = r.runtime;
        auto metrics = nlohmann::ordered_json::object();
        for (const auto& [name, value] : r.metrics) {
            metrics[name] = value;
        }
        item["metrics"] = std::move(metrics);
        records.push_back(std::move(item));
    }
    doc["records"] = std::move(records);
    return doc;
}

inline std::string serialize_trace(const EpochTrace& trace, TraceFormat format) {
    if (format == TraceFormat::csv) {
        return serialize_csv(trace);
    }
    return trace_to_json(trace).dump(1) + "\n";
}

} // namespace seqpoint

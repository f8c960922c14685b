#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqpoint/error.hpp"
#include "seqpoint/methods.hpp"
#include "seqpoint/oracle.hpp"
#include "seqpoint/projection.hpp"
#include "seqpoint/serialize.hpp"
#include "seqpoint/trace.hpp"
#include "seqpoint/trace_io.hpp"

namespace seqpoint {

/// A trace under a config label. Partial traces hold only the iterations
/// that were actually run (e.g. the SeqPoints), so no actual values exist
/// for them.
struct ConfigTrace {
    EpochTrace trace;
    bool full = true;
};

struct CompareOptions {
    std::string reference;
    std::vector<Method> methods{Method::seqpoint};
    MethodOptions method_options;
    std::vector<StatSpec> stats{StatSpec{}};
};

struct ProjectionRow {
    std::string config;
    Method method = Method::seqpoint;
    StatSpec stat;
    double predicted = 0.0;
    std::optional<double> actual;
    std::optional<double> error_pct;
};

struct GeomeanRow {
    Method method = Method::seqpoint;
    std::string stat;
    /// Unset when no config of this method had an actual value.
    std::optional<double> geomean;
};

struct SpeedupRow {
    std::string reference;
    std::string config;
    Method method = Method::seqpoint;
    double projected_change_pct = 0.0;
    std::optional<double> actual_change_pct;
    std::optional<double> delta;
    std::optional<double> signed_delta;
};

struct ProjectionReport {
    std::string reference;
    std::vector<SeqPointSet> selections;
    std::vector<ProjectionRow> rows;
    std::vector<GeomeanRow> geomeans;
    std::vector<SpeedupRow> speedups;
    std::vector<GeomeanRow> speedup_geomeans;
};

/// One row per stat for a selection re-measured on `trace`.
inline std::vector<ProjectionRow> project_rows(const SeqPointSet& selection, const ConfigTrace& input,
                                               const std::vector<StatSpec>& stats) {
    const auto measured = remeasure(selection, input.trace);
    std::vector<ProjectionRow> rows;
    for (const auto& stat : stats) {
        ProjectionRow row;
        row.config = input.trace.config_id();
        row.method = selection.method;
        row.stat = stat;
        row.predicted = project(measured, stat);
        if (input.full) {
            row.actual = exhaustive_oracle(input.trace, stat);
            row.error_pct = percent_error(row.predicted, *row.actual);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Selects once per method on the reference trace, re-measures the
/// selection on every config, and reports projections, per-method geomean
/// errors and throughput-change deltas against the reference.
inline ProjectionReport compare(const std::vector<ConfigTrace>& inputs, const CompareOptions& options) {
    if (inputs.empty()) {
        throw ParameterError("compare needs at least one trace");
    }
    if (options.methods.empty() || options.stats.empty()) {
        throw ParameterError("compare needs at least one method and one stat");
    }
    std::set<std::string> labels;
    const ConfigTrace* reference = nullptr;
    for (const auto& in : inputs) {
        if (!labels.insert(in.trace.config_id()).second) {
            throw ParameterError("duplicate config '" + in.trace.config_id() + "'");
        }
        if (in.trace.config_id() == options.reference) {
            reference = &in;
        }
    }
    if (reference == nullptr) {
        throw ParameterError("reference config '" + options.reference + "' not among the traces");
    }
    if (!reference->full) {
        throw ParameterError("the reference trace must be a full epoch");
    }
    for (const auto& stat : options.stats) {
        if (!reference->trace.has_stat(stat.name)) {
            throw ParameterError("reference trace has no stat '" + stat.name + "'");
        }
    }

    ProjectionReport report;
    report.reference = options.reference;
    const auto batch = reference->trace.batch_size();
    for (auto method : options.methods) {
        auto selection = select_with(method, reference->trace, options.method_options);
        std::map<std::string, std::vector<double>> errors;
        std::vector<double> deltas;
        const auto at_ref = remeasure(selection, reference->trace);
        for (const auto& in : inputs) {
            for (auto& row : project_rows(selection, in, options.stats)) {
                if (row.error_pct) {
                    errors[row.stat.name].push_back(*row.error_pct);
                }
                report.rows.push_back(std::move(row));
            }
            if (&in == reference) {
                continue;
            }
            const auto at_cfg = remeasure(selection, in.trace);
            SpeedupRow s;
            s.reference = options.reference;
            s.config = in.trace.config_id();
            s.method = method;
            if (in.full) {
                const auto d = project_speedup_delta(at_ref, at_cfg, reference->trace, in.trace, batch);
                s.projected_change_pct = d.projected_change_pct;
                s.actual_change_pct = d.actual_change_pct;
                s.delta = d.delta;
                s.signed_delta = d.signed_delta;
                deltas.push_back(d.delta);
            } else {
                s.projected_change_pct = projected_change_pct(at_ref, at_cfg, batch);
            }
            report.speedups.push_back(std::move(s));
        }
        for (const auto& stat : options.stats) {
            GeomeanRow g{method, stat.name, std::nullopt};
            if (auto it = errors.find(stat.name); it != errors.end()) {
                g.geomean = geomean_error(it->second);
            }
            report.geomeans.push_back(std::move(g));
        }
        if (inputs.size() > 1) {
            GeomeanRow g{method, "throughput_change", std::nullopt};
            if (!deltas.empty()) {
                g.geomean = geomean_error(deltas);
            }
            report.speedup_geomeans.push_back(std::move(g));
        }
        report.selections.push_back(std::move(selection));
    }
    return report;
}

namespace detail {

inline std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace detail

/// `config,method,stat,predicted,actual,error_pct`, then one GEOMEAN row per
/// (method, stat) carrying the geomean in error_pct.
inline std::string report_csv(const ProjectionReport& report) {
    std::string out = "config,method,stat,predicted,actual,error_pct\n";
    for (const auto& r : report.rows) {
        out += r.config + "," + std::string(to_string(r.method)) + "," + r.stat.name + "," +
               format_double(r.predicted) + "," + detail::opt_number(r.actual) + "," +
               detail::opt_number(r.error_pct) + "\n";
    }
    for (const auto& g : report.geomeans) {
        out += "GEOMEAN," + std::string(to_string(g.method)) + "," + g.stat + ",,," + detail::opt_number(g.geomean) +
               "\n";
    }
    return out;
}

inline std::string speedup_csv(const ProjectionReport& report) {
    std::string out = "reference,config,method,projected_change_pct,actual_change_pct,delta_pp,signed_delta_pp\n";
    for (const auto& s : report.speedups) {
        out += s.reference + "," + s.config + "," + std::string(to_string(s.method)) + "," +
               format_double(s.projected_change_pct) + "," + detail::opt_number(s.actual_change_pct) + "," +
               detail::opt_number(s.delta) + "," + detail::opt_number(s.signed_delta) + "\n";
    }
    for (const auto& g : report.speedup_geomeans) {
        out += report.reference + ",GEOMEAN," + std::string(to_string(g.method)) + ",,," +
               detail::opt_number(g.geomean) + ",\n";
    }
    return out;
}

inline nlohmann::ordered_json report_json(const ProjectionReport& report) {
    using json = nlohmann::ordered_json;
    json j;
    j["reference"] = report.reference;
    auto selections = json::array();
    for (const auto& s : report.selections) {
        selections.push_back(to_json(s));
    }
    j["selections"] = std::move(selections);
    auto rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"config", r.config},
                        {"method", to_string(r.method)},
                        {"stat", r.stat.name},
                        {"kind", to_string(r.stat.kind)},
                        {"predicted", r.predicted},
                        {"actual", detail::opt_json(r.actual)},
                        {"error_pct", detail::opt_json(r.error_pct)}});
    }
    j["projections"] = std::move(rows);
    auto geo = json::array();
    for (const auto& g : report.geomeans) {
        geo.push_back({{"config", "GEOMEAN"},
                       {"method", to_string(g.method)},
                       {"stat", g.stat},
                       {"geomean_error_pct", detail::opt_json(g.geomean)}});
    }
    j["geomeans"] = std::move(geo);
    auto speed = json::array();
    for (const auto& s : report.speedups) {
        speed.push_back({{"reference", s.reference},
                         {"config", s.config},
                         {"method", to_string(s.method)},
                         {"projected_change_pct", s.projected_change_pct},
                         {"actual_change_pct", detail::opt_json(s.actual_change_pct)},
                         {"delta_pp", detail::opt_json(s.delta)},
                         {"signed_delta_pp", detail::opt_json(s.signed_delta)}});
    }
    j["speedups"] = std::move(speed);
    auto sgeo = json::array();
    for (const auto& g : report.speedup_geomeans) {
        sgeo.push_back({{"config", "GEOMEAN"},
                        {"method", to_string(g.method)},
                        {"geomean_delta_pp", detail::opt_json(g.geomean)}});
    }
    j["speedup_geomeans"] = std::move(sgeo);
    return j;
}

/// Grouped bar chart: one group per category, one bar per series.
inline std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                                 const std::vector<std::string>& categories, const std::vector<std::string>& series,
                                 const std::map<std::pair<std::string, std::string>, double>& values) {
    static constexpr const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"};
    const double left = 70, top = 40, plot_h = 260, bar_w = 14, gap = 24;
    const double group_w = bar_w * static_cast<double>(series.size()) + gap;
    const double plot_w = std::max(200.0, group_w * static_cast<double>(categories.size()));
    const double width = left + plot_w + 150, height = top + plot_h + 60;

    double y_max = 0.0;
    for (const auto& [key, v] : values) {
        y_max = std::max(y_max, std::abs(v));
    }
    y_max = y_max > 0.0 ? y_max * 1.1 : 1.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        const double y = top + plot_h - plot_h * t / 4.0;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << format_double(std::round(v * 100) / 100)
            << "</text>\n";
    }
    svg << "<text transform=\"translate(16," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << y_label << "</text>\n";
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double x0 = left + gap / 2 + group_w * static_cast<double>(c);
        for (std::size_t s = 0; s < series.size(); ++s) {
            auto it = values.find({categories[c], series[s]});
            if (it == values.end()) {
                continue;
            }
            const double h = plot_h * std::abs(it->second) / y_max;
            svg << "<rect x=\"" << x0 + bar_w * static_cast<double>(s) << "\" y=\"" << top + plot_h - h
                << "\" width=\"" << bar_w - 1 << "\" height=\"" << h << "\" fill=\"" << palette[s % 6] << "\"/>\n";
        }
        svg << "<text x=\"" << x0 + bar_w * static_cast<double>(series.size()) / 2 << "\" y=\"" << top + plot_h + 16
            << "\" text-anchor=\"middle\">" << categories[c] << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = top + 14.0 * static_cast<double>(s);
        svg << "<rect x=\"" << left + plot_w + 20 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
            << palette[s % 6] << "\"/>\n";
        svg << "<text x=\"" << left + plot_w + 36 << "\" y=\"" << y + 9 << "\">" << series[s] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

/// Percent error per config and method for one stat.
inline std::string error_chart_svg(const ProjectionReport& report, const std::string& stat) {
    std::vector<std::string> configs, methods;
    std::map<std::pair<std::string, std::string>, double> values;
    for (const auto& r : report.rows) {
        if (r.stat.name != stat || !r.error_pct) {
            continue;
        }
        if (std::find(configs.begin(), configs.end(), r.config) == configs.end()) {
            configs.push_back(r.config);
        }
        std::string m(to_string(r.method));
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
        values[{r.config, m}] = *r.error_pct;
    }
    return bar_chart_svg("Projection error: " + stat, "error (%)", configs, methods, values);
}

/// Speedup delta per config and method.
inline std::string speedup_chart_svg(const ProjectionReport& report) {
    std::vector<std::string> configs, methods;
    std::map<std::pair<std::string, std::string>, double> values;
    for (const auto& s : report.speedups) {
        if (!s.delta) {
            continue;
        }
        const auto label = s.config + " vs " + s.reference;
        if (std::find(configs.begin(), configs.end(), label) == configs.end()) {
            configs.push_back(label);
        }
        std::string m(to_string(s.method));
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
        values[{label, m}] = *s.delta;
    }
    return bar_chart_svg("Throughput-change projection error", "delta (pct points)", configs, methods, values);
}

/// Inputs and outputs of one `compare` run.
struct ExperimentPlan {
    struct TraceEntry {
        std::string config_id;
        std::filesystem::path path;
        bool full = true;
    };
    std::vector<TraceEntry> traces;
    CompareOptions options;
    std::optional<std::filesystem::path> out_csv;
    std::optional<std::filesystem::path> out_json;
    std::optional<std::filesystem::path> out_speedup_csv;
    std::optional<std::filesystem::path> svg_dir;

    void validate() const {
        if (traces.empty()) {
            throw ParameterError("plan has no traces");
        }
        bool found = false;
        for (const auto& t : traces) {
            found |= t.config_id == options.reference;
        }
        if (!found) {
            throw ParameterError("reference config '" + options.reference + "' is not in the plan");
        }
    }
};

/// Plan file: {"traces":[{"config","path","full"}], "reference", "methods",
/// "stats":[{"name","kind"}], "selection":{...}, "prior":{...},
/// "kmeans":{...}, "outputs":{"csv","json","speedup_csv","svg_dir"}}.
/// Relative paths resolve against `base`.
inline ExperimentPlan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    try {
        ExperimentPlan plan;
        for (const auto& t : j.at("traces")) {
            plan.traces.push_back({t.at("config").get<std::string>(), resolve(t.at("path").get<std::string>()),
                                   t.value("full", true)});
        }
        plan.options.reference = j.value("reference", plan.traces.empty() ? std::string() : plan.traces[0].config_id);
        if (j.contains("methods")) {
            plan.options.methods.clear();
            for (const auto& m : j.at("methods")) {
                plan.options.methods.push_back(parse_method(m.get<std::string>()));
            }
        }
        if (j.contains("stats")) {
            plan.options.stats.clear();
            for (const auto& s : j.at("stats")) {
                plan.options.stats.push_back(
                    {s.at("name").get<std::string>(), parse_stat_kind(s.value("kind", std::string("additive")))});
            }
        }
        auto& mo = plan.options.method_options;
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            mo.selection.n_threshold = s.value("n_threshold", mo.selection.n_threshold);
            mo.selection.k_init = s.value("k_init", mo.selection.k_init);
            mo.selection.error_threshold_pct = s.value("error_threshold_pct", mo.selection.error_threshold_pct);
            if (s.contains("k_max") && !s.at("k_max").is_null()) {
                mo.selection.k_max = s.at("k_max").get<std::size_t>();
            }
        }
        if (j.contains("prior")) {
            mo.prior.warmup = j.at("prior").value("warmup", mo.prior.warmup);
            mo.prior.sample_count = j.at("prior").value("sample_count", mo.prior.sample_count);
        }
        if (j.contains("kmeans")) {
            const auto& k = j.at("kmeans");
            mo.kmeans.k = k.value("k", mo.kmeans.k);
            mo.kmeans.features = parse_kmeans_features(k.value("features", std::string("runtime")));
            mo.kmeans.seed = k.value("seed", mo.kmeans.seed);
            mo.kmeans.max_iters = k.value("max_iters", mo.kmeans.max_iters);
        }
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            if (o.contains("csv")) plan.out_csv = resolve(o.at("csv").get<std::string>());
            if (o.contains("json")) plan.out_json = resolve(o.at("json").get<std::string>());
            if (o.contains("speedup_csv")) plan.out_speedup_csv = resolve(o.at("speedup_csv").get<std::string>());
            if (o.contains("svg_dir")) plan.svg_dir = resolve(o.at("svg_dir").get<std::string>());
        }
        plan.validate();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("bad plan: ") + e.what());
    }
}

/// Loads every trace of the plan, labelled with the plan's config ids.
inline std::vector<ConfigTrace> load_plan_traces(const ExperimentPlan& plan) {
    std::vector<ConfigTrace> out;
    for (const auto& t : plan.traces) {
        out.push_back({load_trace(t.path).relabeled(t.config_id), t.full});
    }
    return out;
}

} // namespace seqpoint

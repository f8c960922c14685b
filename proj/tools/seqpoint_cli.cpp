// seqpoint: select representative iterations from an epoch trace and project
// whole-run statistics and cross-config speedups from them.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqpoint/seqpoint.hpp"

namespace fs = std::filesystem;
using namespace seqpoint;

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kIo = 3, kParameter = 4 };

struct SelectionFlags {
    std::size_t n_threshold = 10;
    std::size_t k_init = 5;
    double error_threshold = 1.0;
    std::optional<std::size_t> k_max;
    std::size_t warmup = 0;
    std::size_t samples = 50;
    std::size_t kmeans_k = 5;
    std::string features = "runtime";
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
    std::string worst_stat{kRuntime};

    void attach(CLI::App& cmd) {
        cmd.add_option("--n-threshold", n_threshold, "Unique-SL count at or below which every SL is kept")
            ->capture_default_str();
        cmd.add_option("--k-init", k_init, "Initial bin count")->capture_default_str();
        cmd.add_option("--error-threshold", error_threshold, "Self-projection error target, percent")
            ->capture_default_str();
        cmd.add_option("--k-max", k_max, "Largest bin count to try (default: unique SL count)");
        cmd.add_option("--warmup", warmup, "prior: iterations skipped before sampling")->capture_default_str();
        cmd.add_option("--samples", samples, "prior: contiguous iterations sampled")->capture_default_str();
        cmd.add_option("--k", kmeans_k, "kmeans: cluster count")->capture_default_str();
        cmd.add_option("--features", features, "kmeans: runtime | metrics | runtime+metrics")->capture_default_str();
        cmd.add_option("--seed", seed, "kmeans: initialization seed")->capture_default_str();
        cmd.add_option("--max-iters", max_iters, "kmeans: Lloyd iteration cap")->capture_default_str();
        cmd.add_option("--worst-stat", worst_stat, "worst: stat whose error is maximized")->capture_default_str();
    }

    MethodOptions options() const {
        MethodOptions o;
        o.selection = SelectionParams{n_threshold, k_init, error_threshold, k_max};
        o.prior = PriorParams{warmup, samples};
        o.kmeans = KMeansParams{kmeans_k, parse_kmeans_features(features), seed, max_iters};
        o.worst_stat = worst_stat;
        return o;
    }
};

/// "name" or "name:kind".
std::vector<StatSpec> parse_stats(const std::vector<std::string>& raw) {
    std::vector<StatSpec> out;
    for (const auto& s : raw) {
        auto colon = s.rfind(':');
        if (colon != std::string::npos && (s.substr(colon + 1) == "additive" || s.substr(colon + 1) == "ratio")) {
            out.push_back({s.substr(0, colon), parse_stat_kind(s.substr(colon + 1))});
        } else {
            out.push_back({s, StatKind::additive});
        }
    }
    if (out.empty()) {
        out.push_back(StatSpec{});
    }
    return out;
}

/// "config=path".
std::pair<std::string, fs::path> parse_labeled(const std::string& s) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParameterError("expected CONFIG=PATH, got '" + s + "'");
    }
    return {s.substr(0, eq), fs::path(s.substr(eq + 1))};
}

std::optional<TraceFormat> format_opt(const std::string& f) {
    if (f.empty()) {
        return std::nullopt;
    }
    return parse_format(f);
}

void write_or_print(const std::optional<fs::path>& path, const std::string& content) {
    if (path) {
        if (path->has_parent_path()) {
            fs::create_directories(path->parent_path());
        }
        write_file(*path, content);
    } else {
        std::cout << content;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Representative-iteration selection and projection for sequence-based training traces"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "Check a trace file and print its summary");
    std::string validate_trace, validate_format;
    validate->add_option("--trace", validate_trace, "Trace file")->required();
    validate->add_option("--format", validate_format, "csv | json (default: from extension)");

    // select
    auto* select = app.add_subcommand("select", "Select SeqPoints (or a baseline) from a full epoch trace");
    std::string select_trace, select_method = "seqpoint", select_format;
    std::optional<fs::path> select_out;
    SelectionFlags select_flags;
    select->add_option("--trace", select_trace, "Trace file")->required();
    select->add_option("--method", select_method, "seqpoint | frequent | median | worst | prior | kmeans")
        ->capture_default_str();
    select->add_option("--out", select_out, "Output SeqPoint set (JSON); stdout when omitted");
    select->add_option("--format", select_format, "csv | json (default: from extension)");
    select_flags.attach(*select);

    // project
    auto* project_cmd = app.add_subcommand("project", "Project stats of a trace from a SeqPoint set");
    std::string project_set, project_trace, project_format;
    std::vector<std::string> project_stats;
    bool project_partial = false;
    std::optional<fs::path> project_out;
    project_cmd->add_option("--seqpoints", project_set, "SeqPoint set (JSON)")->required();
    project_cmd->add_option("--trace", project_trace, "Measurements on the target config")->required();
    project_cmd->add_option("--stat", project_stats, "NAME[:additive|ratio], repeatable (default runtime)");
    project_cmd->add_flag("--partial", project_partial, "Trace holds only the SeqPoint iterations; no actuals");
    project_cmd->add_option("--format", project_format, "csv | json (default: from extension)");
    project_cmd->add_option("--out", project_out, "Output CSV; stdout when omitted");

    // speedup
    auto* speedup = app.add_subcommand("speedup", "Project the throughput change between two configs");
    std::string speedup_set, speedup_base, speedup_target;
    bool speedup_partial = false;
    speedup->add_option("--seqpoints", speedup_set, "SeqPoint set selected on the base config")->required();
    speedup->add_option("--base", speedup_base, "Base config trace (full)")->required();
    speedup->add_option("--target", speedup_target, "Target config trace")->required();
    speedup->add_flag("--partial", speedup_partial, "Target trace holds only the SeqPoint iterations");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Run methods across configs and emit projection reports");
    std::optional<fs::path> plan_path;
    std::vector<std::string> compare_traces, compare_partial, compare_methods, compare_stats;
    std::string reference;
    std::optional<fs::path> out_csv, out_json, out_speedup, svg_dir;
    SelectionFlags compare_flags;
    compare_cmd->add_option("--plan", plan_path, "Experiment plan (JSON); flags below are ignored when given");
    compare_cmd->add_option("--trace", compare_traces, "CONFIG=PATH of a full epoch trace, repeatable");
    compare_cmd->add_option("--partial", compare_partial, "CONFIG=PATH of a SeqPoint-only trace, repeatable");
    compare_cmd->add_option("--reference", reference, "Config the selection is made on (default: first trace)");
    compare_cmd->add_option("--methods", compare_methods, "Methods to run (default seqpoint)")->delimiter(',');
    compare_cmd->add_option("--stat", compare_stats, "NAME[:additive|ratio], repeatable (default runtime)");
    compare_cmd->add_option("--out-csv", out_csv, "Projection report CSV");
    compare_cmd->add_option("--out-json", out_json, "Full report JSON");
    compare_cmd->add_option("--out-speedup", out_speedup, "Speedup report CSV");
    compare_cmd->add_option("--svg", svg_dir, "Directory for SVG bar charts");
    compare_flags.attach(*compare_cmd);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic traces, one file per config");
    std::string synth_spec, synth_format = "csv";
    fs::path synth_out;
    synth->add_option("--spec", synth_spec, "Synthetic workload spec (JSON)")->required();
    synth->add_option("--out-dir", synth_out, "Output directory")->required();
    synth->add_option("--format", synth_format, "csv | json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParameter;
    }

    try {
        if (*validate) {
            const auto trace = load_trace(validate_trace, format_opt(validate_format));
            const auto hist = sl_histogram(trace);
            std::cout << "records=" << trace.size() << " unique_sls=" << hist.unique_count()
                      << " min_sl=" << hist.min_sl << " max_sl=" << hist.max_sl
                      << " total_runtime_s=" << format_double(exhaustive_oracle(trace, kRuntime, StatKind::additive))
                      << " metrics=" << trace.metric_names().size() << "\n";
        } else if (*select) {
            const auto trace = load_trace(select_trace, format_opt(select_format));
            const auto set = select_with(parse_method(select_method), trace, select_flags.options());
            write_or_print(select_out, serialize_seqpoints(set));
            auto& log = select_out ? std::cout : std::cerr;
            log << "method=" << to_string(set.method) << " k_final=" << set.k_final
                << " achieved_error_pct=" << format_double(set.achieved_error_pct) << " points=" << set.points.size()
                << (set.threshold_met ? "" : " threshold-not-met") << "\n";
        } else if (*project_cmd) {
            const auto set = parse_seqpoints(read_file(project_set));
            const ConfigTrace input{load_trace(project_trace, format_opt(project_format)), !project_partial};
            ProjectionReport report;
            report.rows = project_rows(set, input, parse_stats(project_stats));
            write_or_print(project_out, report_csv(report));
        } else if (*speedup) {
            const auto set = parse_seqpoints(read_file(speedup_set));
            const auto base = load_trace(speedup_base);
            const auto target = load_trace(speedup_target);
            const auto at_base = remeasure(set, base);
            const auto at_target = remeasure(set, target);
            if (speedup_partial) {
                std::cout << "projected_change_pct="
                          << format_double(projected_change_pct(at_base, at_target, base.batch_size())) << "\n";
            } else {
                const auto d = project_speedup_delta(at_base, at_target, base, target, base.batch_size());
                std::cout << "projected_change_pct=" << format_double(d.projected_change_pct)
                          << " actual_change_pct=" << format_double(d.actual_change_pct)
                          << " delta_pp=" << format_double(d.delta) << "\n";
            }
        } else if (*compare_cmd) {
            ExperimentPlan plan;
            if (plan_path) {
                plan = plan_from_json(nlohmann::json::parse(read_file(*plan_path)), plan_path->parent_path());
            } else {
                for (const auto& t : compare_traces) {
                    auto [cfg, path] = parse_labeled(t);
                    plan.traces.push_back({cfg, path, true});
                }
                for (const auto& t : compare_partial) {
                    auto [cfg, path] = parse_labeled(t);
                    plan.traces.push_back({cfg, path, false});
                }
                if (plan.traces.empty()) {
                    throw ParameterError("compare needs --plan or at least one --trace");
                }
                plan.options.reference = reference.empty() ? plan.traces.front().config_id : reference;
                if (!compare_methods.empty()) {
                    plan.options.methods.clear();
                    for (const auto& m : compare_methods) {
                        plan.options.methods.push_back(parse_method(m));
                    }
                }
                plan.options.stats = parse_stats(compare_stats);
                plan.options.method_options = compare_flags.options();
                plan.out_csv = out_csv;
                plan.out_json = out_json;
                plan.out_speedup_csv = out_speedup;
                plan.svg_dir = svg_dir;
                plan.validate();
            }
            const auto report = compare(load_plan_traces(plan), plan.options);
            write_or_print(plan.out_csv, report_csv(report));
            if (plan.out_json) {
                write_or_print(plan.out_json, report_json(report).dump(2) + "\n");
            }
            if (plan.out_speedup_csv) {
                write_or_print(plan.out_speedup_csv, speedup_csv(report));
            }
            if (plan.svg_dir) {
                fs::create_directories(*plan.svg_dir);
                for (const auto& stat : plan.options.stats) {
                    write_file(*plan.svg_dir / ("error_" + stat.name + ".svg"), error_chart_svg(report, stat.name));
                }
                if (!report.speedups.empty()) {
                    write_file(*plan.svg_dir / "speedup.svg", speedup_chart_svg(report));
                }
            }
        } else if (*synth) {
            const auto spec = synth_spec_from_json(nlohmann::json::parse(read_file(synth_spec)));
            const auto format = parse_format(synth_format);
            fs::create_directories(synth_out);
            for (const auto& trace : generate_all(spec)) {
                const auto path =
                    synth_out / (spec.dataset_id + "_" + trace.config_id() + "." + std::string(to_string(format)));
                write_file(path, serialize_trace(trace, format));
                std::cout << path.string() << "\n";
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParameter;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kValidation;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}

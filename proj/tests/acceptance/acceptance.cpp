// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqpoint/seqpoint.hpp"
#include "support/fixtures.hpp"

using namespace seqpoint;
namespace fx = seqpoint::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double total_runtime(const EpochTrace& t) { return exhaustive_oracle(t, kRuntime, StatKind::additive); }

// 1. Saturation exactness.
void saturation(Outcome& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    double worst_rel = 0.0;
    int traces = 0;
    for (; traces < 200; ++traces) {
        const auto unique = 1 + rng.below(10);
        std::vector<SeqLen> pool;
        for (std::uint64_t i = 0; i < unique; ++i) {
            pool.push_back(static_cast<SeqLen>(1 + rng.below(4000)));
        }
        const auto n = 1 + rng.below(3000);
        std::vector<SeqLen> sls;
        std::vector<double> rts;
        for (std::uint64_t i = 0; i < n; ++i) {
            sls.push_back(pool[rng.below(pool.size())]);
            rts.push_back(1e-4 + 5.0 * rng.uniform());
        }
        const auto trace = fx::make_trace(sls, rts);
        const auto set = select_seqpoints(trace);
        const double oracle = total_runtime(trace);
        const double rel = std::abs(project_additive(set, kRuntime) - oracle) / oracle;
        worst_rel = std::max(worst_rel, rel);
        out.require(set.points.size() == sl_histogram(trace).unique_count(), "every unique SL kept");
    }
    const double elapsed = seconds_since(t0);
    out.require(worst_rel <= 1e-9, "relative error <= 1e-9");
    out.require(elapsed < 1.0, "runtime < 1 s");
    out.detail << traces << " traces, max relative error " << worst_rel << ", " << elapsed << " s";
}

// 2. Adaptive-loop contract on the worked trace.
void adaptive_loop(Outcome& out) {
    SelectionParams p;
    p.n_threshold = 2;
    p.k_init = 2;
    p.error_threshold_pct = 5.0;
    const auto set = select_seqpoints(fx::worked_trace(), p);
    out.require(set.k_final == 3, "k_final == 3");
    out.require(set.achieved_error_pct == 0.0, "final error 0%");
    out.require(set.k_history.size() == 2, "two rounds");
    const double k2 = set.k_history.empty() ? -1.0 : set.k_history[0].second;
    out.require(std::abs(k2 - 7.6923076923076925) <= 1e-12, "k=2 error 7.6923%");
    out.detail << "k_final=" << set.k_final << " error=" << set.achieved_error_pct << "% (k=2 error " << k2 << "%)";
}

// 3. Workload-shape fidelity.
void shape_fidelity(Outcome& out) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& spec : {fx::ds2_like(), fx::gnmt_like()}) {
        const auto trace = generate_trace(spec, "cfg1");
        SelectionParams p;
        p.error_threshold_pct = 1.0;
        const auto set = select_seqpoints(trace, p);
        const double err = percent_error(project_additive(set, kRuntime), total_runtime(trace));
        out.require(trace.size() >= 5000, spec.dataset_id + " >= 5000 iterations");
        out.require(spec.noise_sigma <= 0.02, spec.dataset_id + " noise <= 2%");
        out.require(set.threshold_met, spec.dataset_id + " converged");
        out.require(set.k_final <= 25, spec.dataset_id + " k_final <= 25");
        out.require(err <= 1.0, spec.dataset_id + " error <= 1%");
        out.detail << spec.dataset_id << ": k_final=" << set.k_final << " points=" << set.points.size()
                   << " error=" << err << "%; ";
    }
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 10.0, "runtime < 10 s");
    out.detail << elapsed << " s";
}

std::vector<SynthSpec> trace_suite() {
    std::vector<SynthSpec> specs;
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        SynthSpec s;
        s.n_iterations = 2000;
        s.min_sl = 5 + static_cast<SeqLen>(seed % 7);
        s.max_sl = 300 + 40 * static_cast<SeqLen>(seed);
        s.distribution = static_cast<SLDistribution>(seed % 3);
        s.skew_shape = 2.0 + static_cast<double>(seed % 4);
        s.modes = {{s.min_sl + 60.0, 15.0}, {s.max_sl - 100.0, 30.0}};
        s.base_cost = 0.01 * static_cast<double>(1 + seed % 5);
        s.per_step_cost = 0.0005;
        s.noise_sigma = 0.02;
        s.seed = 100 + seed;
        specs.push_back(s);
    }
    specs.push_back(fx::ds2_like());
    specs.push_back(fx::gnmt_like());
    return specs;
}

// 4. Baseline ordering.
void baseline_ordering(Outcome& out) {
    int traces = 0, skewed = 0;
    double min_gap = 1e300;
    for (const auto& spec : trace_suite()) {
        const auto trace = generate_trace(spec, "cfg1");
        const auto worst = baseline_worst(trace);
        const auto freq = baseline_frequent(trace);
        const auto med = baseline_median(trace);
        out.require(worst.achieved_error_pct >= freq.achieved_error_pct, "worst >= frequent");
        out.require(worst.achieved_error_pct >= med.achieved_error_pct, "worst >= median");
        ++traces;
        if (spec.distribution == SLDistribution::skewed) {
            const auto sp = select_seqpoints(trace);
            out.require(freq.achieved_error_pct > sp.achieved_error_pct, "frequent > seqpoint on skewed");
            min_gap = std::min(min_gap, freq.achieved_error_pct - sp.achieved_error_pct);
            ++skewed;
        }
    }
    out.detail << traces << " traces; on " << skewed << " skewed traces frequent exceeds seqpoint by >= " << min_gap
               << " pct points";
}

// 5. Speedup projection under uniform and SL-dependent sensitivity.
void speedup(Outcome& out) {
    const std::vector<Method> methods{Method::seqpoint, Method::frequent, Method::median,
                                      Method::worst,    Method::prior,    Method::kmeans};
    double max_uniform = 0.0;
    for (auto spec : {fx::ds2_like(), fx::gnmt_like()}) {
        spec.configs = {{"cfg1", 1.0, 0.0}, {"scaled", 0.6, 0.0}};
        const auto a = generate_trace(spec, "cfg1");
        const auto b = generate_trace(spec, "scaled");
        for (auto m : methods) {
            const auto set = select_with(m, a);
            const auto d = project_speedup_delta(set, remeasure(set, b), a, b, a.batch_size());
            max_uniform = std::max(max_uniform, d.delta);
        }
    }
    out.require(max_uniform <= 1e-9, "uniform scaling delta <= 1e-9");

    auto spec = fx::ds2_like();
    spec.configs = fx::sweep_configs();
    const auto base = generate_trace(spec, "cfg1");
    const auto sp = select_seqpoints(base);
    const auto worst = baseline_worst(base);
    double max_spread = 0.0, max_seq = 0.0, max_worst = 0.0;
    for (const auto& cfg : spec.configs) {
        if (cfg.config_id == "cfg1") {
            continue;
        }
        // per-SL uplift of the base over this config, in percent
        double lo = 1e300, hi = -1e300;
        for (SeqLen sl = spec.min_sl; sl <= spec.max_sl; ++sl) {
            const double uplift = 100.0 * (1.0 / cfg.multiplier(sl) - 1.0);
            lo = std::min(lo, uplift);
            hi = std::max(hi, uplift);
        }
        max_spread = std::max(max_spread, hi - lo);
        const auto other = generate_trace(spec, cfg.config_id);
        max_seq = std::max(max_seq,
                           project_speedup_delta(sp, remeasure(sp, other), base, other, base.batch_size()).delta);
        max_worst = std::max(
            max_worst, project_speedup_delta(worst, remeasure(worst, other), base, other, base.batch_size()).delta);
    }
    out.require(max_spread >= 30.0, "uplift spread >= 30%");
    out.require(max_seq <= 2.0, "seqpoint delta <= 2 pp on every pair");
    out.require(max_worst >= 5.0, "worst delta >= 5 pp on some pair");
    out.detail << "uniform max delta " << max_uniform << "; affine: uplift spread " << max_spread
               << " pp, seqpoint max delta " << max_seq << " pp, worst max delta " << max_worst << " pp";
}

// 6. k-means parity. Sub-percent errors are noise dominated per trace, so
// the ratio is taken between suite geomeans; per-trace ratios are reported.
void kmeans_parity(Outcome& out) {
    std::vector<double> bin_errors, km_errors;
    int per_trace_violations = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto spec = seed % 2 ? fx::ds2_like(seed) : fx::gnmt_like(seed);
        spec.n_iterations = 3000;
        const auto trace = generate_trace(spec, "cfg1");
        const std::size_t k = 6 + seed % 5;
        SelectionParams fixed_k;
        fixed_k.n_threshold = 1;
        fixed_k.k_init = k;
        fixed_k.k_max = k;
        fixed_k.error_threshold_pct = 1e-12;
        const auto binned = select_seqpoints(trace, fixed_k);
        const auto km = kmeans_select(trace, {k, KMeansFeatures::runtime, seed, 100});
        out.require(binned.k_final == k && km.points.size() == k, "equal k");
        bin_errors.push_back(binned.achieved_error_pct);
        km_errors.push_back(km.achieved_error_pct);
        per_trace_violations += binned.achieved_error_pct > 2.0 * km.achieved_error_pct ? 1 : 0;
    }
    const double bin_g = geomean_error(bin_errors);
    const double km_g = geomean_error(km_errors);
    out.require(bin_g <= 2.0 * km_g, "binning geomean <= 2x k-means geomean");
    out.detail << bin_errors.size() << " traces, geomean error binning " << bin_g << "% vs k-means " << km_g
               << "%; per-trace binning > 2x k-means on " << per_trace_violations << " traces";
}

// 7. Determinism of synth -> select -> compare.
std::string pipeline_bytes() {
    auto spec = fx::ds2_like();
    spec.configs = fx::sweep_configs();
    spec.throughput_metric = true;
    std::string bytes;
    std::vector<ConfigTrace> inputs;
    for (const auto& t : generate_all(spec)) {
        // through the serialized form, as the CLI does
        const auto text = serialize_trace(t, TraceFormat::csv);
        bytes += text;
        inputs.push_back({parse_trace(text, TraceFormat::csv), true});
    }
    bytes += serialize_seqpoints(select_seqpoints(inputs.front().trace));
    CompareOptions opts;
    opts.reference = "cfg1";
    opts.methods = {Method::seqpoint, Method::frequent, Method::median, Method::worst, Method::prior, Method::kmeans};
    opts.stats = {{"runtime", StatKind::additive}, {"samples_per_s", StatKind::ratio}};
    const auto report = compare(inputs, opts);
    bytes += report_csv(report) + speedup_csv(report) + report_json(report).dump(2);
    return bytes;
}

void determinism(Outcome& out) {
    const auto first = pipeline_bytes();
    const auto second = pipeline_bytes();
    out.require(first == second, "byte-identical reruns");
    out.detail << first.size() << " bytes compared";
}

// 8. Sampling reduction.
void sampling_reduction(Outcome& out) {
    const auto trace = generate_trace(fx::ds2_like(), "cfg1");
    const auto set = select_seqpoints(trace);
    const double coverage = 100.0 * static_cast<double>(set.points.size()) / static_cast<double>(trace.size());
    const double err = percent_error(project_additive(set, kRuntime), total_runtime(trace));
    out.require(coverage <= 1.0, "coverage <= 1% of iterations");
    out.require(err <= 1.0, "error <= 1%");
    out.detail << set.points.size() << " of " << trace.size() << " iterations (" << coverage << "%), error " << err
               << "%";
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"1 saturation exactness", saturation},
        {"2 adaptive-loop contract", adaptive_loop},
        {"3 workload-shape fidelity", shape_fidelity},
        {"4 baseline ordering", baseline_ordering},
        {"5 speedup projection", speedup},
        {"6 k-means parity", kmeans_parity},
        {"7 determinism", determinism},
        {"8 sampling reduction", sampling_reduction},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome out;
        try {
            run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " exception: " << e.what();
        }
        std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail.str() << "\n";
        failures += out.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}

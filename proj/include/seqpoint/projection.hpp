#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "seqpoint/error.hpp"
#include "seqpoint/oracle.hpp"
#include "seqpoint/seqpoint_set.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

/// Floor applied to each error before taking a geometric mean, in
/// percentage points. Keeps the statistic defined when a projection is exact.
inline constexpr double kGeomeanFloor = 1e-6;

namespace detail {

inline double point_stat(const SeqPoint& p, std::string_view stat) {
    auto it = p.stat_values.find(std::string(stat));
    if (it == p.stat_values.end()) {
        throw ParameterError("SeqPoint at seq_len " + std::to_string(p.seq_len) + " has no stat '" +
                             std::string(stat) + "'");
    }
    return it->second;
}

} // namespace detail

/// Weighted sum over the points: w1*s1 + ... + wk*sk.
inline double project_additive(const SeqPointSet& set, std::string_view stat) {
    double sum = 0.0;
    for (const auto& p : set.points) {
        sum += static_cast<double>(p.weight) * detail::point_stat(p, stat);
    }
    return sum;
}

/// Weighted sum normalized by the total weight.
inline double project_ratio(const SeqPointSet& set, std::string_view stat) {
    const auto total = set.total_weight();
    if (total == 0) {
        throw ParameterError("cannot project a ratio over an empty SeqPoint set");
    }
    return project_additive(set, stat) / static_cast<double>(total);
}

inline double project(const SeqPointSet& set, std::string_view stat, StatKind kind) {
    return kind == StatKind::additive ? project_additive(set, stat) : project_ratio(set, stat);
}

inline double project(const SeqPointSet& set, const StatSpec& stat) { return project(set, stat.name, stat.kind); }

inline double percent_error(double predicted, double actual) {
    if (!(actual > 0.0)) {
        throw ParameterError("percent error needs a positive actual value");
    }
    return 100.0 * std::abs(predicted - actual) / actual;
}

/// Geometric mean of non-negative percent errors, each floored at
/// kGeomeanFloor.
inline double geomean_error(std::span<const double> errors) {
    if (errors.empty()) {
        throw ParameterError("geomean of an empty error list");
    }
    double log_sum = 0.0;
    bool uniform = true;
    const double first = std::max(errors.front(), kGeomeanFloor);
    for (double e : errors) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw ParameterError("geomean inputs must be finite and non-negative");
        }
        const double floored = std::max(e, kGeomeanFloor);
        uniform = uniform && floored == first;
        log_sum += std::log(floored);
    }
    // exact when every term is equal; exp(log(x)) need not round-trip
    return uniform ? first : std::exp(log_sum / static_cast<double>(errors.size()));
}

/// Reuses `set`'s representatives and weights with stat values measured on
/// `trace`. Points re-read the per-SL means; a prior-style sample re-reads
/// its iteration window.
inline SeqPointSet remeasure(const SeqPointSet& set, const EpochTrace& trace) {
    SeqPointSet out = set;
    if (set.prior) {
        const auto [warmup, count] = *set.prior;
        if (warmup + count > trace.size()) {
            throw ParameterError("trace too short for the prior sample window");
        }
        std::map<std::string, double> sums;
        sums[std::string(kRuntime)] = 0.0;
        for (std::size_t i = warmup; i < warmup + count; ++i) {
            const auto& r = trace.records()[i];
            sums[std::string(kRuntime)] += r.runtime;
            for (const auto& [name, value] : r.metrics) {
                sums[name] += value;
            }
        }
        for (auto& [name, value] : sums) {
            value /= static_cast<double>(count);
        }
        for (auto& p : out.points) {
            p.stat_values = sums;
        }
        return out;
    }
    const auto stats = sl_stats(trace);
    for (auto& p : out.points) {
        if (!stats.per_sl.contains(p.seq_len)) {
            throw ValidationError("SeqPoint seq_len " + std::to_string(p.seq_len) + " not measured in trace '" +
                                  trace.config_id() + "'");
        }
        p.stat_values = stats.stat_values(p.seq_len);
    }
    return out;
}

struct SpeedupDelta {
    double projected_change_pct = 0.0;
    double actual_change_pct = 0.0;
    /// |projected - actual| in percentage points.
    double delta = 0.0;
    double signed_delta = 0.0;
};

/// Percentage throughput change from config a to config b, with throughput
/// = (iterations * batch) / total runtime.
inline double throughput_change_pct(double iterations_a, double total_a, double iterations_b, double total_b,
                                    std::uint64_t batch_size) {
    const double batch = static_cast<double>(batch_size);
    const double thr_a = iterations_a * batch / total_a;
    const double thr_b = iterations_b * batch / total_b;
    return 100.0 * (thr_b - thr_a) / thr_a;
}

inline void check_same_selection(const SeqPointSet& a, const SeqPointSet& b) {
    if (a.method != b.method || a.prior != b.prior || a.points.size() != b.points.size()) {
        throw ParameterError("speedup needs one selection re-measured on both configs");
    }
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].seq_len != b.points[i].seq_len || a.points[i].weight != b.points[i].weight) {
            throw ParameterError("SeqPoint " + std::to_string(i) + " differs between configs (seq_len/weight)");
        }
    }
}

/// Projected throughput change between two re-measurements of one selection.
inline double projected_change_pct(const SeqPointSet& set_a, const SeqPointSet& set_b, std::uint64_t batch_size) {
    check_same_selection(set_a, set_b);
    const double n = static_cast<double>(set_a.total_weight());
    return throughput_change_pct(n, project_additive(set_a, kRuntime), n, project_additive(set_b, kRuntime),
                                 batch_size);
}

/// Projected vs actual throughput change from config a to config b. The
/// actual change comes from the full traces.
inline SpeedupDelta project_speedup_delta(const SeqPointSet& set_a, const SeqPointSet& set_b,
                                          const EpochTrace& trace_a, const EpochTrace& trace_b,
                                          std::uint64_t batch_size) {
    if (batch_size < 1) {
        throw ParameterError("batch_size must be >= 1");
    }
    SpeedupDelta out;
    out.projected_change_pct = projected_change_pct(set_a, set_b, batch_size);
    out.actual_change_pct = throughput_change_pct(
        static_cast<double>(trace_a.size()), exhaustive_oracle(trace_a, kRuntime, StatKind::additive),
        static_cast<double>(trace_b.size()), exhaustive_oracle(trace_b, kRuntime, StatKind::additive), batch_size);
    out.signed_delta = out.projected_change_pct - out.actual_change_pct;
    out.delta = std::abs(out.signed_delta);
    return out;
}

} // namespace seqpoint

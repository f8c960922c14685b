#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqpoint/error.hpp"
#include "seqpoint/oracle.hpp"
#include "seqpoint/projection.hpp"
#include "seqpoint/seqpoint_set.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

/// A contiguous SL range and the observed SLs inside it. The range is
/// [lo, hi) except for the last bin of a binning, which is [lo, hi].
struct SLBin {
    SeqLen lo = 0;
    SeqLen hi = 0;
    bool hi_inclusive = false;
    std::vector<SeqLen> member_sls;
    std::size_t iteration_count = 0;
    /// Mean runtime per iteration over every member iteration.
    double avg_runtime = 0.0;

    bool contains(SeqLen sl) const noexcept { return sl >= lo && (hi_inclusive ? sl <= hi : sl < hi); }
};

/// Splits [min_sl, max_sl] into k equal-width ranges of floor(span / k) SLs
/// (at least 1); the last range absorbs the remainder. Ranges with no
/// observed SL are dropped.
inline std::vector<SLBin> bin_sequence_lengths(const SLHistogram& hist, const SLStats& stats, std::size_t k) {
    if (k < 1) {
        throw ParameterError("bin count k must be >= 1");
    }
    if (hist.entries.empty()) {
        throw ParameterError("cannot bin an empty histogram");
    }
    const std::uint64_t span = std::uint64_t{hist.max_sl} - hist.min_sl + 1;
    const std::uint64_t width = std::max<std::uint64_t>(1, span / k);

    std::vector<SLBin> bins;
    std::uint64_t current = UINT64_MAX;
    double runtime_sum = 0.0;
    auto close = [&] {
        if (!bins.empty()) {
            bins.back().avg_runtime = runtime_sum / static_cast<double>(bins.back().iteration_count);
        }
    };
    for (const auto& [sl, count] : hist.entries) {
        const std::uint64_t idx = std::min<std::uint64_t>((sl - hist.min_sl) / width, k - 1);
        if (idx != current) {
            close();
            current = idx;
            runtime_sum = 0.0;
            SLBin bin;
            bin.lo = static_cast<SeqLen>(hist.min_sl + idx * width);
            bin.hi_inclusive = idx == k - 1;
            bin.hi = bin.hi_inclusive ? hist.max_sl : static_cast<SeqLen>(bin.lo + width);
            bins.push_back(std::move(bin));
        }
        auto& bin = bins.back();
        bin.member_sls.push_back(sl);
        bin.iteration_count += count;
        runtime_sum += stats.at(sl).mean_runtime * static_cast<double>(count);
    }
    close();
    return bins;
}

/// The member SL whose mean runtime is closest to the bin average, ties
/// going to the smaller SL. Weight is the bin's iteration count.
inline SeqPoint representative_of_bin(const SLBin& bin, const SLStats& stats) {
    if (bin.member_sls.empty()) {
        throw ParameterError("representative of an empty bin");
    }
    SeqLen best = bin.member_sls.front();
    double best_gap = std::abs(stats.at(best).mean_runtime - bin.avg_runtime);
    for (SeqLen sl : bin.member_sls) {
        const double gap = std::abs(stats.at(sl).mean_runtime - bin.avg_runtime);
        if (gap < best_gap || (gap == best_gap && sl < best)) {
            best = sl;
            best_gap = gap;
        }
    }
    return SeqPoint{best, bin.iteration_count, stats.stat_values(best)};
}

namespace detail {

inline void sort_points(std::vector<SeqPoint>& points) {
    std::sort(points.begin(), points.end(), [](const SeqPoint& a, const SeqPoint& b) { return a.seq_len < b.seq_len; });
}

inline double self_error(const SeqPointSet& set, const EpochTrace& trace) {
    return percent_error(project_additive(set, kRuntime), exhaustive_oracle(trace, kRuntime, StatKind::additive));
}

/// One point standing for the whole epoch.
inline SeqPointSet single_sl_set(Method method, SeqLen sl, const EpochTrace& trace, const SLStats& stats) {
    SeqPointSet set;
    set.method = method;
    set.points.push_back(SeqPoint{sl, trace.size(), stats.stat_values(sl)});
    set.k_final = 1;
    set.achieved_error_pct = self_error(set, trace);
    return set;
}

} // namespace detail

/// Every unique SL weighted by its iteration count.
inline SeqPointSet all_unique_seqpoints(const EpochTrace& trace) {
    const auto stats = sl_stats(trace);
    SeqPointSet set;
    for (const auto& [sl, s] : stats.per_sl) {
        set.points.push_back(SeqPoint{sl, s.count, stats.stat_values(sl)});
    }
    set.k_final = set.points.size();
    set.achieved_error_pct = detail::self_error(set, trace);
    return set;
}

/// SeqPoint selection with adaptive k.
///
/// Traces with at most n_threshold unique SLs keep every SL. Otherwise the
/// SLs are binned into k ranges starting at k_init, one representative is
/// picked per bin, and the weighted-sum projection of total runtime is
/// compared with the trace total; k grows by one until the percent error is
/// within the threshold or k reaches k_max, in which case threshold_met is
/// false.
inline SeqPointSet select_seqpoints(const EpochTrace& trace, const SelectionParams& params = {}) {
    params.validate();
    const auto hist = sl_histogram(trace);
    if (hist.unique_count() <= params.n_threshold) {
        auto set = all_unique_seqpoints(trace);
        set.params = params;
        set.k_history.emplace_back(set.k_final, set.achieved_error_pct);
        return set;
    }

    const auto stats = sl_stats(trace);
    const double actual = exhaustive_oracle(trace, kRuntime, StatKind::additive);
    const std::size_t k_max = params.k_max.value_or(std::max(hist.unique_count(), params.k_init));

    SeqPointSet set;
    set.params = params;
    for (std::size_t k = params.k_init;; ++k) {
        set.points.clear();
        for (const auto& bin : bin_sequence_lengths(hist, stats, k)) {
            set.points.push_back(representative_of_bin(bin, stats));
        }
        set.k_final = k;
        set.achieved_error_pct = percent_error(project_additive(set, kRuntime), actual);
        set.k_history.emplace_back(k, set.achieved_error_pct);
        if (set.achieved_error_pct <= params.error_threshold_pct) {
            set.threshold_met = true;
            break;
        }
        if (k >= k_max) {
            set.threshold_met = false;
            break;
        }
    }
    return set;
}

/// Most frequent SL, ties to the smaller SL.
inline SeqPointSet baseline_frequent(const EpochTrace& trace) {
    const auto hist = sl_histogram(trace);
    SeqLen best = hist.min_sl;
    std::size_t best_count = 0;
    for (const auto& [sl, count] : hist.entries) {
        if (count > best_count) {
            best = sl;
            best_count = count;
        }
    }
    return detail::single_sl_set(Method::frequent, best, trace, sl_stats(trace));
}

/// Median of the per-iteration SL multiset; the lower middle for even counts.
inline SeqPointSet baseline_median(const EpochTrace& trace) {
    const auto hist = sl_histogram(trace);
    const std::size_t target = (trace.size() - 1) / 2;
    std::size_t seen = 0;
    SeqLen median = hist.max_sl;
    for (const auto& [sl, count] : hist.entries) {
        seen += count;
        if (seen > target) {
            median = sl;
            break;
        }
    }
    return detail::single_sl_set(Method::median, median, trace, sl_stats(trace));
}

/// Single SL whose projection of `stat` (mean at that SL times the epoch
/// iteration count) is farthest from the trace total. Ties go to the smaller
/// SL. Needs the full trace; it bounds what an arbitrary pick can cost.
inline SeqPointSet baseline_worst(const EpochTrace& trace, std::string_view stat = kRuntime) {
    const auto stats = sl_stats(trace);
    const double actual = exhaustive_oracle(trace, stat, StatKind::additive);
    const double n = static_cast<double>(trace.size());
    SeqLen worst = stats.per_sl.begin()->first;
    double worst_err = -1.0;
    for (const auto& [sl, s] : stats.per_sl) {
        const double err = percent_error(s.mean(stat) * n, actual);
        if (err > worst_err) {
            worst = sl;
            worst_err = err;
        }
    }
    auto set = detail::single_sl_set(Method::worst, worst, trace, stats);
    set.worst_stat = std::string(stat);
    return set;
}

/// Contiguous sample of `sample_count` iterations after `warmup`, projected
/// as the sample mean times the epoch iteration count. The point's seq_len
/// is the sample's median SL and is descriptive only.
inline SeqPointSet baseline_prior(const EpochTrace& trace, const PriorParams& params = {}) {
    if (params.sample_count < 1) {
        throw ParameterError("prior sample_count must be >= 1");
    }
    if (params.warmup + params.sample_count > trace.size()) {
        throw ParameterError("prior needs warmup + sample_count <= " + std::to_string(trace.size()) +
                             " iterations");
    }
    std::vector<SeqLen> sls;
    for (std::size_t i = params.warmup; i < params.warmup + params.sample_count; ++i) {
        sls.push_back(trace.records()[i].seq_len);
    }
    std::nth_element(sls.begin(), sls.begin() + (sls.size() - 1) / 2, sls.end());

    SeqPointSet set;
    set.method = Method::prior;
    set.prior = params;
    set.points.push_back(SeqPoint{sls[(sls.size() - 1) / 2], trace.size(), {}});
    set = remeasure(set, trace);
    set.k_final = 1;
    set.achieved_error_pct = detail::self_error(set, trace);
    return set;
}

} // namespace seqpoint

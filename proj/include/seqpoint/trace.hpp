#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqpoint/error.hpp"

namespace seqpoint {

using SeqLen = std::uint32_t;

/// Name under which per-iteration runtime is addressed alongside metrics.
inline constexpr std::string_view kRuntime = "runtime";

/// One training iteration: its padded batch sequence length, wall time in
/// seconds, and any named per-iteration metrics.
struct IterationRecord {
    std::size_t index = 0;
    SeqLen seq_len = 0;
    double runtime = 0.0;
    std::map<std::string, double, std::less<>> metrics;

    bool operator==(const IterationRecord&) const = default;
};

/// Ordered iteration records of one training epoch under one configuration.
///
/// Construction validates every invariant; an EpochTrace that exists is
/// valid. Records are kept sorted by index, which runs 0..size()-1.
class EpochTrace {
  public:
    struct Info {
        std::string config_id;
        std::string dataset_id;
        std::uint64_t batch_size = 1;
        std::uint64_t vocab_size = 1;

        bool operator==(const Info&) const = default;
    };

    EpochTrace(std::vector<IterationRecord> records, Info info) : records_(std::move(records)), info_(std::move(info)) {
        validate();
    }

    const std::vector<IterationRecord>& records() const noexcept { return records_; }
    const Info& info() const noexcept { return info_; }
    const std::string& config_id() const noexcept { return info_.config_id; }
    const std::string& dataset_id() const noexcept { return info_.dataset_id; }
    std::uint64_t batch_size() const noexcept { return info_.batch_size; }
    std::uint64_t vocab_size() const noexcept { return info_.vocab_size; }
    std::size_t size() const noexcept { return records_.size(); }

    /// Metric names shared by every record, sorted.
    const std::vector<std::string>& metric_names() const noexcept { return metric_names_; }

    bool has_stat(std::string_view stat) const {
        return stat == kRuntime || std::binary_search(metric_names_.begin(), metric_names_.end(), stat);
    }

    /// Same records under a different configuration label.
    EpochTrace relabeled(std::string config_id) const {
        Info info = info_;
        info.config_id = std::move(config_id);
        return EpochTrace(records_, std::move(info));
    }

    bool operator==(const EpochTrace& other) const {
        return info_ == other.info_ && records_ == other.records_;
    }

  private:
    void validate() {
        if (records_.empty()) {
            throw ValidationError("trace has no records");
        }
        if (info_.batch_size < 1) {
            throw ValidationError("batch_size must be >= 1");
        }
        if (info_.vocab_size < 1) {
            throw ValidationError("vocab_size must be >= 1");
        }
        std::stable_sort(records_.begin(), records_.end(),
                         [](const IterationRecord& a, const IterationRecord& b) { return a.index < b.index; });
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (i > 0 && records_[i - 1].index == r.index) {
                throw ValidationError("duplicate index " + std::to_string(r.index));
            }
            if (r.index != i) {
                throw ValidationError("indices must be contiguous from 0; missing index " + std::to_string(i));
            }
            if (r.seq_len < 1) {
                throw ValidationError("seq_len must be ≥ 1 (index " + std::to_string(r.index) + ")");
            }
            if (!(r.runtime > 0.0) || !std::isfinite(r.runtime)) {
                throw ValidationError("runtime must be > 0 (index " + std::to_string(r.index) + ")");
            }
            for (const auto& [name, value] : r.metrics) {
                if (!std::isfinite(value)) {
                    throw ValidationError("metric " + name + " is not finite (index " + std::to_string(r.index) + ")");
                }
            }
        }
        const auto& first = records_.front().metrics;
        for (const auto& [name, value] : first) {
            if (name.empty() || name == kRuntime) {
                throw ValidationError("invalid metric name '" + name + "'");
            }
            metric_names_.push_back(name);
        }
        for (const auto& r : records_) {
            bool same = r.metrics.size() == first.size() &&
                        std::equal(r.metrics.begin(), r.metrics.end(), first.begin(),
                                   [](const auto& a, const auto& b) { return a.first == b.first; });
            if (!same) {
                throw ValidationError("record " + std::to_string(r.index) + " has a different metric set");
            }
        }
    }

    std::vector<IterationRecord> records_;
    Info info_;
    std::vector<std::string> metric_names_;
};

/// Looks up `stat` on a record: runtime or one of its metrics.
inline double stat_value(const IterationRecord& record, std::string_view stat) {
    if (stat == kRuntime) {
        return record.runtime;
    }
    auto it = record.metrics.find(stat);
    if (it == record.metrics.end()) {
        throw ParameterError("unknown stat '" + std::string(stat) + "'");
    }
    return it->second;
}

struct SLHistogram {
    std::map<SeqLen, std::size_t> entries;
    SeqLen min_sl = 0;
    SeqLen max_sl = 0;

    std::size_t unique_count() const noexcept { return entries.size(); }

    std::size_t total() const noexcept {
        std::size_t n = 0;
        for (const auto& [sl, count] : entries) {
            n += count;
        }
        return n;
    }
};

inline SLHistogram sl_histogram(const EpochTrace& trace) {
    SLHistogram hist;
    for (const auto& r : trace.records()) {
        ++hist.entries[r.seq_len];
    }
    hist.min_sl = hist.entries.begin()->first;
    hist.max_sl = hist.entries.rbegin()->first;
    return hist;
}

/// Summary of all iterations sharing one sequence length.
struct SLSummary {
    std::size_t count = 0;
    double mean_runtime = 0.0;
    double min_runtime = 0.0;
    double max_runtime = 0.0;
    std::map<std::string, double, std::less<>> metric_means;

    double mean(std::string_view stat) const {
        if (stat == kRuntime) {
            return mean_runtime;
        }
        auto it = metric_means.find(stat);
        if (it == metric_means.end()) {
            throw ParameterError("unknown stat '" + std::string(stat) + "'");
        }
        return it->second;
    }
};

struct SLStats {
    std::map<SeqLen, SLSummary> per_sl;
    std::vector<std::string> metric_names;

    const SLSummary& at(SeqLen sl) const {
        auto it = per_sl.find(sl);
        if (it == per_sl.end()) {
            throw ParameterError("sequence length " + std::to_string(sl) + " not present in trace");
        }
        return it->second;
    }

    /// Stat values of one SL keyed by name, runtime included.
    std::map<std::string, double> stat_values(SeqLen sl) const {
        const auto& s = at(sl);
        std::map<std::string, double> out;
        out.emplace(std::string(kRuntime), s.mean_runtime);
        for (const auto& [name, value] : s.metric_means) {
            out.emplace(name, value);
        }
        return out;
    }
};

/// Per-SL arithmetic means of runtime and every metric.
inline SLStats sl_stats(const EpochTrace& trace) {
    SLStats stats;
    stats.metric_names = trace.metric_names();
    std::map<std::pair<SeqLen, std::string>, std::pair<double, double>> metric_range;
    for (const auto& r : trace.records()) {
        auto [it, fresh] = stats.per_sl.try_emplace(r.seq_len);
        auto& s = it->second;
        if (fresh) {
            s.min_runtime = s.max_runtime = r.runtime;
        }
        ++s.count;
        s.mean_runtime += r.runtime;
        s.min_runtime = std::min(s.min_runtime, r.runtime);
        s.max_runtime = std::max(s.max_runtime, r.runtime);
        for (const auto& [name, value] : r.metrics) {
            s.metric_means[name] += value;
            auto [rit, first] = metric_range.try_emplace({r.seq_len, name}, value, value);
            if (!first) {
                rit->second.first = std::min(rit->second.first, value);
                rit->second.second = std::max(rit->second.second, value);
            }
        }
    }
    for (auto& [sl, s] : stats.per_sl) {
        const double n = static_cast<double>(s.count);
        // sums -> means, clamped so rounding never escapes the observed range
        s.mean_runtime = std::clamp(s.mean_runtime / n, s.min_runtime, s.max_runtime);
        for (auto& [name, value] : s.metric_means) {
            const auto& [lo, hi] = metric_range.at({sl, name});
            value = std::clamp(value / n, lo, hi);
        }
    }
    return stats;
}

} // namespace seqpoint

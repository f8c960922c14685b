#pragma once

#include <string>
#include <string_view>

#include "seqpoint/error.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

/// Additive stats project as a weighted sum (total runtime); ratio stats as
/// a weight-normalized mean (throughput, IPC).
enum class StatKind { additive, ratio };

inline std::string_view to_string(StatKind kind) { return kind == StatKind::additive ? "additive" : "ratio"; }

inline StatKind parse_stat_kind(std::string_view name) {
    if (name == "additive") {
        return StatKind::additive;
    }
    if (name == "ratio") {
        return StatKind::ratio;
    }
    throw ParameterError("unknown stat kind '" + std::string(name) + "'");
}

struct StatSpec {
    std::string name{kRuntime};
    StatKind kind = StatKind::additive;

    bool operator==(const StatSpec&) const = default;
};

/// Ground truth computed over every record of a full trace: the plain sum for
/// additive stats, the per-record mean for ratio stats.
inline double exhaustive_oracle(const EpochTrace& trace, std::string_view stat, StatKind kind) {
    if (!trace.has_stat(stat)) {
        throw ParameterError("trace has no stat '" + std::string(stat) + "'");
    }
    double sum = 0.0;
    for (const auto& r : trace.records()) {
        sum += stat_value(r, stat);
    }
    return kind == StatKind::additive ? sum : sum / static_cast<double>(trace.size());
}

inline double exhaustive_oracle(const EpochTrace& trace, const StatSpec& stat) {
    return exhaustive_oracle(trace, stat.name, stat.kind);
}

} // namespace seqpoint

#pragma once

#include <string>

#include "seqpoint/kmeans.hpp"
#include "seqpoint/selection.hpp"
#include "seqpoint/seqpoint_set.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

/// Parameters for every selection method, so one call site can run any.
struct MethodOptions {
    SelectionParams selection;
    PriorParams prior;
    KMeansParams kmeans;
    std::string worst_stat{kRuntime};
};

inline SeqPointSet select_with(Method method, const EpochTrace& trace, const MethodOptions& options = {}) {
    switch (method) {
    case Method::seqpoint: return select_seqpoints(trace, options.selection);
    case Method::frequent: return baseline_frequent(trace);
    case Method::median: return baseline_median(trace);
    case Method::worst: return baseline_worst(trace, options.worst_stat);
    case Method::prior: return baseline_prior(trace, options.prior);
    case Method::kmeans: return kmeans_select(trace, options.kmeans);
    }
    throw ParameterError("unknown method");
}

} // namespace seqpoint

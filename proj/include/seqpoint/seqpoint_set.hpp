#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqpoint/error.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

enum class Method { seqpoint, frequent, median, worst, prior, kmeans };

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::seqpoint: return "seqpoint";
    case Method::frequent: return "frequent";
    case Method::median: return "median";
    case Method::worst: return "worst";
    case Method::prior: return "prior";
    case Method::kmeans: return "kmeans";
    }
    return "?";
}

inline Method parse_method(std::string_view name) {
    for (auto m : {Method::seqpoint, Method::frequent, Method::median, Method::worst, Method::prior, Method::kmeans}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ParameterError("unknown method '" + std::string(name) + "'");
}

struct SelectionParams {
    /// At or below this many unique SLs every SL becomes a SeqPoint.
    std::size_t n_threshold = 10;
    std::size_t k_init = 5;
    double error_threshold_pct = 1.0;
    /// Unset means the number of unique SLs (never less than k_init).
    std::optional<std::size_t> k_max;

    void validate() const {
        if (n_threshold < 1) {
            throw ParameterError("n_threshold must be >= 1");
        }
        if (k_init < 1) {
            throw ParameterError("k_init must be >= 1");
        }
        if (!(error_threshold_pct > 0.0)) {
            throw ParameterError("error threshold must be > 0");
        }
        if (k_max && *k_max < k_init) {
            throw ParameterError("k_max must be >= k_init");
        }
    }

    bool operator==(const SelectionParams&) const = default;
};

struct PriorParams {
    std::size_t warmup = 0;
    std::size_t sample_count = 50;

    bool operator==(const PriorParams&) const = default;
};

enum class KMeansFeatures { runtime, metrics, runtime_metrics };

inline std::string_view to_string(KMeansFeatures f) {
    switch (f) {
    case KMeansFeatures::runtime: return "runtime";
    case KMeansFeatures::metrics: return "metrics";
    case KMeansFeatures::runtime_metrics: return "runtime+metrics";
    }
    return "?";
}

inline KMeansFeatures parse_kmeans_features(std::string_view name) {
    for (auto f : {KMeansFeatures::runtime, KMeansFeatures::metrics, KMeansFeatures::runtime_metrics}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ParameterError("unknown k-means feature set '" + std::string(name) + "'");
}

struct KMeansParams {
    std::size_t k = 5;
    KMeansFeatures features = KMeansFeatures::runtime;
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;

    bool operator==(const KMeansParams&) const = default;
};

/// A representative SL with the number of iterations it stands for and the
/// per-SL mean of every stat measured at it ("runtime" always present).
struct SeqPoint {
    SeqLen seq_len = 0;
    std::uint64_t weight = 0;
    std::map<std::string, double> stat_values;

    bool operator==(const SeqPoint&) const = default;
};

struct SeqPointSet {
    Method method = Method::seqpoint;
    std::vector<SeqPoint> points;
    SelectionParams params;
    std::optional<PriorParams> prior;
    std::optional<KMeansParams> kmeans;
    /// Stat the worst baseline maximized error over.
    std::optional<std::string> worst_stat;
    std::size_t k_final = 0;
    /// Runtime self-projection error on the trace the set was selected from.
    double achieved_error_pct = 0.0;
    /// False when the adaptive loop hit k_max above the error threshold.
    bool threshold_met = true;
    /// (k, error %) for every round of the adaptive loop.
    std::vector<std::pair<std::size_t, double>> k_history;

    std::uint64_t total_weight() const noexcept {
        std::uint64_t w = 0;
        for (const auto& p : points) {
            w += p.weight;
        }
        return w;
    }

    bool operator==(const SeqPointSet&) const = default;
};

} // namespace seqpoint

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "seqpoint/error.hpp"
#include "seqpoint/random.hpp"
#include "seqpoint/selection.hpp"
#include "seqpoint/seqpoint_set.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

namespace detail {

using Feature = std::vector<double>;

inline double sq_dist(const Feature& a, const Feature& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return d;
}

/// Per-SL feature rows (ascending SL), z-scored per column. Constant
/// columns become all-zero.
inline std::vector<Feature> sl_features(const SLStats& stats, KMeansFeatures which) {
    std::vector<std::string> columns;
    if (which != KMeansFeatures::metrics) {
        columns.emplace_back(kRuntime);
    }
    if (which != KMeansFeatures::runtime) {
        if (stats.metric_names.empty()) {
            throw ParameterError("k-means metric features requested but the trace has no metrics");
        }
        columns.insert(columns.end(), stats.metric_names.begin(), stats.metric_names.end());
    }

    std::vector<Feature> rows;
    rows.reserve(stats.per_sl.size());
    for (const auto& [sl, s] : stats.per_sl) {
        Feature row;
        for (const auto& c : columns) {
            row.push_back(s.mean(c));
        }
        rows.push_back(std::move(row));
    }
    const double n = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        double mean = 0.0;
        for (const auto& r : rows) {
            mean += r[c];
        }
        mean /= n;
        double var = 0.0;
        for (const auto& r : rows) {
            var += (r[c] - mean) * (r[c] - mean);
        }
        const double sd = std::sqrt(var / n);
        for (auto& r : rows) {
            r[c] = sd > 0.0 ? (r[c] - mean) / sd : 0.0;
        }
    }
    return rows;
}

/// k-means++ seeding: first center uniform, then each next center drawn
/// with probability proportional to squared distance from the chosen set.
inline std::vector<Feature> kmeanspp_init(const std::vector<Feature>& rows, std::size_t k, Rng& rng) {
    std::vector<Feature> centers;
    std::vector<bool> chosen(rows.size(), false);
    std::size_t first = rng.below(rows.size());
    centers.push_back(rows[first]);
    chosen[first] = true;

    std::vector<double> d2(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d2[i] = sq_dist(rows[i], centers[0]);
    }
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            total += chosen[i] ? 0.0 : d2[i];
        }
        std::size_t pick = rows.size();
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (chosen[i] || d2[i] == 0.0) {
                    continue;
                }
                cum += d2[i];
                pick = i;
                if (cum > target) {
                    break;
                }
            }
        } else {
            // remaining points coincide with centers; take the next unused one
            pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        }
        chosen[pick] = true;
        centers.push_back(rows[pick]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            d2[i] = std::min(d2[i], sq_dist(rows[i], centers.back()));
        }
    }
    return centers;
}

inline std::size_t nearest(const Feature& row, const std::vector<Feature>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(row, centers[c]);
        if (d < best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

} // namespace detail

/// Lloyd's k-means over per-SL feature vectors with seeded k-means++
/// initialization. Each cluster is represented by the member SL nearest its
/// centroid (ties to the smaller SL) weighted by the iterations of all its
/// member SLs.
inline SeqPointSet kmeans_select(const EpochTrace& trace, const KMeansParams& params = {}) {
    const auto stats = sl_stats(trace);
    const std::size_t n = stats.per_sl.size();
    if (params.k < 1 || params.k > n) {
        throw ParameterError("k-means k must be in [1, " + std::to_string(n) + "]");
    }
    if (params.max_iters < 1) {
        throw ParameterError("k-means max_iters must be >= 1");
    }

    std::vector<SeqLen> sls;
    std::vector<std::size_t> counts;
    for (const auto& [sl, s] : stats.per_sl) {
        sls.push_back(sl);
        counts.push_back(s.count);
    }
    const auto rows = detail::sl_features(stats, params.features);
    const std::size_t dims = rows.front().size();

    Rng rng(params.seed);
    auto centers = detail::kmeanspp_init(rows, params.k, rng);
    std::vector<std::size_t> assign(n, params.k);

    for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = detail::nearest(rows[i], centers);
            changed |= c != assign[i];
            assign[i] = c;
        }
        // an empty cluster takes the point farthest from its own centroid
        std::vector<std::size_t> sizes(params.k, 0);
        for (auto c : assign) {
            ++sizes[c];
        }
        for (std::size_t c = 0; c < params.k; ++c) {
            if (sizes[c] > 0) {
                continue;
            }
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = detail::sq_dist(rows[i], centers[assign[i]]);
                if (sizes[assign[i]] > 1 && d > far_d) {
                    far = i;
                    far_d = d;
                }
            }
            --sizes[assign[far]];
            assign[far] = c;
            sizes[c] = 1;
            centers[c] = rows[far];
            changed = true;
        }
        if (!changed) {
            break;
        }
        for (std::size_t c = 0; c < params.k; ++c) {
            centers[c].assign(dims, 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dims; ++d) {
                centers[assign[i]][d] += rows[i][d];
            }
        }
        for (std::size_t c = 0; c < params.k; ++c) {
            for (auto& v : centers[c]) {
                v /= static_cast<double>(sizes[c]);
            }
        }
    }

    SeqPointSet set;
    set.method = Method::kmeans;
    set.kmeans = params;
    for (std::size_t c = 0; c < params.k; ++c) {
        std::size_t rep = n;
        double rep_d = std::numeric_limits<double>::infinity();
        std::uint64_t weight = 0;
        // rows are in ascending SL order, so strict < keeps the smaller SL on ties
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i] != c) {
                continue;
            }
            weight += counts[i];
            const double d = detail::sq_dist(rows[i], centers[c]);
            if (d < rep_d) {
                rep = i;
                rep_d = d;
            }
        }
        set.points.push_back(SeqPoint{sls[rep], weight, stats.stat_values(sls[rep])});
    }
    detail::sort_points(set.points);
    set.k_final = params.k;
    set.achieved_error_pct = detail::self_error(set, trace);
    return set;
}

} // namespace seqpoint

#pragma once

#include <string>

#include <json.hpp>

#include "seqpoint/error.hpp"
#include "seqpoint/seqpoint_set.hpp"

namespace seqpoint {

inline nlohmann::ordered_json to_json(const SeqPointSet& set) {
    using json = nlohmann::ordered_json;
    json j;
    j["method"] = to_string(set.method);

    json params;
    params["n_threshold"] = set.params.n_threshold;
    params["k_init"] = set.params.k_init;
    params["error_threshold_pct"] = set.params.error_threshold_pct;
    params["k_max"] = set.params.k_max ? json(*set.params.k_max) : json(nullptr);
    if (set.prior) {
        params["warmup"] = set.prior->warmup;
        params["sample_count"] = set.prior->sample_count;
    }
    if (set.kmeans) {
        params["k"] = set.kmeans->k;
        params["features"] = to_string(set.kmeans->features);
        params["seed"] = set.kmeans->seed;
        params["max_iters"] = set.kmeans->max_iters;
    }
    if (set.worst_stat) {
        params["stat"] = *set.worst_stat;
    }
    j["params"] = std::move(params);

    j["k_final"] = set.k_final;
    j["achieved_error_pct"] = set.achieved_error_pct;
    j["threshold_met"] = set.threshold_met;
    auto history = json::array();
    for (const auto& [k, err] : set.k_history) {
        history.push_back({{"k", k}, {"error_pct", err}});
    }
    j["k_history"] = std::move(history);

    auto points = json::array();
    for (const auto& p : set.points) {
        json stats = json::object();
        for (const auto& [name, value] : p.stat_values) {
            stats[name] = value;
        }
        points.push_back({{"seq_len", p.seq_len}, {"weight", p.weight}, {"stat_values", std::move(stats)}});
    }
    j["points"] = std::move(points);
    return j;
}

inline std::string serialize_seqpoints(const SeqPointSet& set) { return to_json(set).dump(2) + "\n"; }

inline SeqPointSet seqpoints_from_json(const nlohmann::json& j) {
    try {
        SeqPointSet set;
        set.method = parse_method(j.at("method").get<std::string>());
        const auto& params = j.at("params");
        set.params.n_threshold = params.value("n_threshold", set.params.n_threshold);
        set.params.k_init = params.value("k_init", set.params.k_init);
        set.params.error_threshold_pct = params.value("error_threshold_pct", set.params.error_threshold_pct);
        if (params.contains("k_max") && !params.at("k_max").is_null()) {
            set.params.k_max = params.at("k_max").get<std::size_t>();
        }
        if (set.method == Method::prior) {
            set.prior = PriorParams{params.at("warmup").get<std::size_t>(), params.at("sample_count").get<std::size_t>()};
        }
        if (set.method == Method::kmeans) {
            set.kmeans = KMeansParams{params.at("k").get<std::size_t>(),
                                      parse_kmeans_features(params.at("features").get<std::string>()),
                                      params.at("seed").get<std::uint64_t>(), params.at("max_iters").get<std::size_t>()};
        }
        if (params.contains("stat")) {
            set.worst_stat = params.at("stat").get<std::string>();
        }
        set.k_final = j.at("k_final").get<std::size_t>();
        set.achieved_error_pct = j.at("achieved_error_pct").get<double>();
        set.threshold_met = j.value("threshold_met", true);
        if (j.contains("k_history")) {
            for (const auto& h : j.at("k_history")) {
                set.k_history.emplace_back(h.at("k").get<std::size_t>(), h.at("error_pct").get<double>());
            }
        }
        for (const auto& p : j.at("points")) {
            SeqPoint point;
            point.seq_len = p.at("seq_len").get<SeqLen>();
            point.weight = p.at("weight").get<std::uint64_t>();
            for (const auto& [name, value] : p.at("stat_values").items()) {
                point.stat_values.emplace(name, value.get<double>());
            }
            set.points.push_back(std::move(point));
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad SeqPoint set: ") + e.what());
    }
}

inline SeqPointSet parse_seqpoints(std::string_view source) {
    try {
        return seqpoints_from_json(nlohmann::json::parse(source));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
}

} // namespace seqpoint

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqpoint/error.hpp"
#include "seqpoint/oracle.hpp"
#include "seqpoint/random.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint {

enum class SLDistribution { uniform, skewed, bimodal };

/// Runtime multiplier alpha + beta * sl of one hardware configuration.
struct SynthConfig {
    std::string config_id;
    double alpha = 1.0;
    double beta = 0.0;

    double multiplier(SeqLen sl) const { return alpha + beta * static_cast<double>(sl); }

    bool operator==(const SynthConfig&) const = default;
};

struct SynthMode {
    double center = 0.0;
    double width = 1.0;

    bool operator==(const SynthMode&) const = default;
};

/// Parameters of a synthetic epoch.
///
/// SLs are drawn once per spec, so every config sees the same SL sequence.
/// Iteration i of config c runs for
///   (base_cost + per_step_cost * sl_i) * (alpha_c + beta_c * sl_i) * (1 + noise_i)
/// with noise_i ~ N(0, noise_sigma) redrawn until it is >= -0.9. Noise is
/// drawn per iteration and shared across configs.
///
/// The skewed distribution is a geometric truncated to the SL range:
/// P(min_sl + j) is proportional to exp(-skew_shape * j / span), span being
/// the number of SLs in the range. Bimodal picks a mode uniformly and rounds
/// a normal draw around it, redrawing values outside the range.
struct SynthSpec {
    std::string dataset_id = "synthetic";
    std::uint64_t batch_size = 1;
    std::uint64_t vocab_size = 1;
    std::size_t n_iterations = 1000;
    SeqLen min_sl = 1;
    SeqLen max_sl = 100;
    SLDistribution distribution = SLDistribution::uniform;
    double skew_shape = 4.0;
    std::vector<SynthMode> modes;
    double base_cost = 0.0;
    double per_step_cost = 0.001;
    double noise_sigma = 0.0;
    std::vector<SynthConfig> configs{SynthConfig{"cfg1", 1.0, 0.0}};
    std::uint64_t seed = 0;
    /// Emit iterations in ascending SL order instead of draw order.
    bool sort_by_sl = false;
    /// Add a "samples_per_s" metric (batch_size / runtime) to every record.
    bool throughput_metric = false;

    void validate() const {
        if (n_iterations < 1) {
            throw ParameterError("n_iterations must be >= 1");
        }
        if (min_sl < 1 || max_sl < min_sl) {
            throw ParameterError("sl_range must satisfy 1 <= min_sl <= max_sl");
        }
        if (batch_size < 1 || vocab_size < 1) {
            throw ParameterError("batch_size and vocab_size must be >= 1");
        }
        if (!(per_step_cost > 0.0) || !std::isfinite(per_step_cost)) {
            throw ParameterError("per_step_cost must be > 0");
        }
        if (!(base_cost >= 0.0) || !std::isfinite(base_cost)) {
            throw ParameterError("base_cost must be >= 0");
        }
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
            throw ParameterError("noise_sigma must be >= 0");
        }
        if (distribution == SLDistribution::skewed && !(skew_shape > 0.0)) {
            throw ParameterError("skewed distribution needs shape > 0");
        }
        if (distribution == SLDistribution::bimodal) {
            if (modes.empty()) {
                throw ParameterError("bimodal distribution needs at least one mode");
            }
            for (const auto& m : modes) {
                if (!(m.width > 0.0)) {
                    throw ParameterError("mode widths must be > 0");
                }
                if (m.center + 4.0 * m.width < min_sl || m.center - 4.0 * m.width > max_sl) {
                    throw ParameterError("mode centered at " + std::to_string(m.center) + " lies outside sl_range");
                }
            }
        }
        if (configs.empty()) {
            throw ParameterError("spec needs at least one config");
        }
        std::set<std::string_view> ids;
        for (const auto& c : configs) {
            if (c.config_id.empty() || !ids.insert(c.config_id).second) {
                throw ParameterError("config ids must be non-empty and unique");
            }
            // affine, so the endpoints bound it
            if (!(c.multiplier(min_sl) > 0.0) || !(c.multiplier(max_sl) > 0.0)) {
                throw ParameterError("config " + c.config_id + ": alpha + beta * sl must be > 0 over sl_range");
            }
        }
    }

    const SynthConfig& config(std::string_view id) const {
        for (const auto& c : configs) {
            if (c.config_id == id) {
                return c;
            }
        }
        throw ParameterError("unknown config '" + std::string(id) + "'");
    }
};

namespace detail {

inline SeqLen draw_sl(const SynthSpec& spec, Rng& rng) {
    const std::uint64_t span = std::uint64_t{spec.max_sl} - spec.min_sl + 1;
    switch (spec.distribution) {
    case SLDistribution::uniform:
        return static_cast<SeqLen>(spec.min_sl + rng.below(span));
    case SLDistribution::skewed: {
        // inverse CDF of the truncated geometric
        const double log_q = -spec.skew_shape / static_cast<double>(span);
        const double tail = -std::expm1(log_q * static_cast<double>(span)); // 1 - q^span
        const double u = rng.uniform();
        const double j = std::floor(std::log1p(-u * tail) / log_q);
        return static_cast<SeqLen>(spec.min_sl + std::min<std::uint64_t>(static_cast<std::uint64_t>(j), span - 1));
    }
    case SLDistribution::bimodal: {
        const auto& mode = spec.modes[rng.below(spec.modes.size())];
        while (true) {
            const double x = std::round(mode.center + mode.width * rng.normal());
            if (x >= spec.min_sl && x <= spec.max_sl) {
                return static_cast<SeqLen>(x);
            }
        }
    }
    }
    return spec.min_sl;
}

} // namespace detail

/// Draws the spec's SL sequence and per-iteration noise factors (config
/// independent), in emission order.
inline std::vector<std::pair<SeqLen, double>> draw_iterations(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<std::pair<SeqLen, double>> draws(spec.n_iterations);
    for (auto& d : draws) {
        d.first = detail::draw_sl(spec, rng);
    }
    for (auto& d : draws) {
        double noise = 0.0;
        if (spec.noise_sigma > 0.0) {
            do {
                noise = spec.noise_sigma * rng.normal();
            } while (noise < -0.9);
        }
        d.second = noise;
    }
    if (spec.sort_by_sl) {
        std::stable_sort(draws.begin(), draws.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return draws;
}

inline EpochTrace generate_trace(const SynthSpec& spec, std::string_view config_id) {
    spec.validate();
    const auto& cfg = spec.config(config_id);
    const auto draws = draw_iterations(spec);
    std::vector<IterationRecord> records;
    records.reserve(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto [sl, noise] = draws[i];
        IterationRecord r;
        r.index = i;
        r.seq_len = sl;
        r.runtime = (spec.base_cost + spec.per_step_cost * static_cast<double>(sl)) * cfg.multiplier(sl) * (1.0 + noise);
        if (spec.throughput_metric) {
            r.metrics.emplace("samples_per_s", static_cast<double>(spec.batch_size) / r.runtime);
        }
        records.push_back(std::move(r));
    }
    return EpochTrace(std::move(records), {cfg.config_id, spec.dataset_id, spec.batch_size, spec.vocab_size});
}

inline std::vector<EpochTrace> generate_all(const SynthSpec& spec) {
    std::vector<EpochTrace> out;
    for (const auto& c : spec.configs) {
        out.push_back(generate_trace(spec, c.config_id));
    }
    return out;
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    try {
        SynthSpec spec;
        spec.dataset_id = j.value("dataset_id", spec.dataset_id);
        spec.batch_size = j.value("batch_size", spec.batch_size);
        spec.vocab_size = j.value("vocab_size", spec.vocab_size);
        spec.n_iterations = j.at("n_iterations").get<std::size_t>();
        const auto& range = j.at("sl_range");
        if (!range.is_array() || range.size() != 2) {
            throw ParameterError("sl_range must be [min_sl, max_sl]");
        }
        auto lo = range[0].get<std::int64_t>();
        auto hi = range[1].get<std::int64_t>();
        if (lo < 1 || hi < lo || hi > std::numeric_limits<SeqLen>::max()) {
            throw ParameterError("sl_range must satisfy 1 <= min_sl <= max_sl");
        }
        spec.min_sl = static_cast<SeqLen>(lo);
        spec.max_sl = static_cast<SeqLen>(hi);

        const auto& dist = j.at("distribution");
        const auto type = dist.at("type").get<std::string>();
        if (type == "uniform") {
            spec.distribution = SLDistribution::uniform;
        } else if (type == "skewed") {
            spec.distribution = SLDistribution::skewed;
            spec.skew_shape = dist.at("shape").get<double>();
        } else if (type == "bimodal") {
            spec.distribution = SLDistribution::bimodal;
            for (const auto& m : dist.at("modes")) {
                spec.modes.push_back({m.at("center").get<double>(), m.at("width").get<double>()});
            }
        } else {
            throw ParameterError("unknown distribution type '" + type + "'");
        }

        const auto& model = j.at("runtime_model");
        spec.base_cost = model.value("base_cost", 0.0);
        spec.per_step_cost = model.at("per_step_cost").get<double>();
        spec.noise_sigma = model.value("noise_sigma", 0.0);

        spec.configs.clear();
        for (const auto& c : j.at("configs")) {
            spec.configs.push_back(
                {c.at("config_id").get<std::string>(), c.value("alpha", 1.0), c.value("beta", 0.0)});
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        const auto order = j.value("order", std::string("random"));
        if (order != "random" && order != "sorted") {
            throw ParameterError("order must be 'random' or 'sorted'");
        }
        spec.sort_by_sl = order == "sorted";
        spec.throughput_metric = j.value("throughput_metric", false);
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("bad synth spec: ") + e.what());
    }
}

inline nlohmann::ordered_json synth_spec_to_json(const SynthSpec& spec) {
    nlohmann::ordered_json j;
    j["dataset_id"] = spec.dataset_id;
    j["batch_size"] = spec.batch_size;
    j["vocab_size"] = spec.vocab_size;
    j["n_iterations"] = spec.n_iterations;
    j["sl_range"] = {spec.min_sl, spec.max_sl};
    nlohmann::ordered_json dist;
    switch (spec.distribution) {
    case SLDistribution::uniform: dist["type"] = "uniform"; break;
    case SLDistribution::skewed:
        dist["type"] = "skewed";
        dist["shape"] = spec.skew_shape;
        break;
    case SLDistribution::bimodal:
        dist["type"] = "bimodal";
        dist["modes"] = nlohmann::ordered_json::array();
        for (const auto& m : spec.modes) {
            dist["modes"].push_back({{"center", m.center}, {"width", m.width}});
        }
        break;
    }
    j["distribution"] = dist;
    j["runtime_model"] = {
        {"base_cost", spec.base_cost}, {"per_step_cost", spec.per_step_cost}, {"noise_sigma", spec.noise_sigma}};
    j["configs"] = nlohmann::ordered_json::array();
    for (const auto& c : spec.configs) {
        j["configs"].push_back({{"config_id", c.config_id}, {"alpha", c.alpha}, {"beta", c.beta}});
    }
    j["seed"] = spec.seed;
    j["order"] = spec.sort_by_sl ? "sorted" : "random";
    j["throughput_metric"] = spec.throughput_metric;
    return j;
}

} // namespace seqpoint

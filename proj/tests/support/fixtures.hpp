#pragma once

#include <string>
#include <vector>

#include "seqpoint/synth.hpp"
#include "seqpoint/trace.hpp"

namespace seqpoint::testing {

/// Six iterations, SLs [10,10,20,30,30,30], runtimes [1,1,2,3,3,3]. Total 13.
inline EpochTrace worked_trace(std::string config_id = "cfg1") {
    const SeqLen sls[] = {10, 10, 20, 30, 30, 30};
    const double rts[] = {1.0, 1.0, 2.0, 3.0, 3.0, 3.0};
    std::vector<IterationRecord> records;
    for (std::size_t i = 0; i < 6; ++i) {
        records.push_back({i, sls[i], rts[i], {}});
    }
    return EpochTrace(std::move(records), {std::move(config_id), "worked", 1, 1});
}

inline EpochTrace make_trace(const std::vector<SeqLen>& sls, const std::vector<double>& runtimes,
                             std::string config_id = "cfg") {
    std::vector<IterationRecord> records;
    for (std::size_t i = 0; i < sls.size(); ++i) {
        records.push_back({i, sls[i], runtimes[i], {}});
    }
    return EpochTrace(std::move(records), {std::move(config_id), "test", 1, 1});
}

/// Right-skewed SLs over a wide range, near-linear runtime, 2% noise.
inline SynthSpec ds2_like(std::uint64_t seed = 7) {
    SynthSpec s;
    s.dataset_id = "ds2like";
    s.batch_size = 16;
    s.vocab_size = 29;
    s.n_iterations = 5000;
    s.min_sl = 20;
    s.max_sl = 5000;
    s.distribution = SLDistribution::skewed;
    s.skew_shape = 3.0;
    s.base_cost = 0.05;
    s.per_step_cost = 0.0004;
    s.noise_sigma = 0.02;
    s.configs = {{"cfg1", 1.0, 0.0}};
    s.seed = seed;
    return s;
}

/// Near-uniform SLs over a short range, near-linear runtime, 2% noise.
inline SynthSpec gnmt_like(std::uint64_t seed = 11) {
    SynthSpec s;
    s.dataset_id = "gnmtlike";
    s.batch_size = 128;
    s.vocab_size = 36548;
    s.n_iterations = 5000;
    s.min_sl = 5;
    s.max_sl = 300;
    s.distribution = SLDistribution::uniform;
    s.base_cost = 0.02;
    s.per_step_cost = 0.002;
    s.noise_sigma = 0.02;
    s.configs = {{"cfg1", 1.0, 0.0}};
    s.seed = seed;
    return s;
}

/// Five configs shaped like a clock / CU / L1 / L2 sweep: cfg1 is the base,
/// the rest slow down by SL-dependent factors.
inline std::vector<SynthConfig> sweep_configs() {
    return {
        {"cfg1", 1.0, 0.0},
        {"cfg2", 1.55, 0.00012},
        {"cfg3", 1.2, 0.00055},
        {"cfg4", 1.45, -0.00006},
        {"cfg5", 1.1, 0.00002},
    };
}

} // namespace seqpoint::testing

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "seqpoint/methods.hpp"
#include "seqpoint/projection.hpp"
#include "seqpoint/synth.hpp"
#include "support/fixtures.hpp"

using namespace seqpoint;
using seqpoint::testing::worked_trace;

namespace {

SeqPointSet points(std::initializer_list<std::pair<std::uint64_t, double>> ws) {
    SeqPointSet set;
    SeqLen sl = 1;
    for (auto [w, s] : ws) {
        set.points.push_back({sl++, w, {{"runtime", s}}});
    }
    return set;
}

} // namespace

TEST_CASE("additive projection is the weighted sum", "[projection]") {
    CHECK(project_additive(points({{2, 1.0}, {1, 2.0}, {3, 3.0}}), kRuntime) == 13.0);
    CHECK(project_additive(points({{6, 3.0}}), kRuntime) == 18.0);
    CHECK_THROWS_WITH(project_additive(points({{6, 3.0}}), "ipc"), Catch::Matchers::ContainsSubstring("seq_len 1"));
}

TEST_CASE("ratio projection normalizes by total weight", "[projection]") {
    CHECK(project_ratio(points({{2, 1.0}, {4, 3.0}}), kRuntime) == Catch::Approx(14.0 / 6.0).epsilon(1e-15));
    CHECK(project_ratio(points({{2, 0.7}, {5, 0.7}, {9, 0.7}}), kRuntime) == 0.7);
    CHECK_THROWS_AS(project_ratio(SeqPointSet{}, kRuntime), ParameterError);
}

TEST_CASE("percent error", "[projection]") {
    CHECK(percent_error(13.0, 13.0) == 0.0);
    CHECK(percent_error(14.0, 13.0) == Catch::Approx(7.6923076923).epsilon(1e-10));
    CHECK(percent_error(18.0, 13.0) == Catch::Approx(38.4615384615).epsilon(1e-10));
    CHECK(percent_error(8.0, 13.0) == percent_error(18.0, 13.0));
    CHECK_THROWS_AS(percent_error(1.0, 0.0), ParameterError);
}

TEST_CASE("geomean error", "[projection]") {
    CHECK(geomean_error(std::vector<double>{1.0, 4.0}) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(geomean_error(std::vector<double>{0.37}) == Catch::Approx(0.37).epsilon(1e-14));
    CHECK(geomean_error(std::vector<double>{0.0, 4.0}) == Catch::Approx(std::sqrt(4e-6)).epsilon(1e-12));
    for (double x : {0.001, 0.11, 0.53, 12.5}) {
        CHECK(geomean_error(std::vector<double>(5, x)) == Catch::Approx(x).epsilon(1e-13));
    }
    CHECK(geomean_error(std::vector<double>{0.0, 0.0, 0.0}) == kGeomeanFloor);
    CHECK(geomean_error(std::vector<double>(7, 38.46153846153846)) == 38.46153846153846);
    CHECK_THROWS_AS(geomean_error(std::vector<double>{}), ParameterError);
    CHECK_THROWS_AS(geomean_error(std::vector<double>{-1.0}), ParameterError);
}

TEST_CASE("projection properties", "[projection][property]") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        SeqPointSet set;
        double lo = 1e300, hi = -1e300;
        const auto n = 1 + rng.below(12);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double s = 0.01 + 10.0 * rng.uniform();
            set.points.push_back({static_cast<SeqLen>(i + 1), 1 + rng.below(500), {{"runtime", s}}});
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        const double ratio = project_ratio(set, kRuntime);
        REQUIRE(ratio >= lo * (1 - 1e-15));
        REQUIRE(ratio <= hi * (1 + 1e-15));

        // power-of-two scaling is exact in floating point
        SeqPointSet scaled = set;
        for (auto& p : scaled.points) {
            p.stat_values["runtime"] *= 4.0;
        }
        REQUIRE(project_additive(scaled, kRuntime) == 4.0 * project_additive(set, kRuntime));
        REQUIRE(percent_error(project_additive(set, kRuntime), 1.0 + rng.uniform()) >= 0.0);
    }
}

TEST_CASE("saturated projection equals the exhaustive oracle", "[projection]") {
    const auto trace = generate_trace(seqpoint::testing::gnmt_like(), "cfg1");
    const auto set = all_unique_seqpoints(trace);
    const double oracle = exhaustive_oracle(trace, kRuntime, StatKind::additive);
    CHECK(std::abs(project_additive(set, kRuntime) - oracle) <= 1e-9 * oracle);
    CHECK(exhaustive_oracle(worked_trace(), kRuntime, StatKind::additive) == 13.0);
}

TEST_CASE("ratio oracle of a constant metric", "[projection]") {
    std::vector<IterationRecord> records;
    for (std::size_t i = 0; i < 10; ++i) {
        records.push_back({i, static_cast<SeqLen>(1 + i % 3), 1.0 + static_cast<double>(i), {{"ipc", 1.25}}});
    }
    const EpochTrace trace(records, {});
    CHECK(exhaustive_oracle(trace, "ipc", StatKind::ratio) == 1.25);
    CHECK(project_ratio(all_unique_seqpoints(trace), "ipc") == 1.25);
    CHECK_THROWS_AS(exhaustive_oracle(trace, "nope", StatKind::ratio), ParameterError);
}

TEST_CASE("throughput: ratio of per-iteration samples/s vs batch over projected runtime", "[projection]") {
    // Mean of batch/runtime and batch/mean(runtime) differ by Jensen's gap, so
    // the two agree when runtimes within each bin are close to each other.
    auto spec = seqpoint::testing::gnmt_like();
    spec.base_cost = 0.5;
    spec.per_step_cost = 0.0005;
    spec.noise_sigma = 0.01;
    spec.throughput_metric = true;
    const auto trace = generate_trace(spec, "cfg1");
    const auto set = select_seqpoints(trace);
    const double from_runtime = static_cast<double>(set.total_weight() * trace.batch_size()) /
                                project_additive(set, kRuntime);
    const double from_ratio = project_ratio(set, "samples_per_s");
    CHECK(percent_error(from_runtime, from_ratio) <= 1.0);
}

TEST_CASE("remeasure keeps representatives and weights", "[projection]") {
    auto spec = seqpoint::testing::gnmt_like();
    spec.configs = seqpoint::testing::sweep_configs();
    const auto a = generate_trace(spec, "cfg1");
    const auto b = generate_trace(spec, "cfg3");
    const auto set = select_seqpoints(a);
    const auto on_b = remeasure(set, b);
    REQUIRE(on_b.points.size() == set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        CHECK(on_b.points[i].seq_len == set.points[i].seq_len);
        CHECK(on_b.points[i].weight == set.points[i].weight);
        CHECK(on_b.points[i].stat_values.at("runtime") == sl_stats(b).at(set.points[i].seq_len).mean_runtime);
    }
    CHECK(remeasure(set, a) == set);

    const auto other = seqpoint::testing::make_trace({1}, {1.0});
    CHECK_THROWS_AS(remeasure(set, other), ValidationError);
}

TEST_CASE("speedup delta under identity and uniform scaling", "[projection]") {
    const auto a = worked_trace("a");
    std::vector<IterationRecord> halved = a.records();
    for (auto& r : halved) {
        r.runtime /= 2.0;
    }
    const EpochTrace b(halved, {"b", "worked", 1, 1});
    for (auto method : {Method::seqpoint, Method::frequent, Method::median, Method::worst}) {
        const auto set = select_with(method, a);
        const auto same = project_speedup_delta(set, remeasure(set, a), a, a, 4);
        CHECK(same.projected_change_pct == 0.0);
        CHECK(same.actual_change_pct == 0.0);
        CHECK(same.delta == 0.0);

        const auto d = project_speedup_delta(set, remeasure(set, b), a, b, 4);
        CHECK(d.projected_change_pct == Catch::Approx(100.0).epsilon(1e-12));
        CHECK(d.actual_change_pct == Catch::Approx(100.0).epsilon(1e-12));
        CHECK(d.delta <= 1e-9);
    }
}

TEST_CASE("speedup needs one selection on both sides", "[projection]") {
    const auto a = worked_trace();
    const auto s1 = select_seqpoints(a);
    const auto s2 = baseline_frequent(a);
    CHECK_THROWS_AS(project_speedup_delta(s1, s2, a, a, 1), ParameterError);
    auto tweaked = s1;
    tweaked.points[0].weight += 1;
    CHECK_THROWS_AS(project_speedup_delta(s1, tweaked, a, a, 1), ParameterError);
    CHECK_THROWS_AS(project_speedup_delta(s1, s1, a, a, 0), ParameterError);
}

TEST_CASE("SL-dependent sensitivity: SeqPoint tracks speedup better than single SLs", "[projection]") {
    auto spec = seqpoint::testing::ds2_like();
    spec.configs = {{"cfg1", 1.0, 0.0}, {"cfgB", 0.5, 0.001}};
    const auto a = generate_trace(spec, "cfg1");
    const auto b = generate_trace(spec, "cfgB");
    const auto sp = select_seqpoints(a);
    const auto seq = project_speedup_delta(sp, remeasure(sp, b), a, b, a.batch_size());
    CHECK(seq.delta <= 2.0);
    double worst_single = 0.0;
    for (auto method : {Method::frequent, Method::median, Method::worst}) {
        const auto set = select_with(method, a);
        worst_single = std::max(worst_single, project_speedup_delta(set, remeasure(set, b), a, b, 1).delta);
    }
    CHECK(worst_single > 10.0);
}

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "drst/metrics.hpp"
#include "drst/nn.hpp"
#include "drst/pipeline.hpp"
#include "drst/synth.hpp"

#include "oracles.hpp"

using namespace drst;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

ScenarioSpec small_spec(LoadPattern pattern, int duration_s = 60) {
    ScenarioSpec spec = preset("linear_load_periodic");
    spec.pattern = pattern;
    spec.seed = 7;
    spec.duration_s = duration_s;
    return spec;
}

std::string render(const std::vector<TraceRecord>& records) {
    std::ostringstream out;
    for (const auto& r : records) out << record_to_json(r) << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("generation is deterministic and matches the frozen golden file") {
    const auto records = generate(small_spec(LoadPattern::periodic_A, 10));
    std::ifstream in(fixture("patternA_seed7.jsonl"));
    REQUIRE(in.good());
    std::ostringstream frozen;
    frozen << in.rdbuf();
    CHECK(render(records) == frozen.str());
}

TEST_CASE("identical spec and drift give byte-identical traces") {
    DriftInjection drift{20, DriftKind::affine_shift, 2.0};
    const auto a = generate(small_spec(LoadPattern::stage_random_B), drift);
    const auto b = generate(small_spec(LoadPattern::stage_random_B), drift);
    CHECK(render(a) == render(b));
}

TEST_CASE("constant pattern with zero noise gives constant KPIs") {
    ScenarioSpec spec = small_spec(LoadPattern::constant);
    spec.stimulus.params["kpi_noise_rel"] = 0.0;
    spec.stimulus.params["load_noise_rel"] = 0.0;
    const auto records = generate(spec);
    const double first = records.front().kpis.at("throughput_mbps");
    for (const auto& rec : records)
        CHECK(rec.kpis.at("throughput_mbps") == doctest::Approx(first).epsilon(1e-12));
}

TEST_CASE("imix_rate_series: zero-noise periodic_A is an exact sinusoid") {
    LoadParams params;
    params.load_noise_rel = 0.0;
    const auto series = imix_rate_series(LoadPattern::periodic_A, 120, 1000, 3, params);
    const double mid = 0.5 * (params.rate_min + params.rate_max);
    const double amp = 0.5 * (params.rate_max - params.rate_min);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double expected =
            mid + amp * std::sin(2.0 * 3.14159265358979323846 * double(i) / params.period_samples);
        CHECK(series[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    // maximum lands at the quarter period
    const auto quarter = static_cast<std::size_t>(params.period_samples / 4.0);
    const double peak = series[quarter];
    for (double v : series) CHECK(v <= peak + 1e-9);
}

TEST_CASE("imix_rate_series: constant pattern is flat") {
    const auto series = imix_rate_series(LoadPattern::constant, 30, 1000, 1);
    for (double v : series) CHECK(v == doctest::Approx(series.front()));
}

TEST_CASE("imix_rate_series: stage_random_B matches its frozen plateau structure") {
    const auto series = imix_rate_series(LoadPattern::stage_random_B, 200, 1000, 42);
    // regression values frozen from the seeded generator
    CHECK(series[0] == doctest::Approx(5830.1007925389094).epsilon(1e-12));
    CHECK(series[0] == doctest::Approx(series[1]).epsilon(1e-12));  // plateau
    // plateaus dwell between 20 and 80 samples
    std::size_t run = 1, min_run = 1000, max_run = 0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i] == series[i - 1]) {
            ++run;
        } else {
            min_run = std::min(min_run, run);
            max_run = std::max(max_run, run);
            run = 1;
        }
    }
    CHECK(min_run >= 20);
    CHECK(max_run <= 80);
    for (double v : series) {
        CHECK(v >= 5000.0);
        CHECK(v <= 9500.0);
    }
}

TEST_CASE("load-stimulus traces are near-linear in the counters") {
    for (const auto pattern : {LoadPattern::periodic_A, LoadPattern::stage_random_B}) {
        const auto records = generate(small_spec(pattern, 400));
        std::vector<std::vector<double>> rows;
        std::vector<double> target;
        for (const auto& rec : records) {
            std::vector<double> row;
            for (const auto& [name, v] : rec.features) row.push_back(v);
            rows.push_back(std::move(row));
            target.push_back(rec.kpis.at("throughput_mbps"));
        }
        CHECK(oracle::linear_fit_r2(rows, target) >= 0.9);
    }
}

TEST_CASE("affine_shift moves feature means by a detectable margin") {
    DriftInjection drift{50, DriftKind::affine_shift, 2.0};
    ScenarioSpec spec = small_spec(LoadPattern::periodic_A, 100);
    const auto records = generate(spec, drift);
    REQUIRE(records.size() == 100);

    const auto& names = records.front().features;
    std::size_t detectable = 0;
    for (const auto& [name, v0] : names) {
        (void)v0;
        double pre_mean = 0.0, post_mean = 0.0, pre_ss = 0.0;
        for (std::size_t i = 0; i < 50; ++i) pre_mean += records[i].features.at(name);
        pre_mean /= 50.0;
        for (std::size_t i = 0; i < 50; ++i) {
            const double d = records[i].features.at(name) - pre_mean;
            pre_ss += d * d;
        }
        const double pre_std = std::sqrt(pre_ss / 50.0);
        for (std::size_t i = 50; i < 100; ++i) post_mean += records[i].features.at(name);
        post_mean /= 50.0;
        if (std::abs(post_mean - pre_mean) > 3.0 * pre_std) ++detectable;
    }
    // every feature is scaled by 1+magnitude, so the gap clears 3 sigma
    CHECK(detectable == names.size());
}

TEST_CASE("a model trained pre-drift degrades on post-drift samples") {
    DriftInjection drift{600, DriftKind::topology_swap, 1.0};
    ScenarioSpec spec = small_spec(LoadPattern::periodic_A, 1200);
    const auto records = generate(spec, drift);

    const std::vector<TraceRecord> pre(records.begin(), records.begin() + 600);
    const std::vector<TraceRecord> post(records.begin() + 600, records.end());

    const Prepared prep = prepare_training(pre, "throughput_mbps", 0.5);
    MlpConfig config;
    config.epochs = 30;
    auto [model, report] = mlp_train(prep.dataset, config);
    (void)report;
    model.schema = prep.schema;

    auto acc_on = [&](const std::vector<TraceRecord>& recs) {
        std::vector<double> pred, truth;
        for (const auto& rec : recs) {
            pred.push_back(predict_record(model, rec));
            truth.push_back(rec.kpis.at("throughput_mbps"));
        }
        return acc5log(pred, truth);
    };
    const double pre_acc = acc_on(pre);
    const double post_acc = acc_on(post);
    CHECK(pre_acc >= 0.85);
    CHECK(pre_acc - post_acc >= 0.20);
}

TEST_CASE("contention_onset lowers the capacity knee") {
    DriftInjection drift{100, DriftKind::contention_onset, 4.0};
    ScenarioSpec spec = small_spec(LoadPattern::constant, 200);
    spec.stimulus.params["kpi_noise_rel"] = 0.0;
    spec.stimulus.params["load_noise_rel"] = 0.0;
    const auto records = generate(spec, drift);
    const double pre = records[50].kpis.at("throughput_mbps");
    const double post = records[150].kpis.at("throughput_mbps");
    CHECK(post < pre);
}

TEST_CASE("invalid specs are rejected") {
    ScenarioSpec spec = small_spec(LoadPattern::periodic_A);
    spec.service.vnf_names.clear();
    CHECK_THROWS_AS(generate(spec), Error);

    ScenarioSpec bad_drift_spec = small_spec(LoadPattern::periodic_A, 10);
    DriftInjection drift{5000, DriftKind::affine_shift, 1.0};  // beyond trace length
    CHECK_THROWS_AS(generate(bad_drift_spec, drift), Error);
}

TEST_CASE("the preset catalogue has 16 named scenarios") {
    const auto names = preset_names();
    CHECK(names.size() == 16);
    for (const auto& name : names) CHECK_NOTHROW(preset(name).validate());
    CHECK_THROWS_AS(preset("unknown"), Error);
}

TEST_CASE("scenario spec JSON round-trips") {
    ScenarioSpec spec = small_spec(LoadPattern::stage_random_B);
    spec.stimulus.params["rate_min"] = 6000.0;
    const ScenarioSpec loaded = ScenarioSpec::from_json(spec.to_json());
    CHECK(loaded.to_json() == spec.to_json());

    DriftInjection drift{10, DriftKind::contention_onset, 1.5};
    const DriftInjection dloaded = DriftInjection::from_json(drift.to_json());
    CHECK(dloaded.at_sample == drift.at_sample);
    CHECK(dloaded.kind == drift.kind);
    CHECK(dloaded.magnitude == doctest::Approx(drift.magnitude));
}

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "drst/queue.hpp"
#include "drst/synth.hpp"
#include "drst/trace.hpp"

using namespace drst;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::vector<TraceRecord> two_feature_records() {
    std::vector<TraceRecord> recs;
    for (int i = 0; i < 10; ++i) {
        TraceRecord r;
        r.timestamp_ms = i * 100;
        r.features["a"] = static_cast<double>(i);
        r.features["b"] = 5.0 + 2.0 * i;
        recs.push_back(r);
    }
    return recs;
}

}  // namespace

TEST_CASE("parse_record reads the wire format") {
    const TraceRecord rec =
        parse_record(R"({"ts":1000,"f":{"llc_load":0.5},"kpi":{"throughput_mbps":900}})");
    CHECK(rec.timestamp_ms == 1000);
    CHECK(rec.features.at("llc_load") == doctest::Approx(0.5));
    CHECK(rec.kpis.at("throughput_mbps") == doctest::Approx(900.0));
}

TEST_CASE("parse_record ignores unknown keys") {
    const TraceRecord rec = parse_record(R"({"ts":5,"f":{"a":1},"extra":{"x":2}})");
    CHECK(rec.features.size() == 1);
    CHECK(rec.kpis.empty());
}

TEST_CASE("parse_record rejects non-finite features") {
    try {
        parse_record(R"({"ts":1000,"f":{"llc_load":"NaN"}})");
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_finite_value);
    }
}

TEST_CASE("parse_record rejects bad syntax") {
    try {
        parse_record("{not json");
        FAIL("expected MalformedRecord");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_record);
    }
}

TEST_CASE("golden fixture line 1 parses to the frozen record") {
    std::ifstream in(fixture("patternA_seed7.jsonl"));
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    const TraceRecord rec = parse_record(line);
    CHECK(rec.timestamp_ms == 0);
    CHECK(rec.features.size() == 45);
    // frozen values from the committed fixture
    CHECK(rec.features.at("bridge_llc_load") == doctest::Approx(30448.559522089574).epsilon(1e-12));
    CHECK(rec.kpis.at("throughput_mbps") == doctest::Approx(7326.406408111684).epsilon(1e-12));
}

TEST_CASE("fit_schema over the 100-sample fixture matches the frozen statistics") {
    // regenerate the fixture trace, fit, and compare against the committed
    // statistics file; an independent min/max scan double-checks the values
    ScenarioSpec spec = preset("linear_load_periodic");
    spec.seed = 7;
    spec.duration_s = 100;
    const auto records = generate(spec);
    const FeatureSchema schema = fit_schema(records, NormMethod::minmax);

    std::ifstream in(fixture("patternA_seed7_schema.json"));
    REQUIRE(in.good());
    std::string frozen;
    std::getline(in, frozen);
    CHECK(schema.to_json() == frozen);

    for (const auto& stat : schema.stats) {
        double lo = records.front().features.at(stat.name);
        double hi = lo;
        for (const auto& rec : records) {
            const double v = rec.features.at(stat.name);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(stat.a == lo);
        CHECK(stat.b == hi);
    }
}

TEST_CASE("fit_schema minmax basics") {
    std::vector<TraceRecord> recs(2);
    recs[0].features["a"] = 0.0;
    recs[1].features["a"] = 10.0;
    const FeatureSchema schema = fit_schema(recs, NormMethod::minmax);
    REQUIRE(schema.arity() == 1);
    CHECK(schema.stats[0].a == doctest::Approx(0.0));
    CHECK(schema.stats[0].b == doctest::Approx(10.0));
}

TEST_CASE("fit_schema rejects constant features under minmax") {
    std::vector<TraceRecord> recs(2);
    recs[0].features["a"] = 5.0;
    recs[1].features["a"] = 5.0;
    try {
        fit_schema(recs, NormMethod::minmax);
        FAIL("expected DegenerateFeature");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_feature);
    }
}

TEST_CASE("fit_schema rejects inconsistent feature sets") {
    std::vector<TraceRecord> recs(2);
    recs[0].features["a"] = 1.0;
    recs[1].features["b"] = 2.0;
    try {
        fit_schema(recs, NormMethod::minmax);
        FAIL("expected InconsistentFeatureSet");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::inconsistent_feature_set);
    }
}

TEST_CASE("schema is deterministic under record permutation") {
    auto recs = two_feature_records();
    const FeatureSchema a = fit_schema(recs, NormMethod::zscore);
    std::reverse(recs.begin(), recs.end());
    std::swap(recs[2], recs[7]);
    const FeatureSchema b = fit_schema(recs, NormMethod::zscore);
    REQUIRE(a.arity() == b.arity());
    for (std::size_t i = 0; i < a.arity(); ++i) {
        CHECK(a.stats[i].name == b.stats[i].name);
        CHECK(a.stats[i].a == b.stats[i].a);  // bit-identical
        CHECK(a.stats[i].b == b.stats[i].b);
    }
}

TEST_CASE("normalize endpoints and clamping") {
    std::vector<TraceRecord> recs(2);
    recs[0].features["a"] = 0.0;
    recs[1].features["a"] = 10.0;
    const FeatureSchema schema = fit_schema(recs, NormMethod::minmax);

    TraceRecord rec;
    rec.features["a"] = 0.0;
    CHECK(normalize(rec, schema).values[0] == doctest::Approx(0.0));
    rec.features["a"] = 7.5;
    CHECK(normalize(rec, schema).values[0] == doctest::Approx(0.75));
    rec.features["a"] = 25.0;  // live values beyond the fit range clamp
    CHECK(normalize(rec, schema).values[0] == doctest::Approx(1.0));
    rec.features["a"] = -5.0;
    CHECK(normalize(rec, schema).values[0] == doctest::Approx(0.0));
}

TEST_CASE("normalize zscore maps the mean to zero") {
    auto recs = two_feature_records();
    const FeatureSchema schema = fit_schema(recs, NormMethod::zscore);
    TraceRecord rec;
    rec.features["a"] = 4.5;  // mean of 0..9
    rec.features["b"] = 14.0;
    CHECK(normalize(rec, schema).values[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize reports missing features") {
    auto recs = two_feature_records();
    const FeatureSchema schema = fit_schema(recs, NormMethod::minmax);
    TraceRecord rec;
    rec.features["a"] = 1.0;
    try {
        normalize(rec, schema);
        FAIL("expected MissingFeature");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_feature);
    }
}

TEST_CASE("normalization round-trips within 1e-9") {
    auto recs = two_feature_records();
    for (const auto method : {NormMethod::minmax, NormMethod::zscore}) {
        const FeatureSchema schema = fit_schema(recs, method);
        for (const auto& rec : recs) {
            const auto back = denormalize(normalize(rec, schema), schema);
            for (const auto& [name, v] : rec.features)
                CHECK(back.at(name) == doctest::Approx(v).epsilon(1e-9));
        }
    }
}

TEST_CASE("schema JSON persistence round-trips") {
    auto recs = two_feature_records();
    const FeatureSchema schema = fit_schema(recs, NormMethod::minmax);
    const FeatureSchema loaded = FeatureSchema::from_json(schema.to_json());
    CHECK(loaded.to_json() == schema.to_json());
    CHECK(loaded.hash() == schema.hash());
}

TEST_CASE("sliding window keeps the last N in order") {
    SlidingWindow window(3);
    CHECK_FALSE(window.full());
    for (int i = 0; i < 7; ++i) {
        FeatureVector v;
        v.timestamp_ms = i;
        v.values = {static_cast<double>(i)};
        window.push(v);
    }
    CHECK(window.full());
    const auto snap = window.snapshot();
    REQUIRE(snap.size() == 3);
    CHECK(snap[0].timestamp_ms == 4);
    CHECK(snap[1].timestamp_ms == 5);
    CHECK(snap[2].timestamp_ms == 6);
}

TEST_CASE("bounded queue hands records across threads and drains on close") {
    BoundedQueue<int> queue(4);
    std::vector<int> received;
    std::thread consumer([&] {
        while (auto item = queue.pop()) received.push_back(*item);
    });
    for (int i = 0; i < 100; ++i) CHECK(queue.push(i));
    queue.close();
    consumer.join();
    REQUIRE(received.size() == 100);
    for (int i = 0; i < 100; ++i) CHECK(received[i] == i);  // order preserved
    CHECK_FALSE(queue.push(7));  // closed queue refuses new items
    CHECK(queue.pop() == std::nullopt);
}

TEST_CASE("replay paces records and reports jitter") {
    const std::string path = "replay_test_trace.jsonl";
    {
        std::ofstream out(path);
        out << R"({"ts":0,"f":{"a":1}})" << '\n'
            << R"({"ts":100,"f":{"a":2}})" << '\n'
            << R"({"ts":200,"f":{"a":3}})" << '\n';
    }
    std::vector<std::int64_t> seen;
    const auto t0 = std::chrono::steady_clock::now();
    const ReplaySummary summary = replay(path, 1.0, [&](const TraceRecord& r) {
        seen.push_back(r.timestamp_ms);
    });
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    CHECK(summary.records == 3);
    CHECK(seen == std::vector<std::int64_t>{0, 100, 200});
    // 10 ms jitter tolerance per gap
    CHECK(wall >= 200.0);
    CHECK(wall <= 220.0);
    CHECK(summary.max_jitter_ms <= 10.0);
    std::remove(path.c_str());
}

TEST_CASE("replay at speed 0 delivers everything immediately") {
    const std::string path = "replay_fast_trace.jsonl";
    {
        std::ofstream out(path);
        out << R"({"ts":0,"f":{"a":1}})" << "\n\n"  // blank lines are ignored
            << R"({"ts":100,"f":{"a":2}})" << '\n'
            << R"({"ts":200,"f":{"a":3}})" << '\n';
    }
    std::size_t count = 0;
    std::int64_t last = -1;
    replay(path, 0.0, [&](const TraceRecord& r) {
        CHECK(r.timestamp_ms >= last);  // delivery order is non-decreasing
        last = r.timestamp_ms;
        ++count;
    });
    CHECK(count == 3);
    std::remove(path.c_str());
}

TEST_CASE("replay rejects out-of-order timestamps with the position") {
    const std::string path = "replay_bad_trace.jsonl";
    {
        std::ofstream out(path);
        out << R"({"ts":100,"f":{"a":1}})" << '\n' << R"({"ts":50,"f":{"a":2}})" << '\n';
    }
    try {
        replay(path, 0.0, [](const TraceRecord&) {});
        FAIL("expected NonMonotonicTimestamp");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_monotonic_timestamp);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("replay reports malformed line positions") {
    const std::string path = "replay_malformed_trace.jsonl";
    {
        std::ofstream out(path);
        out << R"({"ts":100,"f":{"a":1}})" << '\n' << "{broken" << '\n';
    }
    try {
        replay(path, 0.0, [](const TraceRecord&) {});
        FAIL("expected MalformedRecord");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_record);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::remove(path.c_str());
}

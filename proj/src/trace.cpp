#include "drst/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "drst/sha256.hpp"

namespace drst {

using nlohmann::json;

const char* norm_method_name(NormMethod m) {
    return m == NormMethod::minmax ? "minmax" : "zscore";
}

NormMethod norm_method_from_name(const std::string& name) {
    if (name == "minmax") return NormMethod::minmax;
    if (name == "zscore") return NormMethod::zscore;
    fail(Errc::parse_error, "unknown normalization method '" + name + "'");
}

std::vector<std::string> FeatureSchema::names() const {
    std::vector<std::string> out;
    out.reserve(stats.size());
    for (const auto& s : stats) out.push_back(s.name);
    return out;
}

std::string FeatureSchema::to_json() const {
    json features = json::array();
    for (const auto& s : stats) {
        json f;
        f["name"] = s.name;
        if (method == NormMethod::minmax) {
            f["min"] = s.a;
            f["max"] = s.b;
        } else {
            f["mean"] = s.a;
            f["std"] = s.b;
        }
        features.push_back(f);
    }
    json doc;
    doc["method"] = norm_method_name(method);
    doc["features"] = features;
    return doc.dump();
}

FeatureSchema FeatureSchema::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("schema: ") + e.what());
    }
    FeatureSchema schema;
    schema.method = norm_method_from_name(doc.at("method").get<std::string>());
    for (const auto& f : doc.at("features")) {
        Stat s;
        s.name = f.at("name").get<std::string>();
        if (schema.method == NormMethod::minmax) {
            s.a = f.at("min").get<double>();
            s.b = f.at("max").get<double>();
        } else {
            s.a = f.at("mean").get<double>();
            s.b = f.at("std").get<double>();
        }
        schema.stats.push_back(s);
    }
    return schema;
}

std::string FeatureSchema::hash() const { return sha256_hex(to_json()); }

SlidingWindow::SlidingWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) fail(Errc::invalid_spec, "window capacity must be positive");
}

void SlidingWindow::push(FeatureVector v) {
    entries_.push_back(std::move(v));
    if (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<FeatureVector> SlidingWindow::snapshot() const {
    return {entries_.begin(), entries_.end()};
}

namespace {

double number_from(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        // strings like "NaN"/"Infinity" reach us because JSON itself cannot
        // carry non-finite numbers
        const std::string& s = v.get_ref<const std::string&>();
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (end == s.c_str() + s.size() && !s.empty()) return d;
    }
    fail(Errc::malformed_record, "value for '" + key + "' is not numeric");
}

}  // namespace

TraceRecord parse_record(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error& e) {
        fail(Errc::malformed_record, e.what());
    }
    if (!doc.is_object()) fail(Errc::malformed_record, "record is not a JSON object");
    if (!doc.contains("ts") || !doc["ts"].is_number_integer())
        fail(Errc::malformed_record, "missing integer 'ts'");
    if (!doc.contains("f") || !doc["f"].is_object())
        fail(Errc::malformed_record, "missing feature object 'f'");

    TraceRecord rec;
    rec.timestamp_ms = doc["ts"].get<std::int64_t>();
    for (const auto& [k, v] : doc["f"].items()) {
        const double d = number_from(v, k);
        if (!std::isfinite(d)) fail(Errc::non_finite_value, "feature '" + k + "'");
        rec.features[k] = d;
    }
    if (doc.contains("kpi")) {
        if (!doc["kpi"].is_object()) fail(Errc::malformed_record, "'kpi' is not an object");
        for (const auto& [k, v] : doc["kpi"].items()) {
            const double d = number_from(v, k);
            if (!std::isfinite(d)) fail(Errc::non_finite_value, "kpi '" + k + "'");
            rec.kpis[k] = d;
        }
    }
    return rec;
}

std::string record_to_json(const TraceRecord& rec) {
    json doc;
    doc["ts"] = rec.timestamp_ms;
    doc["f"] = json::object();
    for (const auto& [k, v] : rec.features) doc["f"][k] = v;
    if (!rec.kpis.empty()) {
        doc["kpi"] = json::object();
        for (const auto& [k, v] : rec.kpis) doc["kpi"][k] = v;
    }
    return doc.dump();
}

FeatureSchema fit_schema(const std::vector<TraceRecord>& records, NormMethod method) {
    if (records.size() < 2) fail(Errc::insufficient_data, "fit_schema needs >= 2 records");

    const auto& first = records.front().features;
    for (const auto& rec : records) {
        if (rec.features.size() != first.size())
            fail(Errc::inconsistent_feature_set, "feature count varies across records");
        for (const auto& [k, v] : first) {
            (void)v;
            if (rec.features.find(k) == rec.features.end())
                fail(Errc::inconsistent_feature_set, "feature '" + k + "' missing in a record");
        }
    }

    FeatureSchema schema;
    schema.method = method;
    const double n = static_cast<double>(records.size());
    for (const auto& [name, v0] : first) {
        (void)v0;
        FeatureSchema::Stat s;
        s.name = name;
        if (method == NormMethod::minmax) {
            double lo = records.front().features.at(name);
            double hi = lo;
            for (const auto& rec : records) {
                const double v = rec.features.at(name);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(hi > lo)) fail(Errc::degenerate_feature, "constant feature '" + name + "'");
            s.a = lo;
            s.b = hi;
        } else {
            // summation over sorted values keeps the statistics bit-identical
            // under any permutation of the input records
            std::vector<double> values;
            values.reserve(records.size());
            for (const auto& rec : records) values.push_back(rec.features.at(name));
            std::sort(values.begin(), values.end());
            double sum = 0.0;
            for (const double v : values) sum += v;
            const double mean = sum / n;
            double ss = 0.0;
            for (const double v : values) ss += (v - mean) * (v - mean);
            const double std_dev = std::sqrt(ss / n);
            if (std_dev <= 0.0) fail(Errc::degenerate_feature, "constant feature '" + name + "'");
            s.a = mean;
            s.b = std_dev;
        }
        schema.stats.push_back(s);
    }
    // std::map iteration is already lexicographic; keep the sort anyway as the
    // documented ordering contract
    std::sort(schema.stats.begin(), schema.stats.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    return schema;
}

FeatureVector normalize(const TraceRecord& record, const FeatureSchema& schema) {
    FeatureVector out;
    out.timestamp_ms = record.timestamp_ms;
    out.values.reserve(schema.arity());
    for (const auto& s : schema.stats) {
        const auto it = record.features.find(s.name);
        if (it == record.features.end())
            fail(Errc::missing_feature, "record lacks feature '" + s.name + "'");
        const double v = it->second;
        if (schema.method == NormMethod::minmax) {
            // out-of-range live values are clamped, not rejected; drift
            // detection is the component that reacts to them
            const double z = (v - s.a) / (s.b - s.a);
            out.values.push_back(std::clamp(z, 0.0, 1.0));
        } else {
            out.values.push_back((v - s.a) / s.b);
        }
    }
    return out;
}

std::map<std::string, double> denormalize(const FeatureVector& vec, const FeatureSchema& schema) {
    if (vec.values.size() != schema.arity())
        fail(Errc::arity_mismatch, "vector arity does not match schema");
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < schema.stats.size(); ++i) {
        const auto& s = schema.stats[i];
        if (schema.method == NormMethod::minmax) {
            out[s.name] = s.a + vec.values[i] * (s.b - s.a);
        } else {
            out[s.name] = s.a + vec.values[i] * s.b;
        }
    }
    return out;
}

ReplaySummary replay(const std::string& path, double speed,
                     const std::function<void(const TraceRecord&)>& sink) {
    if (speed < 0.0) fail(Errc::invalid_spec, "replay speed must be >= 0");
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open trace '" + path + "'");

    using clock = std::chrono::steady_clock;
    ReplaySummary summary;
    std::string line;
    std::size_t line_no = 0;
    bool have_prev = false;
    std::int64_t prev_ts = 0;
    clock::time_point prev_wall{};
    const auto start = clock::now();

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        TraceRecord rec;
        try {
            rec = parse_record(line);
        } catch (const Error& e) {
            fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (have_prev && rec.timestamp_ms < prev_ts)
            fail(Errc::non_monotonic_timestamp,
                 "line " + std::to_string(line_no) + ": ts went backwards");
        if (have_prev && speed > 0.0) {
            const double gap_ms = static_cast<double>(rec.timestamp_ms - prev_ts) / speed;
            const auto due = prev_wall + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double, std::milli>(gap_ms));
            std::this_thread::sleep_until(due);
            const double actual =
                std::chrono::duration<double, std::milli>(clock::now() - prev_wall).count();
            summary.max_jitter_ms = std::max(summary.max_jitter_ms, actual - gap_ms);
        }
        prev_wall = clock::now();
        prev_ts = rec.timestamp_ms;
        have_prev = true;
        sink(rec);
        ++summary.records;
    }
    summary.duration_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    return summary;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
    std::vector<TraceRecord> out;
    replay(path, 0.0, [&](const TraceRecord& r) { out.push_back(r); });
    return out;
}

void save_trace(const std::string& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path);
    if (!out) fail(Errc::io_error, "cannot write trace '" + path + "'");
    for (const auto& rec : records) out << record_to_json(rec) << '\n';
}

}  // namespace drst

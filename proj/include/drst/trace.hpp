#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drst/error.hpp"

namespace drst {

// One timestamped sample: counter features plus optional ground-truth KPIs.
struct TraceRecord {
    std::int64_t timestamp_ms = 0;
    std::map<std::string, double> features;
    std::map<std::string, double> kpis;

    bool has_kpi(const std::string& name) const { return kpis.count(name) != 0; }
};

enum class NormMethod { minmax, zscore };

const char* norm_method_name(NormMethod m);
NormMethod norm_method_from_name(const std::string& name);

// Fixed-order normalization schema. Ordering is lexicographic by feature
// name, so two fits over the same data always agree. `a`/`b` hold (min, max)
// under minmax and (mean, std) under zscore.
struct FeatureSchema {
    NormMethod method = NormMethod::minmax;
    struct Stat {
        std::string name;
        double a = 0.0;
        double b = 1.0;
    };
    std::vector<Stat> stats;

    std::size_t arity() const { return stats.size(); }
    std::vector<std::string> names() const;
    std::string to_json() const;
    static FeatureSchema from_json(const std::string& text);
    // digest of the canonical JSON form; models pin this at publish time
    std::string hash() const;
};

struct FeatureVector {
    std::vector<double> values;
    std::int64_t timestamp_ms = 0;
};

// Ring of the last N vectors in arrival order. Single-owner; consumers take
// snapshots.
class SlidingWindow {
public:
    explicit SlidingWindow(std::size_t capacity);

    void push(FeatureVector v);
    bool full() const { return entries_.size() == capacity_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::vector<FeatureVector> snapshot() const;
    const FeatureVector& at(std::size_t i) const { return entries_[i]; }
    void clear() { entries_.clear(); }

private:
    std::size_t capacity_;
    std::deque<FeatureVector> entries_;
};

// Parses one NDJSON wire-format line: {"ts":<int ms>,"f":{...},"kpi":{...}}.
// Unknown keys are ignored; blank lines are the caller's responsibility.
TraceRecord parse_record(const std::string& line);

std::string record_to_json(const TraceRecord& rec);

// Fits normalization statistics over >= 2 records that share one feature-name
// set. Constant features are rejected (DegenerateFeature) instead of being
// mapped to zero.
FeatureSchema fit_schema(const std::vector<TraceRecord>& records, NormMethod method);

// minmax: (v - min) / (max - min), clamped to [0, 1]; zscore: (v - mean) / std.
FeatureVector normalize(const TraceRecord& record, const FeatureSchema& schema);

// Inverse map for non-clamped values; used by round-trip checks and display.
std::map<std::string, double> denormalize(const FeatureVector& vec, const FeatureSchema& schema);

struct ReplaySummary {
    std::size_t records = 0;
    double duration_ms = 0.0;
    // worst observed overshoot of an inter-delivery gap vs the timestamp delta
    double max_jitter_ms = 0.0;
};

// Streams a trace file to `sink` in timestamp order. speed 1.0 reproduces the
// original inter-arrival gaps; 0 delivers as fast as possible. Timestamps
// that step backwards abort with NonMonotonicTimestamp.
ReplaySummary replay(const std::string& path, double speed,
                     const std::function<void(const TraceRecord&)>& sink);

// Loads a whole trace file at once (no pacing).
std::vector<TraceRecord> load_trace(const std::string& path);

void save_trace(const std::string& path, const std::vector<TraceRecord>& records);

}  // namespace drst

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drst/trace.hpp"

namespace drst {

enum class Topology { linear, dag1, dag2 };
enum class StimulusKind { load, resource, mixed };
enum class LoadPattern { constant, periodic_A, stage_random_B };

const char* topology_name(Topology t);
const char* stimulus_name(StimulusKind k);
const char* pattern_name(LoadPattern p);
Topology topology_from_name(const std::string& s);
StimulusKind stimulus_from_name(const std::string& s);
LoadPattern pattern_from_name(const std::string& s);

// One emulated measurement scenario: a service (ordered VNFs + topology)
// under a stimulus, observed at a fixed sampling interval.
struct ScenarioSpec {
    struct Service {
        std::vector<std::string> vnf_names;
        Topology topology = Topology::linear;
    };
    struct Stimulus {
        StimulusKind kind = StimulusKind::load;
        std::map<std::string, double> params;
    };

    Service service;
    Stimulus stimulus;
    LoadPattern pattern = LoadPattern::periodic_A;
    std::uint64_t seed = 0;
    int duration_s = 60;
    int interval_ms = 1000;

    std::size_t sample_count() const;
    void validate() const;
    std::string to_json() const;
    static ScenarioSpec from_json(const std::string& text);
};

enum class DriftKind { affine_shift, topology_swap, contention_onset };

const char* drift_kind_name(DriftKind k);
DriftKind drift_kind_from_name(const std::string& s);

// Switches the feature->KPI mapping from a given sample index onwards.
struct DriftInjection {
    std::size_t at_sample = 0;
    DriftKind kind = DriftKind::topology_swap;
    double magnitude = 1.0;

    std::string to_json() const;
    static DriftInjection from_json(const std::string& text);
};

// Tunables of the synthetic response, overridable through stimulus params.
// The generator keeps a documented shape: offered load drives per-VNF
// counters affinely (family-specific gain and noise reproduce the observed
// correlation ladder: cache features strong, instructions/branches medium,
// mem-stores weak, cache-misses/cycles near-noise); throughput saturates at
// a capacity knee; latency grows with the reciprocal of residual capacity;
// resource stimulus lowers the knee and inflates cache-miss counters.
struct LoadParams {
    double rate_min = 5000.0;   // Mbps of offered IMIX traffic
    double rate_max = 9500.0;
    double knee_mbps = 9000.0;  // service capacity under no contention
    double period_samples = 60.0;
    double load_noise_rel = 0.005;  // latent-load jitter, fraction of range
    double kpi_noise_rel = 0.02;    // KPI noise std, fraction of range
    double dwell_min = 20.0;        // pattern B plateau length bounds (samples)
    double dwell_max = 80.0;
    double capacity_scale = 0.55;  // knee multiplier at full contention
    double lat_base_us = 50.0;
    double lat_scale = 1.0e6;
    double lat_ceiling_us = 5000.0;

    static LoadParams from(const std::map<std::string, double>& overrides);
};

// Offered-load series for a pattern: constant level, sinusoid + jitter, or
// stage-wise random plateaus. Values stay inside [rate_min, rate_max].
std::vector<double> imix_rate_series(LoadPattern pattern, int duration_s, int interval_ms,
                                     std::uint64_t seed, const LoadParams& params = {});

// Deterministic trace generation: identical (spec, drift) give byte-identical
// traces. Records carry per-VNF counters plus throughput_mbps / latency_us
// ground truth.
std::vector<TraceRecord> generate(const ScenarioSpec& spec,
                                  const std::optional<DriftInjection>& drift = std::nullopt);

// Named scenario catalogue (topology x stimulus x pattern grid).
std::vector<std::string> preset_names();
ScenarioSpec preset(const std::string& name);

}  // namespace drst

#include "drst/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "drst/rng.hpp"

namespace drst {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// salts for independent derived streams
constexpr std::uint64_t kSaltCoeff = 0xc0efull;
constexpr std::uint64_t kSaltNoise = 0xa11ceull;
constexpr std::uint64_t kSaltContention = 0xc047ull;
constexpr std::uint64_t kSaltSwap = 0x5a90ull;

struct Family {
    const char* name;
    double slope;      // counter units per Mbps
    double base;       // idle level
    double noise_rel;  // noise std relative to slope * rate range
    double contention_gain;  // extra level at full contention, in slope*range units
};

// noise_rel sets the feature's correlation with load: strong cache features
// track the load almost exactly, cycles are dominated by other activity
const Family kFamilies[] = {
    {"cache_references", 1.2, 5.0e4, 0.05, 0.2},
    {"llc_load", 1.0, 2.0e4, 0.05, 0.5},
    {"llc_stores", 0.8, 1.0e4, 0.05, 0.5},
    {"l1_dcache_load_misses", 0.9, 3.0e4, 0.05, 0.5},
    {"instructions", 5.0, 1.0e6, 0.26, 0.0},
    {"branches", 2.0, 5.0e5, 0.26, 0.0},
    {"mem_stores", 0.5, 8.0e4, 0.6, 0.3},
    {"cache_misses", 0.1, 4.0e4, 1.1, 2.0},
    {"cycles", 0.02, 2.4e6, 3.5, 0.0},
};

struct Coeff {
    double slope;
    double base;
};

// per (topology seed, vnf, family) coefficients; topology_swap re-derives
// them with a different salt, which is what makes the swap look like a new
// service from the model's point of view
Coeff coeff_for(std::uint64_t coeff_seed, std::size_t vnf, std::size_t family) {
    Rng rng(mix_seed(mix_seed(coeff_seed, vnf), family));
    const Family& f = kFamilies[family];
    Coeff c;
    c.slope = f.slope * (0.8 + 0.4 * rng.uniform());
    c.base = f.base * (0.5 + rng.uniform());
    return c;
}

std::vector<double> plateau_series(std::size_t n, double lo, double hi, double dwell_min,
                                   double dwell_max, Rng& rng) {
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double level = rng.uniform(lo, hi);
        const auto dwell = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(dwell_min), static_cast<std::int64_t>(dwell_max)));
        for (std::size_t i = 0; i < dwell && out.size() < n; ++i) out.push_back(level);
    }
    return out;
}

}  // namespace

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::linear: return "linear";
        case Topology::dag1: return "dag1";
        case Topology::dag2: return "dag2";
    }
    return "?";
}

const char* stimulus_name(StimulusKind k) {
    switch (k) {
        case StimulusKind::load: return "load";
        case StimulusKind::resource: return "resource";
        case StimulusKind::mixed: return "mixed";
    }
    return "?";
}

const char* pattern_name(LoadPattern p) {
    switch (p) {
        case LoadPattern::constant: return "constant";
        case LoadPattern::periodic_A: return "periodic_A";
        case LoadPattern::stage_random_B: return "stage_random_B";
    }
    return "?";
}

Topology topology_from_name(const std::string& s) {
    if (s == "linear") return Topology::linear;
    if (s == "dag1") return Topology::dag1;
    if (s == "dag2") return Topology::dag2;
    fail(Errc::invalid_spec, "unknown topology '" + s + "'");
}

StimulusKind stimulus_from_name(const std::string& s) {
    if (s == "load") return StimulusKind::load;
    if (s == "resource") return StimulusKind::resource;
    if (s == "mixed") return StimulusKind::mixed;
    fail(Errc::invalid_spec, "unknown stimulus '" + s + "'");
}

LoadPattern pattern_from_name(const std::string& s) {
    if (s == "constant") return LoadPattern::constant;
    if (s == "periodic_A") return LoadPattern::periodic_A;
    if (s == "stage_random_B") return LoadPattern::stage_random_B;
    fail(Errc::invalid_spec, "unknown pattern '" + s + "'");
}

const char* drift_kind_name(DriftKind k) {
    switch (k) {
        case DriftKind::affine_shift: return "affine_shift";
        case DriftKind::topology_swap: return "topology_swap";
        case DriftKind::contention_onset: return "contention_onset";
    }
    return "?";
}

DriftKind drift_kind_from_name(const std::string& s) {
    if (s == "affine_shift") return DriftKind::affine_shift;
    if (s == "topology_swap") return DriftKind::topology_swap;
    if (s == "contention_onset") return DriftKind::contention_onset;
    fail(Errc::invalid_spec, "unknown drift kind '" + s + "'");
}

std::size_t ScenarioSpec::sample_count() const {
    return static_cast<std::size_t>(duration_s) * 1000u / static_cast<std::size_t>(interval_ms);
}

void ScenarioSpec::validate() const {
    if (service.vnf_names.empty()) fail(Errc::invalid_spec, "vnf_names must be non-empty");
    if (duration_s < 1) fail(Errc::invalid_spec, "duration_s must be >= 1");
    if (interval_ms < 1) fail(Errc::invalid_spec, "interval_ms must be >= 1");
    LoadParams p = LoadParams::from(stimulus.params);
    if (!(p.rate_max > p.rate_min) || p.rate_min <= 0.0)
        fail(Errc::invalid_spec, "rate bounds must satisfy 0 < rate_min < rate_max");
}

std::string ScenarioSpec::to_json() const {
    json doc;
    doc["service"]["vnfs"] = service.vnf_names;
    doc["service"]["topology"] = topology_name(service.topology);
    doc["stimulus"]["kind"] = stimulus_name(stimulus.kind);
    doc["stimulus"]["params"] = stimulus.params;
    doc["pattern"] = pattern_name(pattern);
    doc["seed"] = seed;
    doc["duration_s"] = duration_s;
    doc["interval_ms"] = interval_ms;
    return doc.dump(2);
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("scenario: ") + e.what());
    }
    ScenarioSpec spec;
    const auto& svc = doc.at("service");
    spec.service.vnf_names = svc.at("vnfs").get<std::vector<std::string>>();
    spec.service.topology = topology_from_name(svc.at("topology").get<std::string>());
    if (doc.contains("stimulus")) {
        spec.stimulus.kind = stimulus_from_name(doc["stimulus"].at("kind").get<std::string>());
        if (doc["stimulus"].contains("params"))
            spec.stimulus.params = doc["stimulus"]["params"].get<std::map<std::string, double>>();
    }
    spec.pattern = pattern_from_name(doc.at("pattern").get<std::string>());
    spec.seed = doc.value("seed", 0ull);
    spec.duration_s = doc.value("duration_s", 60);
    spec.interval_ms = doc.value("interval_ms", 1000);
    spec.validate();
    return spec;
}

std::string DriftInjection::to_json() const {
    json doc;
    doc["at_sample"] = at_sample;
    doc["kind"] = drift_kind_name(kind);
    doc["magnitude"] = magnitude;
    return doc.dump(2);
}

DriftInjection DriftInjection::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("drift: ") + e.what());
    }
    DriftInjection d;
    d.at_sample = doc.at("at_sample").get<std::size_t>();
    d.kind = drift_kind_from_name(doc.at("kind").get<std::string>());
    d.magnitude = doc.at("magnitude").get<double>();
    if (d.magnitude <= 0.0) fail(Errc::invalid_spec, "drift magnitude must be > 0");
    return d;
}

LoadParams LoadParams::from(const std::map<std::string, double>& overrides) {
    LoadParams p;
    auto get = [&](const char* key, double& slot) {
        auto it = overrides.find(key);
        if (it != overrides.end()) slot = it->second;
    };
    get("rate_min", p.rate_min);
    get("rate_max", p.rate_max);
    get("knee_mbps", p.knee_mbps);
    get("period_samples", p.period_samples);
    get("load_noise_rel", p.load_noise_rel);
    get("kpi_noise_rel", p.kpi_noise_rel);
    get("dwell_min", p.dwell_min);
    get("dwell_max", p.dwell_max);
    get("capacity_scale", p.capacity_scale);
    get("lat_base_us", p.lat_base_us);
    get("lat_scale", p.lat_scale);
    get("lat_ceiling_us", p.lat_ceiling_us);
    return p;
}

std::vector<double> imix_rate_series(LoadPattern pattern, int duration_s, int interval_ms,
                                     std::uint64_t seed, const LoadParams& params) {
    if (duration_s < 1 || interval_ms < 1) fail(Errc::invalid_spec, "bad duration/interval");
    const auto n = static_cast<std::size_t>(duration_s) * 1000u / static_cast<std::size_t>(interval_ms);
    const double range = params.rate_max - params.rate_min;
    const double mid = 0.5 * (params.rate_min + params.rate_max);
    const double amp = 0.5 * range;
    Rng rng(mix_seed(seed, kSaltNoise));

    std::vector<double> out;
    out.reserve(n);
    switch (pattern) {
        case LoadPattern::constant:
            out.assign(n, mid);
            break;
        case LoadPattern::periodic_A:
            for (std::size_t i = 0; i < n; ++i) {
                double v = mid + amp * std::sin(2.0 * kPi * static_cast<double>(i) / params.period_samples);
                v += rng.gaussian(0.0, params.load_noise_rel * range);
                out.push_back(std::clamp(v, params.rate_min, params.rate_max));
            }
            break;
        case LoadPattern::stage_random_B:
            out = plateau_series(n, params.rate_min, params.rate_max, params.dwell_min,
                                 params.dwell_max, rng);
            break;
    }
    return out;
}

std::vector<TraceRecord> generate(const ScenarioSpec& spec,
                                  const std::optional<DriftInjection>& drift) {
    spec.validate();
    const LoadParams params = LoadParams::from(spec.stimulus.params);
    const std::size_t n = spec.sample_count();
    if (drift && drift->at_sample >= n)
        fail(Errc::invalid_spec, "drift at_sample beyond trace length");
    if (drift && drift->magnitude <= 0.0) fail(Errc::invalid_spec, "drift magnitude must be > 0");

    const std::size_t n_vnf = spec.service.vnf_names.size();
    const std::size_t n_fam = std::size(kFamilies);
    const double range = params.rate_max - params.rate_min;

    const std::uint64_t topo_salt = 1000 + static_cast<std::uint64_t>(spec.service.topology);
    const std::uint64_t coeff_seed = mix_seed(mix_seed(spec.seed, kSaltCoeff), topo_salt);
    std::uint64_t post_coeff_seed = coeff_seed;
    if (drift && drift->kind == DriftKind::topology_swap) {
        post_coeff_seed =
            mix_seed(coeff_seed, kSaltSwap + static_cast<std::uint64_t>(std::llround(drift->magnitude)));
    }

    std::vector<Coeff> pre(n_vnf * n_fam), post(n_vnf * n_fam);
    for (std::size_t v = 0; v < n_vnf; ++v) {
        for (std::size_t f = 0; f < n_fam; ++f) {
            pre[v * n_fam + f] = coeff_for(coeff_seed, v, f);
            post[v * n_fam + f] = coeff_for(post_coeff_seed, v, f);
        }
    }

    const std::vector<double> load =
        imix_rate_series(spec.pattern, spec.duration_s, spec.interval_ms, spec.seed, params);

    // contention level in [0,1]; zero under pure load stimulus
    std::vector<double> contention(n, 0.0);
    if (spec.stimulus.kind != StimulusKind::load) {
        Rng crng(mix_seed(spec.seed, kSaltContention));
        contention = plateau_series(n, 0.0, 1.0, params.dwell_min, params.dwell_max, crng);
    }

    Rng noise(mix_seed(spec.seed, mix_seed(kSaltNoise, 0x7eaceull)));

    std::vector<TraceRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool drifted = drift && i >= drift->at_sample;
        double cont = contention[i];
        if (drifted && drift->kind == DriftKind::contention_onset)
            cont = std::clamp(cont + std::min(1.0, 0.25 * drift->magnitude), 0.0, 1.0);
        const auto& coeffs = (drifted && drift->kind == DriftKind::topology_swap) ? post : pre;
        const double scale =
            (drifted && drift->kind == DriftKind::affine_shift) ? 1.0 + drift->magnitude : 1.0;

        TraceRecord rec;
        rec.timestamp_ms = static_cast<std::int64_t>(i) * spec.interval_ms;
        for (std::size_t v = 0; v < n_vnf; ++v) {
            for (std::size_t f = 0; f < n_fam; ++f) {
                const Family& fam = kFamilies[f];
                const Coeff& c = coeffs[v * n_fam + f];
                const double unit = fam.slope * range;  // family signal scale
                double value = c.base + c.slope * load[i] + fam.contention_gain * unit * cont +
                               noise.gaussian(0.0, fam.noise_rel * unit);
                value = std::max(0.0, value * scale);
                rec.features[spec.service.vnf_names[v] + "_" + fam.name] = value;
            }
        }

        const double knee = params.knee_mbps * (1.0 - (1.0 - params.capacity_scale) * cont);
        const double thr_noise = noise.gaussian(0.0, params.kpi_noise_rel * range);
        const double lat_noise = noise.gaussian(0.0, params.kpi_noise_rel);
        const double throughput = std::max(1.0, std::min(load[i], knee) + thr_noise);
        const double residual = std::max(knee - load[i], 0.03 * params.knee_mbps);
        double latency = params.lat_base_us + params.lat_scale / residual;
        latency = std::min(latency, params.lat_ceiling_us) * std::max(0.05, 1.0 + lat_noise);
        rec.kpis["throughput_mbps"] = throughput;
        rec.kpis["latency_us"] = latency;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

ScenarioSpec make_preset(Topology topo, StimulusKind stim, LoadPattern pattern) {
    ScenarioSpec spec;
    switch (topo) {
        case Topology::linear:
            spec.service.vnf_names = {"bridge", "firewall", "ndpi_stat", "nf_router", "payload_scan"};
            break;
        case Topology::dag1:
            spec.service.vnf_names = {"bridge", "firewall", "ndpi_stat", "payload_scan", "flow_tracker"};
            break;
        case Topology::dag2:
            spec.service.vnf_names = {"bridge",        "nf_router",    "payload_scan",
                                      "flow_tracker",  "firewall",     "ndpi_stat"};
            break;
    }
    spec.service.topology = topo;
    spec.stimulus.kind = stim;
    spec.pattern = pattern;
    spec.seed = 1;
    spec.duration_s = 600;
    spec.interval_ms = 1000;
    return spec;
}

const std::pair<const char*, ScenarioSpec> kPresetTable[] = {
    {"linear_load_constant", make_preset(Topology::linear, StimulusKind::load, LoadPattern::constant)},
    {"linear_load_periodic", make_preset(Topology::linear, StimulusKind::load, LoadPattern::periodic_A)},
    {"linear_load_stage", make_preset(Topology::linear, StimulusKind::load, LoadPattern::stage_random_B)},
    {"linear_resource_periodic", make_preset(Topology::linear, StimulusKind::resource, LoadPattern::periodic_A)},
    {"linear_resource_stage", make_preset(Topology::linear, StimulusKind::resource, LoadPattern::stage_random_B)},
    {"linear_mixed_periodic", make_preset(Topology::linear, StimulusKind::mixed, LoadPattern::periodic_A)},
    {"linear_mixed_stage", make_preset(Topology::linear, StimulusKind::mixed, LoadPattern::stage_random_B)},
    {"dag1_load_periodic", make_preset(Topology::dag1, StimulusKind::load, LoadPattern::periodic_A)},
    {"dag1_load_stage", make_preset(Topology::dag1, StimulusKind::load, LoadPattern::stage_random_B)},
    {"dag1_resource_periodic", make_preset(Topology::dag1, StimulusKind::resource, LoadPattern::periodic_A)},
    {"dag1_resource_stage", make_preset(Topology::dag1, StimulusKind::resource, LoadPattern::stage_random_B)},
    {"dag1_mixed_stage", make_preset(Topology::dag1, StimulusKind::mixed, LoadPattern::stage_random_B)},
    {"dag2_load_periodic", make_preset(Topology::dag2, StimulusKind::load, LoadPattern::periodic_A)},
    {"dag2_load_stage", make_preset(Topology::dag2, StimulusKind::load, LoadPattern::stage_random_B)},
    {"dag2_resource_stage", make_preset(Topology::dag2, StimulusKind::resource, LoadPattern::stage_random_B)},
    {"dag2_mixed_periodic", make_preset(Topology::dag2, StimulusKind::mixed, LoadPattern::periodic_A)},
};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, spec] : kPresetTable) {
        (void)spec;
        out.emplace_back(name);
    }
    return out;
}

ScenarioSpec preset(const std::string& name) {
    for (const auto& [key, spec] : kPresetTable) {
        if (name == key) return spec;
    }
    fail(Errc::invalid_spec, "unknown preset '" + name + "'");
}

}  // namespace drst

#include "drst/pipeline.hpp"

#include <algorithm>

namespace drst {

FeatureSchema fit_schema_subset(const std::vector<TraceRecord>& records,
                                const std::vector<std::string>& names, NormMethod method) {
    std::vector<TraceRecord> restricted;
    restricted.reserve(records.size());
    for (const auto& rec : records) {
        TraceRecord r;
        r.timestamp_ms = rec.timestamp_ms;
        for (const auto& name : names) {
            const auto it = rec.features.find(name);
            if (it == rec.features.end())
                fail(Errc::missing_feature, "record lacks feature '" + name + "'");
            r.features[name] = it->second;
        }
        restricted.push_back(std::move(r));
    }
    return fit_schema(restricted, method);
}

Dataset normalized_dataset(const std::vector<TraceRecord>& records, const FeatureSchema& schema,
                           const std::string& kpi) {
    Dataset data;
    for (const auto& rec : records) {
        const auto it = rec.kpis.find(kpi);
        if (it == rec.kpis.end()) continue;
        data.inputs.push_back(normalize(rec, schema).values);
        data.targets.push_back(it->second);
    }
    return data;
}

Prepared prepare_training(const std::vector<TraceRecord>& records, const std::string& kpi,
                          double threshold, std::size_t max_features, NormMethod method) {
    Prepared out;
    out.relevance = select(records, kpi, threshold);
    std::vector<std::string> keep = out.relevance.selected;
    if (keep.empty()) fail(Errc::empty_data, "no feature exceeded the relevance threshold");
    if (max_features > 0 && keep.size() > max_features) keep.resize(max_features);
    out.schema = fit_schema_subset(records, keep, method);
    out.dataset = normalized_dataset(records, out.schema, kpi);
    if (out.dataset.size() == 0) fail(Errc::missing_kpi, "no record carries KPI '" + kpi + "'");
    return out;
}

WindowDataset windows_from_trace(const std::vector<TraceRecord>& records,
                                 const FeatureSchema& schema, const std::string& kpi,
                                 int input_window, int horizon) {
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        const auto it = rec.kpis.find(kpi);
        if (it == rec.kpis.end())
            fail(Errc::missing_kpi, "windowed trace needs the KPI on every record");
        rows.push_back(normalize(rec, schema).values);
        targets.push_back(it->second);
    }
    return make_supervised(rows, targets, input_window, horizon);
}

double predict_record(const MlpModel& model, const TraceRecord& record) {
    if (!model.schema) fail(Errc::invalid_spec, "model carries no schema");
    const FeatureVector v = normalize(record, *model.schema);
    return mlp_forward(model, v.values);
}

}  // namespace drst

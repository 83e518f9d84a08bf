#pragma once

#include <string>
#include <vector>

#include "drst/feature_select.hpp"
#include "drst/lstm.hpp"
#include "drst/nn.hpp"
#include "drst/trace.hpp"

namespace drst {

// Trace -> model-ready data: rank features against the KPI, freeze a
// normalization schema over the retained ones, and emit aligned inputs and
// targets. The schema keeps fit_schema's lexicographic ordering.
struct Prepared {
    FeatureSchema schema;
    RelevanceReport relevance;
    Dataset dataset;  // normalized rows + raw KPI targets, labeled records only
};

Prepared prepare_training(const std::vector<TraceRecord>& records, const std::string& kpi,
                          double threshold, std::size_t max_features = 0,
                          NormMethod method = NormMethod::minmax);

// Normalization statistics for an explicit feature subset.
FeatureSchema fit_schema_subset(const std::vector<TraceRecord>& records,
                                const std::vector<std::string>& names, NormMethod method);

// Normalized rows and KPI series for records that carry the KPI.
Dataset normalized_dataset(const std::vector<TraceRecord>& records, const FeatureSchema& schema,
                           const std::string& kpi);

WindowDataset windows_from_trace(const std::vector<TraceRecord>& records,
                                 const FeatureSchema& schema, const std::string& kpi,
                                 int input_window, int horizon);

// Normalize with the model's embedded schema and run inference.
double predict_record(const MlpModel& model, const TraceRecord& record);

}  // namespace drst

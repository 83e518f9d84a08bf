#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drst/trace.hpp"

namespace drst {

// Sample Pearson correlation coefficient. Both sequences must be non-constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Binned plug-in mutual information estimate in bits: equal-width histograms
// over each variable's observed range, MI = sum p(i,j) log2(p(i,j)/(p(i)p(j))).
double mutual_info(const std::vector<double>& x, const std::vector<double>& y, int bins);

struct RelevanceReport {
    struct Entry {
        double pearson_r = 0.0;
        double mutual_info_bits = 0.0;
        std::optional<std::string> error;  // set when the statistic was not computable
    };
    std::map<std::string, Entry> per_feature;
    std::vector<std::string> selected;  // by |pearson_r| descending, ties lexicographic
    double threshold = 0.5;
    std::string kpi;

    std::string to_json() const;
};

// Ranks every feature against the named KPI and retains those with
// |pearson_r| > threshold. Mutual information is reported as advisory.
RelevanceReport select(const std::vector<TraceRecord>& records, const std::string& kpi_name,
                       double threshold, int mi_bins = 16);

}  // namespace drst

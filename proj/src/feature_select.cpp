#include "drst/feature_select.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace drst {

using nlohmann::json;

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(Errc::length_mismatch, "pearson: sizes differ");
    if (x.size() < 2) fail(Errc::length_mismatch, "pearson: need >= 2 samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) fail(Errc::constant_input, "pearson: constant sequence");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

namespace {

// equal-width bin index over [lo, hi]; the top edge folds into the last bin
int bin_of(double v, double lo, double hi, int bins) {
    if (hi <= lo) return 0;
    const int b = static_cast<int>(static_cast<double>(bins) * (v - lo) / (hi - lo));
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

double mutual_info(const std::vector<double>& x, const std::vector<double>& y, int bins) {
    if (x.size() != y.size()) fail(Errc::length_mismatch, "mutual_info: sizes differ");
    if (bins < 2) fail(Errc::invalid_spec, "mutual_info: bins must be >= 2");
    if (x.size() < static_cast<std::size_t>(bins))
        fail(Errc::length_mismatch, "mutual_info: need at least `bins` samples");

    const auto [x_lo_it, x_hi_it] = std::minmax_element(x.begin(), x.end());
    const auto [y_lo_it, y_hi_it] = std::minmax_element(y.begin(), y.end());
    const double x_lo = *x_lo_it, x_hi = *x_hi_it;
    const double y_lo = *y_lo_it, y_hi = *y_hi_it;

    std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
    std::vector<double> px(bins, 0.0), py(bins, 0.0);
    const double w = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int bx = bin_of(x[i], x_lo, x_hi, bins);
        const int by = bin_of(y[i], y_lo, y_hi, bins);
        joint[static_cast<std::size_t>(bx) * bins + by] += w;
        px[bx] += w;
        py[by] += w;
    }

    // terms are grouped by unordered bin pair so the accumulation order is
    // invariant under swapping x and y (bit-exact symmetry)
    auto term = [&](int i, int j) {
        const double pij = joint[static_cast<std::size_t>(i) * bins + j];
        return pij > 0.0 ? pij * std::log2(pij / (px[i] * py[j])) : 0.0;
    };
    double mi = 0.0;
    for (int i = 0; i < bins; ++i) {
        mi += term(i, i);
        for (int j = i + 1; j < bins; ++j) mi += term(i, j) + term(j, i);
    }
    return std::max(0.0, mi);
}

std::string RelevanceReport::to_json() const {
    json doc;
    doc["kpi"] = kpi;
    doc["threshold"] = threshold;
    doc["selected"] = selected;
    json feats = json::object();
    for (const auto& [name, e] : per_feature) {
        json entry;
        entry["pearson_r"] = e.pearson_r;
        entry["mutual_info_bits"] = e.mutual_info_bits;
        if (e.error) entry["error"] = *e.error;
        feats[name] = entry;
    }
    doc["features"] = feats;
    return doc.dump(2);
}

RelevanceReport select(const std::vector<TraceRecord>& records, const std::string& kpi_name,
                       double threshold, int mi_bins) {
    RelevanceReport report;
    report.threshold = threshold;
    report.kpi = kpi_name;

    std::vector<double> kpi;
    kpi.reserve(records.size());
    for (const auto& rec : records) {
        const auto it = rec.kpis.find(kpi_name);
        if (it == rec.kpis.end())
            fail(Errc::missing_kpi, "record lacks KPI '" + kpi_name + "'");
        kpi.push_back(it->second);
    }
    if (records.empty()) fail(Errc::empty_data, "select: no records");

    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [name, v0] : records.front().features) {
        (void)v0;
        std::vector<double> x;
        x.reserve(records.size());
        for (const auto& rec : records) {
            const auto it = rec.features.find(name);
            if (it == rec.features.end())
                fail(Errc::inconsistent_feature_set, "feature '" + name + "' missing");
            x.push_back(it->second);
        }
        RelevanceReport::Entry entry;
        try {
            entry.pearson_r = pearson(x, kpi);
            if (std::abs(entry.pearson_r) > threshold)
                ranked.emplace_back(std::abs(entry.pearson_r), name);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        // MI is advisory; a failed estimate never vetoes retention
        try {
            entry.mutual_info_bits = mutual_info(x, kpi, mi_bins);
        } catch (const Error& e) {
            if (!entry.error) entry.error = e.what();
        }
        report.per_feature.emplace(name, std::move(entry));
    }

    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (const auto& [r, name] : ranked) {
        (void)r;
        report.selected.push_back(name);
    }
    return report;
}

}  // namespace drst

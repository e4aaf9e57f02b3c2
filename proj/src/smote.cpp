#include "defplan/smote.hpp"

#include <algorithm>
#include <cmath>

#include "defplan/errors.hpp"
#include "defplan/rng.hpp"

namespace defplan {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

}  // namespace

std::vector<MetricRecord> smote(const std::vector<MetricRecord>& records,
                                const SmoteConfig& config) {
    if (config.k_neighbors < 1) throw ContractError("smote: k_neighbors must be >= 1");
    if (config.target_ratio <= 0.0 || config.target_ratio > 1.0)
        throw ContractError("smote: target_ratio must be in (0, 1]");

    std::vector<size_t> defective, clean;
    for (size_t i = 0; i < records.size(); ++i)
        (records[i].defective() ? defective : clean).push_back(i);
    if (defective.empty() || clean.empty())
        throw DataError("smote: both classes must be present");

    const bool minority_defective = defective.size() <= clean.size();
    const auto& minority = minority_defective ? defective : clean;
    const auto& majority = minority_defective ? clean : defective;
    if (minority.size() < 2)
        throw DataError("smote: minority class needs at least 2 records to interpolate");

    const size_t target =
        static_cast<size_t>(std::lround(config.target_ratio * static_cast<double>(majority.size())));
    std::vector<MetricRecord> out = records;
    if (target <= minority.size()) return out;
    size_t needed = target - minority.size();

    // k nearest minority neighbors of each minority point, by index order on ties.
    const size_t k = std::min<size_t>(config.k_neighbors, minority.size() - 1);
    std::vector<std::vector<size_t>> neighbors(minority.size());
    for (size_t i = 0; i < minority.size(); ++i) {
        std::vector<std::pair<double, size_t>> dist;
        for (size_t j = 0; j < minority.size(); ++j) {
            if (j == i) continue;
            dist.emplace_back(squared_distance(records[minority[i]].metrics,
                                               records[minority[j]].metrics),
                              j);
        }
        std::sort(dist.begin(), dist.end());
        for (size_t n = 0; n < k; ++n) neighbors[i].push_back(dist[n].second);
    }

    Rng rng(config.seed);
    size_t cursor = 0;
    for (size_t s = 0; s < needed; ++s, cursor = (cursor + 1) % minority.size()) {
        const MetricRecord& a = records[minority[cursor]];
        const MetricRecord& b =
            records[minority[neighbors[cursor][rng.uniform_index(neighbors[cursor].size())]]];
        double u = rng.uniform();
        MetricRecord synth;
        synth.file_name = a.file_name + "#synth" + std::to_string(s);
        synth.metrics.resize(kNumMetrics);
        for (size_t f = 0; f < kNumMetrics; ++f)
            synth.metrics[f] = a.metrics[f] + u * (b.metrics[f] - a.metrics[f]);
        synth.bug_count = minority_defective ? 1 : 0;
        out.push_back(std::move(synth));
    }
    return out;
}

}  // namespace defplan

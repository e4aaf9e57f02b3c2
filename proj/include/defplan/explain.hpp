#pragma once

#include <cstdint>
#include <vector>

#include "defplan/data.hpp"
#include "defplan/discretize.hpp"
#include "defplan/learners.hpp"

namespace defplan {

struct ExplanationEntry {
    int feature = -1;
    double weight = 0.0;       // positive pushes toward "defective"
    double interval_lo = 0.0;  // the instance's current discretized bin
    double interval_hi = 1.0;
};

struct Explanation {
    std::vector<ExplanationEntry> entries;  // one per binned feature, feature order
    std::vector<double> instance;
    double predicted_defect_probability = 0.0;
};

struct LimeConfig {
    int n_samples = 5000;
    double kernel_width = 0.0;  // <= 0 means 0.75 * sqrt(n_features)
    int k_features = static_cast<int>(kNumMetrics);
    uint64_t seed = 0;
};

// Training-set statistics the sampler draws from: per-feature bin frequencies.
struct TrainStats {
    std::vector<std::vector<double>> bin_frequency;  // [feature][bin], sums to 1

    static TrainStats fit(const std::vector<MetricRecord>& normalized_records,
                          const BinScheme& bins);
};

// Tabular LIME: indicator-space perturbation sampling, exponential similarity
// kernel, forward-selection lasso path, weighted least squares fit.
Explanation explain_instance(const ProbabilityFn& model, const std::vector<double>& instance,
                             const BinScheme& bins, const TrainStats& stats,
                             const LimeConfig& config);

}  // namespace defplan

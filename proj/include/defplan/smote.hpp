#pragma once

#include <cstdint>
#include <vector>

#include "defplan/data.hpp"

namespace defplan {

struct SmoteConfig {
    int k_neighbors = 5;
    double target_ratio = 1.0;  // minority/majority after balancing
    uint64_t seed = 0;
};

// Oversample the minority class with synthetic convex combinations of
// nearest minority neighbors. Input records must be normalized.
std::vector<MetricRecord> smote(const std::vector<MetricRecord>& records,
                                const SmoteConfig& config);

}  // namespace defplan

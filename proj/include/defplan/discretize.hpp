#pragma once

#include <vector>

#include "defplan/data.hpp"

namespace defplan {

// Fayyad-Irani MDLP cut points; empty when no split passes the MDL rule.
std::vector<double> fayyad_irani(const std::vector<double>& values,
                                 const std::vector<bool>& labels);

// 25/50/75th percentile cuts (linear interpolation), duplicates collapsed.
std::vector<double> quartile_cuts(const std::vector<double>& values);

// Per-feature binning over [0,1]. Features with no cuts have a single bin
// and are treated as unexplainable downstream.
class BinScheme {
  public:
    BinScheme() : cuts_(kNumMetrics) {}

    // MDLP per feature, quartile fallback when MDLP yields nothing.
    static BinScheme fit(const std::vector<MetricRecord>& normalized_records);

    void set_cuts(size_t feature, std::vector<double> cuts);
    const std::vector<double>& cuts(size_t feature) const { return cuts_[feature]; }
    size_t n_bins(size_t feature) const { return cuts_[feature].size() + 1; }
    bool binned(size_t feature) const { return !cuts_[feature].empty(); }

    size_t bin_of(size_t feature, double value) const;
    // [lo, hi] of one bin, outer boundaries at 0 and 1.
    std::pair<double, double> bin_interval(size_t feature, size_t bin) const;

  private:
    std::vector<std::vector<double>> cuts_;
};

}  // namespace defplan

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace defplan {

inline constexpr size_t kNumMetrics = 20;

// CSV column order of the CK metric datasets.
const std::array<std::string, kNumMetrics>& metric_names();
int metric_index(const std::string& name);  // -1 when unknown

// One file in one release.
struct MetricRecord {
    std::string file_name;
    std::vector<double> metrics;  // size kNumMetrics, finite
    int bug_count = 0;

    bool defective() const { return bug_count > 0; }
};

struct Release {
    std::string version_id;
    std::vector<MetricRecord> records;
    // Per-feature (min, max) observed in this release; empty release -> nullopt.
    std::vector<std::optional<std::pair<double, double>>> feature_bounds;

    const MetricRecord* find(const std::string& file_name) const;
    void recompute_bounds();
};

// Affine per-feature map raw -> [0,1], min-max fitted on x union y.
class NormalizationMap {
  public:
    NormalizationMap() : lo_(kNumMetrics, 0.0), hi_(kNumMetrics, 1.0) {}

    static NormalizationMap fit(const Release& x, const Release& y);

    // Constant features (min == max) map to 0.0.
    bool constant(size_t feature) const { return hi_[feature] <= lo_[feature]; }
    double to_unit(size_t feature, double raw, bool clamp) const;
    double to_raw(size_t feature, double unit) const;

    double lo(size_t feature) const { return lo_[feature]; }
    double hi(size_t feature) const { return hi_[feature]; }

  private:
    std::vector<double> lo_, hi_;
};

// (oldest x, newer y, most recent z) plus the matched-file index.
struct ReleaseTriple {
    Release oldest;       // x
    Release newer;        // y
    Release most_recent;  // z
    std::vector<std::string> matched_files;  // present in all three, defective in y
};

Release load_release(const std::string& path, const std::string& version_id);

ReleaseTriple build_triple(Release x, Release y, Release z);

// bug_count(y) - bug_count(z); positive = bugs reduced.
int compute_ndpv(const ReleaseTriple& triple, const std::string& file_name);

// All metric values mapped to [0,1]; out-of-range values are clamped.
Release normalize(const Release& release, const NormalizationMap& map);

// One experiment trial from the manifest.
struct Trial {
    std::string name;
    std::string x_path, y_path, z_path;
};

// Plain text, one "name: x.csv y.csv z.csv" line per trial; '#' comments.
std::vector<Trial> load_manifest(const std::string& path);

}  // namespace defplan

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defplan/data.hpp"
#include "defplan/discretize.hpp"
#include "defplan/plan.hpp"

namespace defplan {

enum class Verdict : int { kTP, kTN, kFP, kFN };

enum class OverlapSemantics {
    kTable5,   // matches / total features (default)
    kJaccard,  // strict |P ∩ Δ| / |P ∪ Δ| over per-feature move/change sets
};

struct OverlapScore {
    double score = 0.0;  // percentage in [0, 100]
    std::array<Verdict, kNumMetrics> verdicts{};
    size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Compare a plan against the actual y -> z change of one file. Instances
// must be normalized with the triple's map; "changed" means the discretized
// bin moved between y and z.
OverlapScore overlap(const Plan& plan, const std::vector<double>& y_instance,
                     const std::vector<double>& z_instance, const BinScheme& bins,
                     OverlapSemantics semantics = OverlapSemantics::kTable5);

// Eq. S = sum(s_i * n_i) and S_scaled = S / sum(n_i); the scaled score is
// absent when the NDPV sum is zero.
std::pair<double, std::optional<double>> weighted_scores(const std::vector<double>& overlaps,
                                                         const std::vector<int>& ndpv);

struct Counts {
    size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Percentages; absent on a zero denominator.
std::pair<std::optional<double>, std::optional<double>> precision_recall(const Counts& counts);

struct ScottKnottConfig {
    int bootstrap_resamples = 512;
    double alpha = 0.05;
    double cliffs_delta_threshold = 0.147;
    uint64_t seed = 12345;
};

// Rank per group, 1 = best (highest scores). Group order preserved.
std::vector<int> scott_knott_rank(const std::vector<std::vector<double>>& groups,
                                  const ScottKnottConfig& config = {});

// Refactoring-method ids (1-based) whose metric effects are consistent with
// the plan's per-feature directions, judged against the current instance.
std::vector<int> map_to_refactorings(const Plan& plan, const std::vector<double>& unit_instance);

// --------------------------------------------------------------------------
// K-test harness

struct RunConfig {
    int top_m = 5;
    uint64_t seed = 1;
    int lime_samples = 5000;
    int smote_k = 5;
    int n_trees = 100;
    FlipMode flip_mode = FlipMode::kMirror;
    OverlapSemantics overlap_semantics = OverlapSemantics::kTable5;
};

struct FileReport {
    std::string file;
    size_t plan_size = 0;
    double overlap_pct = 0.0;
    int ndpv = 0;
    size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

struct ScoreReport {
    std::string trial;
    std::string planner;
    std::vector<FileReport> files;
    double median_overlap = 0.0;
    double iqr_overlap = 0.0;  // over percentages
    double mean_plan_size = 0.0;
    double weighted_score = 0.0;                // S
    std::optional<double> scaled_score;         // S_scaled
    std::optional<double> precision, recall;    // percentages
    Counts counts;
};

double median(std::vector<double> values);
double iqr(std::vector<double> values);

// All planner names accepted by ktest_run / the CLI.
const std::vector<std::string>& planner_names();

ScoreReport ktest_run(const ReleaseTriple& triple, const std::string& planner,
                      const std::string& trial_name, const RunConfig& config);

}  // namespace defplan

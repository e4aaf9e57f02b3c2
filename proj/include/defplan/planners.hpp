#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "defplan/data.hpp"
#include "defplan/discretize.hpp"
#include "defplan/explain.hpp"
#include "defplan/learners.hpp"
#include "defplan/plan.hpp"

namespace defplan {

// --------------------------------------------------------------------------
// Shared primitives

// Per-feature standardized mean difference between two releases.
struct FeatureShift {
    struct Entry {
        double g = 0.0;          // (M1 - M2) / S_pooled
        bool defined = true;     // false when S_pooled == 0
        double mean_x = 0.0, mean_y = 0.0;
        double sd_x = 0.0, sd_y = 0.0;
        size_t n_x = 0, n_y = 0;
    };
    std::vector<Entry> features{kNumMetrics};
};

FeatureShift hedge_g(const Release& x, const Release& y);

// Top-M features by |g| descending, ties broken by feature index.
std::vector<int> precedented_features(const FeatureShift& shift, int m = 5);

enum class Direction : int { kDecrease = -1, kIncrease = 1 };

// One itemset per matched file: the (feature, direction) pairs whose
// discretized bin changed between releases x and y.
struct ChangeHistory {
    std::vector<std::map<int, Direction>> itemsets;

    static ChangeHistory mine(const ReleaseTriple& triple, const NormalizationMap& map,
                              const BinScheme& bins);
};

struct FlipCandidate {
    int feature = -1;
    Interval current;
    Interval target;
    Direction direction() const;  // by target-vs-current midpoint
};

// Greedy max-support search over all plans of m = M..1 pool candidates.
Plan find_support(const std::vector<FlipCandidate>& pool, const ChangeHistory& history, int m);

// --------------------------------------------------------------------------
// Plan generators

Plan classical_plan(const Explanation& e, FlipMode mode = FlipMode::kMirror);

Plan timelime_plan(const Explanation& e, const FeatureShift& shift, const ChangeHistory& history,
                   int m = 5, FlipMode mode = FlipMode::kMirror);

Plan random_plan(int n_changes, uint64_t seed);

// Fitted rule sets for the outlier-statistics planners; all three propose
// capping intervals [0, T] in normalized space.
struct ThresholdRule {
    int feature = -1;
    double raw_threshold = 0.0;
    double unit_threshold = 0.0;
};

struct ThresholdRuleSet {
    std::vector<ThresholdRule> rules;  // ascending feature index
    Plan apply(const std::vector<double>& unit_instance, const std::string& provenance) const;
};

ThresholdRuleSet alves_rules(const Release& raw_train, const NormalizationMap& map,
                             double threshold_pct = 70.0);

ThresholdRuleSet shatnawi_rules(const Release& raw_train, const NormalizationMap& map,
                                double p0 = 0.05);

struct OliveiraRule {
    int feature = -1;
    double p = 0.0;  // percentage of classes bound by the rule
    double k = 0.0;  // raw threshold
    double unit_k = 0.0;
};

std::vector<OliveiraRule> oliveira_rules(const Release& raw_train, const NormalizationMap& map);
Plan oliveira_apply(const std::vector<OliveiraRule>& rules,
                    const std::vector<double>& unit_instance);

// --------------------------------------------------------------------------
// XTREE

using Itemset = std::set<std::pair<int, int>>;  // (feature, bin)

// Maximal frequent itemsets at the given absolute support count.
std::vector<Itemset> fp_growth(const std::vector<Itemset>& transactions, size_t min_support);

class XtreePlanner {
  public:
    // train: normalized release; transactions are per-record (feature, bin) sets.
    static XtreePlanner fit(const Release& normalized_train, const BinScheme& bins);

    Plan plan(const std::vector<double>& unit_instance) const;
    bool degenerate() const { return nodes_.size() <= 1; }

  private:
    struct Node {
        int feature = -1;             // -1 for leaf
        std::vector<int> children;    // child per bin of `feature`
        double p_defective = 0.0;
        std::map<int, int> path;      // feature -> asserted bin along the way here
        size_t depth = 0;
    };
    std::vector<Node> nodes_;
    std::vector<int> leaves_;
    BinScheme bins_;

    friend struct XtreeBuilder;
};

}  // namespace defplan

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "defplan/data.hpp"

namespace defplan {

// Minimal black-box surface consumed by the explainer: probability of the
// defective class for one normalized instance. Alternative classifiers can
// plug in through this signature.
using ProbabilityFn = std::function<double(const std::vector<double>&)>;

struct ForestConfig {
    int n_trees = 100;
    int max_features_per_split = 5;  // ceil(sqrt(20))
    int min_samples_split = 2;
    uint64_t seed = 0;
};

class ForestModel {
  public:
    static ForestModel fit(const std::vector<MetricRecord>& records, const ForestConfig& config);

    // (p_clean, p_defective), summing to 1.
    std::pair<double, double> predict_proba(const std::vector<double>& instance) const;
    double defect_probability(const std::vector<double>& instance) const {
        return predict_proba(instance).second;
    }

    ProbabilityFn as_probability_fn() const;
    bool degenerate() const { return degenerate_; }  // trained on one class

  private:
    struct Node {
        int feature = -1;      // -1 for leaf
        double threshold = 0;  // go left when value <= threshold
        int left = -1, right = -1;
        double p_defective = 0;
    };
    struct Tree {
        std::vector<Node> nodes;
        double predict(const std::vector<double>& instance) const;
    };
    std::vector<Tree> trees_;
    bool degenerate_ = false;

    friend struct ForestTrainer;
};

struct LogisticFit {
    double alpha = 0;    // intercept
    double beta = 0;     // slope
    double p_value = 1;  // two-sided Wald p for beta
    bool converged = false;
    bool separated = false;  // perfect separation; p_value reported as 0
};

// Univariate logistic regression by IRLS (tolerance 1e-8, max 100 iterations),
// Wald p-value from the observed information matrix.
LogisticFit fit_univariate_logistic(const std::vector<double>& feature_values,
                                    const std::vector<bool>& labels);

}  // namespace defplan

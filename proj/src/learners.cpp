#include "defplan/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "defplan/errors.hpp"
#include "defplan/rng.hpp"

namespace defplan {

namespace {

double gini(size_t n_defective, size_t n_total) {
    if (n_total == 0) return 0.0;
    double p = static_cast<double>(n_defective) / static_cast<double>(n_total);
    return 2.0 * p * (1.0 - p);
}

}  // namespace

struct ForestTrainer {
    const std::vector<MetricRecord>& records;
    const ForestConfig& config;

    // Grows one CART tree on a bootstrap sample; no depth cap.
    ForestModel::Tree grow(Rng& rng) const {
        std::vector<size_t> sample(records.size());
        for (auto& s : sample) s = rng.uniform_index(records.size());
        ForestModel::Tree tree;
        build(tree, sample, rng);
        return tree;
    }

    int build(ForestModel::Tree& tree, std::vector<size_t>& idx, Rng& rng) const {
        size_t n_def = 0;
        for (size_t i : idx) n_def += records[i].defective() ? 1 : 0;

        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_id].p_defective =
            idx.empty() ? 0.0 : static_cast<double>(n_def) / static_cast<double>(idx.size());

        if (idx.size() < static_cast<size_t>(config.min_samples_split) || n_def == 0 ||
            n_def == idx.size())
            return node_id;

        // Best Gini split over a random feature subset.
        double parent = gini(n_def, idx.size());
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0;
        auto features = rng.sample_without_replacement(kNumMetrics, config.max_features_per_split);
        std::sort(features.begin(), features.end());
        std::vector<std::pair<double, bool>> column(idx.size());
        for (size_t f : features) {
            for (size_t i = 0; i < idx.size(); ++i)
                column[i] = {records[idx[i]].metrics[f], records[idx[i]].defective()};
            std::sort(column.begin(), column.end());
            size_t left_n = 0, left_def = 0;
            for (size_t i = 0; i + 1 < column.size(); ++i) {
                ++left_n;
                left_def += column[i].second ? 1 : 0;
                if (column[i].first == column[i + 1].first) continue;
                size_t right_n = column.size() - left_n;
                size_t right_def = n_def - left_def;
                double child =
                    (left_n * gini(left_def, left_n) + right_n * gini(right_def, right_n)) /
                    static_cast<double>(column.size());
                double gain = parent - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<size_t> left, right;
        for (size_t i : idx)
            (records[i].metrics[best_feature] <= best_threshold ? left : right).push_back(i);
        if (left.empty() || right.empty()) return node_id;
        idx.clear();
        idx.shrink_to_fit();

        int left_id = build(tree, left, rng);
        int right_id = build(tree, right, rng);
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].left = left_id;
        tree.nodes[node_id].right = right_id;
        return node_id;
    }
};

double ForestModel::Tree::predict(const std::vector<double>& instance) const {
    int node = 0;
    while (nodes[node].feature >= 0)
        node = instance[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                                      : nodes[node].right;
    return nodes[node].p_defective;
}

ForestModel ForestModel::fit(const std::vector<MetricRecord>& records,
                             const ForestConfig& config) {
    if (records.size() < 2) throw DataError("fit_forest: need at least 2 records");
    ForestModel model;
    size_t n_def = 0;
    for (const auto& r : records) n_def += r.defective() ? 1 : 0;
    model.degenerate_ = (n_def == 0 || n_def == records.size());

    ForestTrainer trainer{records, config};
    model.trees_.reserve(config.n_trees);
    for (int t = 0; t < config.n_trees; ++t) {
        Rng rng(derive_seed(config.seed, "forest.tree", static_cast<uint64_t>(t)));
        model.trees_.push_back(trainer.grow(rng));
    }
    return model;
}

std::pair<double, double> ForestModel::predict_proba(const std::vector<double>& instance) const {
    if (instance.size() != kNumMetrics)
        throw ContractError("predict_proba: instance must have 20 values");
    double p = 0.0;
    for (const auto& tree : trees_) p += tree.predict(instance);
    p /= static_cast<double>(trees_.size());
    return {1.0 - p, p};
}

ProbabilityFn ForestModel::as_probability_fn() const {
    return [this](const std::vector<double>& instance) { return defect_probability(instance); };
}

LogisticFit fit_univariate_logistic(const std::vector<double>& feature_values,
                                    const std::vector<bool>& labels) {
    if (feature_values.size() != labels.size())
        throw ContractError("fit_univariate_logistic: length mismatch");
    const size_t n = feature_values.size();
    if (n < 4) throw DataError("fit_univariate_logistic: need at least 4 observations");
    bool any_true = false, any_false = false;
    for (bool l : labels) (l ? any_true : any_false) = true;
    if (!any_true || !any_false)
        throw DataError("fit_univariate_logistic: both labels must be present");

    LogisticFit fit;
    double alpha = 0.0, beta = 0.0;
    const int max_iter = 100;
    const double tol = 1e-8;
    for (int iter = 0; iter < max_iter; ++iter) {
        // One IRLS (Newton) step on the Bernoulli log-likelihood.
        double g0 = 0, g1 = 0;         // gradient
        double h00 = 0, h01 = 0, h11 = 0;  // observed information
        for (size_t i = 0; i < n; ++i) {
            double eta = std::clamp(alpha + beta * feature_values[i], -35.0, 35.0);
            double p = 1.0 / (1.0 + std::exp(-eta));
            double y = labels[i] ? 1.0 : 0.0;
            double w = p * (1.0 - p);
            g0 += y - p;
            g1 += (y - p) * feature_values[i];
            h00 += w;
            h01 += w * feature_values[i];
            h11 += w * feature_values[i] * feature_values[i];
        }
        double det = h00 * h11 - h01 * h01;
        if (std::abs(det) < 1e-300) break;
        double da = (h11 * g0 - h01 * g1) / det;
        double db = (-h01 * g0 + h00 * g1) / det;
        alpha += da;
        beta += db;
        if (std::abs(da) < tol && std::abs(db) < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.alpha = alpha;
    fit.beta = beta;

    // Separation shows up as runaway coefficients or vanishing curvature.
    if (!fit.converged || std::abs(beta) > 30.0) {
        fit.separated = true;
        fit.p_value = 0.0;
        return fit;
    }

    double h00 = 0, h01 = 0, h11 = 0;
    for (size_t i = 0; i < n; ++i) {
        double eta = std::clamp(alpha + beta * feature_values[i], -35.0, 35.0);
        double p = 1.0 / (1.0 + std::exp(-eta));
        double w = p * (1.0 - p);
        h00 += w;
        h01 += w * feature_values[i];
        h11 += w * feature_values[i] * feature_values[i];
    }
    double det = h00 * h11 - h01 * h01;
    if (det <= 0) {
        fit.separated = true;
        fit.p_value = 0.0;
        return fit;
    }
    double var_beta = h00 / det;  // (I^-1)[1][1]
    double se = std::sqrt(var_beta);
    if (se <= 0 || !std::isfinite(se)) {
        fit.separated = true;
        fit.p_value = 0.0;
        return fit;
    }
    double z = std::abs(beta) / se;
    fit.p_value = std::erfc(z / std::sqrt(2.0));  // 2 * (1 - Phi(z))
    return fit;
}

}  // namespace defplan

#include <algorithm>
#include <cmath>
#include <map>

#include "defplan/errors.hpp"
#include "defplan/planners.hpp"

namespace defplan {

// --------------------------------------------------------------------------
// Maximal frequent itemset mining (Eclat-style DFS with tidset intersection,
// closure absorption, and subset pruning against found maximal sets).

namespace {

using Item = std::pair<int, int>;
using Tidset = std::vector<int>;

Tidset intersect(const Tidset& a, const Tidset& b) {
    Tidset out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool subset_of(const Itemset& small, const Itemset& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

struct MaximalMiner {
    size_t min_support;
    std::vector<Itemset> maximal;

    void record(const Itemset& candidate) {
        for (const auto& m : maximal)
            if (subset_of(candidate, m)) return;
        std::erase_if(maximal, [&](const Itemset& m) { return subset_of(m, candidate); });
        maximal.push_back(candidate);
    }

    void dfs(Itemset prefix, const Tidset& prefix_tids,
             const std::vector<std::pair<Item, Tidset>>& candidates) {
        std::vector<std::pair<Item, Tidset>> extensions;
        for (const auto& [item, tids] : candidates) {
            Tidset joined = prefix.empty() ? tids : intersect(prefix_tids, tids);
            if (joined.size() < min_support) continue;
            if (!prefix.empty() && joined.size() == prefix_tids.size()) {
                prefix.insert(item);  // closure: item occurs wherever the prefix does
            } else {
                extensions.emplace_back(item, std::move(joined));
            }
        }
        if (extensions.empty()) {
            if (!prefix.empty()) record(prefix);
            return;
        }
        // prune the whole subtree when its largest reachable itemset is covered
        Itemset hull = prefix;
        for (const auto& [item, tids] : extensions) hull.insert(item);
        for (const auto& m : maximal)
            if (subset_of(hull, m)) return;

        for (size_t i = 0; i < extensions.size(); ++i) {
            Itemset next = prefix;
            next.insert(extensions[i].first);
            std::vector<std::pair<Item, Tidset>> rest(extensions.begin() + i + 1,
                                                      extensions.end());
            dfs(std::move(next), extensions[i].second, rest);
        }
    }
};

}  // namespace

std::vector<Itemset> fp_growth(const std::vector<Itemset>& transactions, size_t min_support) {
    if (min_support < 1) throw ContractError("fp_growth: min_support must be >= 1");
    std::map<Item, Tidset> tidsets;
    for (size_t t = 0; t < transactions.size(); ++t)
        for (const auto& item : transactions[t]) tidsets[item].push_back(static_cast<int>(t));

    std::vector<std::pair<Item, Tidset>> items;
    for (auto& [item, tids] : tidsets)
        if (tids.size() >= min_support) items.emplace_back(item, std::move(tids));
    // ascending support keeps the search tree shallow
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });

    MaximalMiner miner{min_support, {}};
    miner.dfs({}, {}, items);
    std::sort(miner.maximal.begin(), miner.maximal.end());
    return miner.maximal;
}

// --------------------------------------------------------------------------
// XTREE: decision tree over (feature, bin) conditions from the maximal
// frequent itemsets; plans are the delta to the nearest better leaf.

namespace {

double label_entropy(size_t pos, size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    double e = 0.0;
    if (p > 0) e -= p * std::log2(p);
    if (p < 1) e -= (1.0 - p) * std::log2(1.0 - p);
    return e;
}

}  // namespace

struct XtreeBuilder {
    const BinScheme& bins;
    std::vector<bool> usable;  // features appearing in some maximal frequent itemset
    XtreePlanner& planner;
    static constexpr size_t kMinSplit = 8;

    int build(const std::vector<const MetricRecord*>& records, std::map<int, int> path,
              size_t depth) {
        size_t pos = 0;
        for (const auto* r : records) pos += r->defective() ? 1 : 0;

        int node_id = static_cast<int>(planner.nodes_.size());
        planner.nodes_.emplace_back();
        planner.nodes_[node_id].p_defective =
            records.empty() ? 0.0 : static_cast<double>(pos) / records.size();
        planner.nodes_[node_id].path = path;
        planner.nodes_[node_id].depth = depth;

        if (records.size() < kMinSplit || pos == 0 || pos == records.size()) return node_id;

        double parent = label_entropy(pos, records.size());
        double best_gain = 1e-9;
        int best_feature = -1;
        for (size_t f = 0; f < kNumMetrics; ++f) {
            if (!usable[f] || path.count(static_cast<int>(f))) continue;
            std::vector<size_t> n(bins.n_bins(f), 0), npos(bins.n_bins(f), 0);
            for (const auto* r : records) {
                size_t b = bins.bin_of(f, r->metrics[f]);
                ++n[b];
                npos[b] += r->defective() ? 1 : 0;
            }
            double child = 0.0;
            for (size_t b = 0; b < n.size(); ++b)
                child += static_cast<double>(n[b]) / records.size() * label_entropy(npos[b], n[b]);
            double gain = parent - child;
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<std::vector<const MetricRecord*>> partition(bins.n_bins(best_feature));
        for (const auto* r : records)
            partition[bins.bin_of(best_feature, r->metrics[best_feature])].push_back(r);

        std::vector<int> children;
        for (size_t b = 0; b < partition.size(); ++b) {
            if (partition[b].empty()) {
                children.push_back(-1);
                continue;
            }
            auto child_path = path;
            child_path[best_feature] = static_cast<int>(b);
            children.push_back(build(partition[b], std::move(child_path), depth + 1));
        }
        planner.nodes_[node_id].feature = best_feature;
        planner.nodes_[node_id].children = std::move(children);
        return node_id;
    }
};

XtreePlanner XtreePlanner::fit(const Release& normalized_train, const BinScheme& bins) {
    XtreePlanner planner;
    planner.bins_ = bins;

    std::vector<Itemset> transactions;
    transactions.reserve(normalized_train.records.size());
    for (const auto& r : normalized_train.records) {
        Itemset t;
        for (size_t f = 0; f < kNumMetrics; ++f)
            if (bins.binned(f))
                t.insert({static_cast<int>(f), static_cast<int>(bins.bin_of(f, r.metrics[f]))});
        transactions.push_back(std::move(t));
    }
    size_t min_support = std::max<size_t>(
        1, static_cast<size_t>(std::llround(0.05 * static_cast<double>(transactions.size()))));
    auto frequent = fp_growth(transactions, min_support);

    XtreeBuilder builder{bins, std::vector<bool>(kNumMetrics, false), planner};
    for (const auto& itemset : frequent)
        for (const auto& [f, b] : itemset) builder.usable[f] = bins.binned(f);

    std::vector<const MetricRecord*> records;
    for (const auto& r : normalized_train.records) records.push_back(&r);
    builder.build(records, {}, 0);
    for (size_t i = 0; i < planner.nodes_.size(); ++i)
        if (planner.nodes_[i].feature < 0) planner.leaves_.push_back(static_cast<int>(i));
    return planner;
}

Plan XtreePlanner::plan(const std::vector<double>& unit_instance) const {
    Plan plan;
    plan.provenance = "xtree";
    if (degenerate()) return plan;

    int node = 0;
    while (nodes_[node].feature >= 0) {
        size_t b = bins_.bin_of(nodes_[node].feature, unit_instance[nodes_[node].feature]);
        int child = nodes_[node].children[b];
        if (child < 0) break;  // bin unseen in training below this node
        node = child;
    }
    const double current_p = nodes_[node].p_defective;

    auto distance_to = [&](const Node& leaf) {
        size_t d = 0;
        for (const auto& [f, b] : leaf.path)
            if (static_cast<int>(bins_.bin_of(f, unit_instance[f])) != b) ++d;
        return d;
    };

    int best = -1;
    size_t best_distance = 0;
    for (int leaf_id : leaves_) {
        const Node& leaf = nodes_[leaf_id];
        if (leaf.p_defective >= current_p - 1e-12) continue;
        size_t d = distance_to(leaf);
        if (best < 0 || d < best_distance ||
            (d == best_distance && leaf.p_defective < nodes_[best].p_defective) ||
            (d == best_distance && leaf.p_defective == nodes_[best].p_defective &&
             leaf.depth < nodes_[best].depth)) {
            best = leaf_id;
            best_distance = d;
        }
    }
    if (best < 0 || best_distance == 0) return plan;  // already in the best reachable leaf

    for (const auto& [f, b] : nodes_[best].path) {
        if (static_cast<int>(bins_.bin_of(f, unit_instance[f])) == b) continue;
        auto [lo, hi] = bins_.bin_interval(f, b);
        plan.targets[f] = Interval{lo, hi};
    }
    return plan;
}

}  // namespace defplan

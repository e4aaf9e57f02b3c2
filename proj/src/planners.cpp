#include "defplan/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "defplan/errors.hpp"
#include "defplan/rng.hpp"

namespace defplan {

Interval flip(const Interval& interval, FlipMode mode) {
    if (interval.lo < -1e-12 || interval.hi > 1.0 + 1e-12 || interval.lo > interval.hi)
        throw ContractError("flip: interval must satisfy [lo, hi] within [0, 1]");
    if (mode == FlipMode::kMirror) return {1.0 - interval.hi, 1.0 - interval.lo};
    // Complement variant: move to the larger region outside the interval.
    if (interval.lo >= 1.0 - interval.hi) return {0.0, interval.lo};
    return {interval.hi, 1.0};
}

// --------------------------------------------------------------------------
// Hedge's g and precedence

FeatureShift hedge_g(const Release& x, const Release& y) {
    if (x.records.size() < 2 || y.records.size() < 2)
        throw DataError("hedge_g: each release needs at least 2 records");
    FeatureShift shift;
    auto moments = [](const Release& r, size_t f) {
        double mean = 0.0;
        for (const auto& rec : r.records) mean += rec.metrics[f];
        mean /= static_cast<double>(r.records.size());
        double ss = 0.0;
        for (const auto& rec : r.records) {
            double d = rec.metrics[f] - mean;
            ss += d * d;
        }
        double var = ss / static_cast<double>(r.records.size() - 1);
        return std::make_pair(mean, std::sqrt(var));
    };
    for (size_t f = 0; f < kNumMetrics; ++f) {
        auto& e = shift.features[f];
        auto [m1, s1] = moments(x, f);
        auto [m2, s2] = moments(y, f);
        e.mean_x = m1;
        e.mean_y = m2;
        e.sd_x = s1;
        e.sd_y = s2;
        e.n_x = x.records.size();
        e.n_y = y.records.size();
        double n1 = static_cast<double>(e.n_x), n2 = static_cast<double>(e.n_y);
        double pooled = std::sqrt(((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / (n1 + n2 - 2));
        if (pooled <= 0.0) {
            e.defined = (m1 == m2);
            e.g = 0.0;  // identical constants: no shift; otherwise flagged undefined
            if (m1 != m2) e.defined = false;
        } else {
            e.g = (m1 - m2) / pooled;
        }
    }
    return shift;
}

std::vector<int> precedented_features(const FeatureShift& shift, int m) {
    if (m < 1) throw ContractError("precedented_features: M must be >= 1");
    std::vector<int> order(kNumMetrics);
    std::iota(order.begin(), order.end(), 0);
    auto magnitude = [&](int f) {
        const auto& e = shift.features[f];
        return e.defined ? std::abs(e.g) : -std::numeric_limits<double>::infinity();
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return magnitude(a) > magnitude(b); });
    order.resize(std::min<size_t>(m, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

// --------------------------------------------------------------------------
// Change history and findSupport

ChangeHistory ChangeHistory::mine(const ReleaseTriple& triple, const NormalizationMap& map,
                                  const BinScheme& bins) {
    ChangeHistory history;
    for (const auto& name : triple.matched_files) {
        const MetricRecord* in_x = triple.oldest.find(name);
        const MetricRecord* in_y = triple.newer.find(name);
        if (!in_x || !in_y) continue;
        std::map<int, Direction> itemset;
        for (size_t f = 0; f < kNumMetrics; ++f) {
            size_t bx = bins.bin_of(f, map.to_unit(f, in_x->metrics[f], true));
            size_t by = bins.bin_of(f, map.to_unit(f, in_y->metrics[f], true));
            if (bx == by) continue;
            itemset[static_cast<int>(f)] = by > bx ? Direction::kIncrease : Direction::kDecrease;
        }
        history.itemsets.push_back(std::move(itemset));
    }
    return history;
}

Direction FlipCandidate::direction() const {
    double delta = (target.lo + target.hi) - (current.lo + current.hi);
    return delta > 0 ? Direction::kIncrease : Direction::kDecrease;
}

namespace {

int plan_support(const std::vector<const FlipCandidate*>& combo, const ChangeHistory& history) {
    int support = 0;
    for (const auto& itemset : history.itemsets) {
        bool ok = true;
        for (const FlipCandidate* c : combo) {
            auto it = itemset.find(c->feature);
            if (it == itemset.end() || it->second != c->direction()) {
                ok = false;
                break;
            }
        }
        if (ok) ++support;
    }
    return support;
}

void enumerate_combos(const std::vector<FlipCandidate>& pool, size_t m, size_t start,
                      std::vector<const FlipCandidate*>& combo, const ChangeHistory& history,
                      int& best_support, std::vector<const FlipCandidate*>& best) {
    if (combo.size() == m) {
        int s = plan_support(combo, history);
        // strict > keeps the lexicographically smallest feature set on ties
        if (s > best_support) {
            best_support = s;
            best = combo;
        }
        return;
    }
    for (size_t i = start; i < pool.size(); ++i) {
        combo.push_back(&pool[i]);
        enumerate_combos(pool, m, i + 1, combo, history, best_support, best);
        combo.pop_back();
    }
}

}  // namespace

Plan find_support(const std::vector<FlipCandidate>& pool, const ChangeHistory& history, int m) {
    Plan plan;
    plan.provenance = "timelime";
    std::vector<FlipCandidate> sorted_pool = pool;
    std::sort(sorted_pool.begin(), sorted_pool.end(),
              [](const FlipCandidate& a, const FlipCandidate& b) { return a.feature < b.feature; });

    for (size_t size = std::min<size_t>(m, sorted_pool.size()); size >= 1; --size) {
        int best_support = 0;
        std::vector<const FlipCandidate*> combo, best;
        enumerate_combos(sorted_pool, size, 0, combo, history, best_support, best);
        if (best_support > 0) {
            for (const FlipCandidate* c : best) plan.targets[c->feature] = c->target;
            plan.support = best_support;
            return plan;
        }
    }
    return plan;  // all-NoChange, support 0
}

// --------------------------------------------------------------------------
// LIME-family planners

Plan classical_plan(const Explanation& e, FlipMode mode) {
    Plan plan;
    plan.provenance = "lime";
    for (const auto& entry : e.entries) {
        if (entry.weight >= 0)
            plan.targets[entry.feature] = flip({entry.interval_lo, entry.interval_hi}, mode);
    }
    return plan;
}

Plan timelime_plan(const Explanation& e, const FeatureShift& shift, const ChangeHistory& history,
                   int m, FlipMode mode) {
    auto precedented = precedented_features(shift, m);
    std::vector<FlipCandidate> pool;
    for (const auto& entry : e.entries) {
        if (entry.weight < 0) continue;
        if (!std::binary_search(precedented.begin(), precedented.end(), entry.feature)) continue;
        FlipCandidate c;
        c.feature = entry.feature;
        c.current = {entry.interval_lo, entry.interval_hi};
        c.target = flip(c.current, mode);
        // a symmetric bin flips onto itself and proposes nothing
        if (std::abs((c.target.lo + c.target.hi) - (c.current.lo + c.current.hi)) < 1e-12) continue;
        pool.push_back(c);
    }
    return find_support(pool, history, m);
}

Plan random_plan(int n_changes, uint64_t seed) {
    if (n_changes < 0 || n_changes > static_cast<int>(kNumMetrics))
        throw ContractError("random_plan: n must be in [0, 20]");
    Plan plan;
    plan.provenance = "random";
    Rng rng(seed);
    auto chosen = rng.sample_without_replacement(kNumMetrics, n_changes);
    std::sort(chosen.begin(), chosen.end());
    for (size_t f : chosen) {
        double a = rng.uniform(), b = rng.uniform();
        if (a > b) std::swap(a, b);
        plan.targets[f] = Interval{a, b};
    }
    return plan;
}

// --------------------------------------------------------------------------
// Outlier-statistics planners

Plan ThresholdRuleSet::apply(const std::vector<double>& unit_instance,
                             const std::string& provenance) const {
    Plan plan;
    plan.provenance = provenance;
    for (const auto& rule : rules) {
        if (unit_instance[rule.feature] > rule.unit_threshold)
            plan.targets[rule.feature] = Interval{0.0, rule.unit_threshold};
    }
    return plan;
}

namespace {

// p-value filter shared by Alves and Shatnawi: reject weak indicators,
// retain perfectly separated ones.
bool rejected_by_logistic(const LogisticFit& fit) {
    return !fit.separated && fit.p_value > 0.05;
}

std::pair<std::vector<double>, std::vector<bool>> feature_column(const Release& train, size_t f) {
    std::vector<double> values(train.records.size());
    std::vector<bool> labels(train.records.size());
    for (size_t i = 0; i < train.records.size(); ++i) {
        values[i] = train.records[i].metrics[f];
        labels[i] = train.records[i].defective();
    }
    return {std::move(values), std::move(labels)};
}

}  // namespace

ThresholdRuleSet alves_rules(const Release& raw_train, const NormalizationMap& map,
                             double threshold_pct) {
    if (raw_train.records.empty()) throw DataError("alves_rules: empty training release");
    const int loc = metric_index("loc");
    double total_loc = 0.0;
    for (const auto& r : raw_train.records) total_loc += r.metrics[loc];
    if (total_loc <= 0.0) throw DataError("alves_rules: all LOC weights are zero");

    ThresholdRuleSet rules;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        auto [values, labels] = feature_column(raw_train, f);
        bool uniform = std::all_of(labels.begin(), labels.end(),
                                   [&](bool l) { return l == labels[0]; });
        if (uniform) continue;
        if (rejected_by_logistic(fit_univariate_logistic(values, labels))) continue;

        // LOC-weighted cumulative distribution of the raw values.
        std::vector<std::pair<double, double>> weighted(raw_train.records.size());
        for (size_t i = 0; i < raw_train.records.size(); ++i)
            weighted[i] = {values[i], raw_train.records[i].metrics[loc] / total_loc};
        std::sort(weighted.begin(), weighted.end());
        double cum = 0.0;
        double threshold = weighted.back().first;
        for (const auto& [value, w] : weighted) {
            cum += w;
            if (cum >= threshold_pct / 100.0 - 1e-12) {
                threshold = value;
                break;
            }
        }
        rules.rules.push_back({static_cast<int>(f), threshold, map.to_unit(f, threshold, true)});
    }
    return rules;
}

ThresholdRuleSet shatnawi_rules(const Release& raw_train, const NormalizationMap& map, double p0) {
    if (raw_train.records.empty()) throw DataError("shatnawi_rules: empty training release");
    ThresholdRuleSet rules;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        auto [values, labels] = feature_column(raw_train, f);
        bool uniform = std::all_of(labels.begin(), labels.end(),
                                   [&](bool l) { return l == labels[0]; });
        if (uniform) continue;
        LogisticFit fit = fit_univariate_logistic(values, labels);
        if (rejected_by_logistic(fit)) continue;
        if (fit.beta == 0.0) continue;
        double varl = (std::log(p0 / (1.0 - p0)) - fit.alpha) / fit.beta;
        double max_observed = *std::max_element(values.begin(), values.end());
        if (varl <= 0.0 || varl >= max_observed) continue;  // unusable threshold
        rules.rules.push_back({static_cast<int>(f), varl, map.to_unit(f, varl, true)});
    }
    return rules;
}

std::vector<OliveiraRule> oliveira_rules(const Release& raw_train, const NormalizationMap& map) {
    if (raw_train.records.empty()) throw DataError("oliveira_rules: empty training release");
    std::vector<OliveiraRule> rules;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        std::vector<double> values(raw_train.records.size());
        for (size_t i = 0; i < raw_train.records.size(); ++i)
            values[i] = raw_train.records[i].metrics[f];
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back()) continue;  // constant feature

        // median of the upper tail (values at or above the 90th percentile)
        double rank = 0.90 * static_cast<double>(sorted.size() - 1);
        size_t below = static_cast<size_t>(std::floor(rank));
        double frac = rank - static_cast<double>(below);
        double p90 = below + 1 < sorted.size()
                         ? sorted[below] + frac * (sorted[below + 1] - sorted[below])
                         : sorted.back();
        std::vector<double> tail;
        for (double v : sorted)
            if (v >= p90) tail.push_back(v);
        double tail_median = tail[tail.size() / 2];
        if (tail.size() % 2 == 0) tail_median = (tail[tail.size() / 2 - 1] + tail_median) / 2.0;

        std::vector<double> k_grid = sorted;
        k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
        double span = sorted.back() - sorted.front();

        OliveiraRule best;
        double best_penalty = std::numeric_limits<double>::infinity();
        for (int p = 10; p <= 90; p += 10) {
            for (double k : k_grid) {
                size_t compliant = 0;
                for (double v : values) compliant += v <= k ? 1 : 0;
                double compliance = static_cast<double>(compliant) / values.size();
                double penalty1 = std::max(0.0, 0.90 - compliance);
                double penalty2 = std::abs(k - tail_median) / span;
                double total = penalty1 + penalty2;
                bool better = total < best_penalty - 1e-12;
                if (!better && std::abs(total - best_penalty) <= 1e-12) {
                    // tie-break: highest p, then lowest k
                    better = p > best.p || (p == best.p && k < best.k);
                }
                if (better) {
                    best_penalty = total;
                    best = {static_cast<int>(f), static_cast<double>(p), k, map.to_unit(f, k, true)};
                }
            }
        }
        rules.push_back(best);
    }
    return rules;
}

Plan oliveira_apply(const std::vector<OliveiraRule>& rules,
                    const std::vector<double>& unit_instance) {
    Plan plan;
    plan.provenance = "oliveira";
    for (const auto& rule : rules) {
        if (unit_instance[rule.feature] > rule.unit_k)
            plan.targets[rule.feature] = Interval{0.0, rule.unit_k};
    }
    return plan;
}

}  // namespace defplan

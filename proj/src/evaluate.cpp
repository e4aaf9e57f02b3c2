#include "defplan/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "defplan/errors.hpp"
#include "defplan/explain.hpp"
#include "defplan/learners.hpp"
#include "defplan/planners.hpp"
#include "defplan/rng.hpp"
#include "defplan/smote.hpp"

namespace defplan {

OverlapScore overlap(const Plan& plan, const std::vector<double>& y_instance,
                     const std::vector<double>& z_instance, const BinScheme& bins,
                     OverlapSemantics semantics) {
    if (y_instance.size() != kNumMetrics || z_instance.size() != kNumMetrics)
        throw ContractError("overlap: instances must have 20 values");
    OverlapScore result;
    size_t planned = 0, changed = 0, planned_or_changed = 0;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        bool bin_changed = bins.bin_of(f, y_instance[f]) != bins.bin_of(f, z_instance[f]);
        if (plan.targets[f].has_value()) {
            ++planned;
            const Interval& target = *plan.targets[f];
            bool hit = z_instance[f] >= target.lo - 1e-9 && z_instance[f] <= target.hi + 1e-9;
            result.verdicts[f] = hit ? Verdict::kTP : Verdict::kFP;
            (hit ? result.tp : result.fp) += 1;
        } else {
            result.verdicts[f] = bin_changed ? Verdict::kFN : Verdict::kTN;
            (bin_changed ? result.fn : result.tn) += 1;
        }
        if (bin_changed) ++changed;
        if (plan.targets[f].has_value() || bin_changed) ++planned_or_changed;
    }
    if (semantics == OverlapSemantics::kTable5) {
        result.score = 100.0 * static_cast<double>(result.tp + result.tn) / kNumMetrics;
    } else {
        // strict set-ratio: realized moves over the union of proposals and changes
        result.score = planned_or_changed == 0
                           ? 100.0
                           : 100.0 * static_cast<double>(result.tp) / planned_or_changed;
    }
    return result;
}

std::pair<double, std::optional<double>> weighted_scores(const std::vector<double>& overlaps,
                                                         const std::vector<int>& ndpv) {
    if (overlaps.size() != ndpv.size()) throw ContractError("weighted_scores: length mismatch");
    if (overlaps.empty()) throw ContractError("weighted_scores: need at least one file");
    double s = 0.0;
    long long n_sum = 0;
    for (size_t i = 0; i < overlaps.size(); ++i) {
        s += overlaps[i] * ndpv[i];
        n_sum += ndpv[i];
    }
    if (n_sum == 0) return {s, std::nullopt};
    return {s, s / static_cast<double>(n_sum)};
}

std::pair<std::optional<double>, std::optional<double>> precision_recall(const Counts& counts) {
    std::optional<double> precision, recall;
    if (counts.tp + counts.fp > 0)
        precision = 100.0 * static_cast<double>(counts.tp) / (counts.tp + counts.fp);
    if (counts.tp + counts.fn > 0)
        recall = 100.0 * static_cast<double>(counts.tp) / (counts.tp + counts.fn);
    return {precision, recall};
}

double median(std::vector<double> values) {
    if (values.empty()) throw ContractError("median: empty input");
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double iqr(std::vector<double> values) {
    if (values.empty()) throw ContractError("iqr: empty input");
    std::sort(values.begin(), values.end());
    auto percentile = [&](double q) {
        double rank = q * static_cast<double>(values.size() - 1);
        size_t below = static_cast<size_t>(std::floor(rank));
        double frac = rank - static_cast<double>(below);
        if (below + 1 >= values.size()) return values.back();
        return values[below] + frac * (values[below + 1] - values[below]);
    };
    return percentile(0.75) - percentile(0.25);
}

// --------------------------------------------------------------------------
// Scott-Knott

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    long long more = 0, less = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++more;
            if (x < y) ++less;
        }
    return static_cast<double>(more - less) / (static_cast<double>(a.size()) * b.size());
}

// Efron's two-sample bootstrap test of equal means.
bool bootstrap_significant(const std::vector<double>& a, const std::vector<double>& b,
                           const ScottKnottConfig& config, Rng& rng) {
    double observed = std::abs(mean_of(a) - mean_of(b));
    if (observed == 0.0) return false;
    std::vector<double> all = a;
    all.insert(all.end(), b.begin(), b.end());
    double grand = mean_of(all);
    std::vector<double> sa(a.size()), sb(b.size());
    for (size_t i = 0; i < a.size(); ++i) sa[i] = a[i] - mean_of(a) + grand;
    for (size_t i = 0; i < b.size(); ++i) sb[i] = b[i] - mean_of(b) + grand;
    int extreme = 0;
    for (int r = 0; r < config.bootstrap_resamples; ++r) {
        double ma = 0, mb = 0;
        for (size_t i = 0; i < sa.size(); ++i) ma += sa[rng.uniform_index(sa.size())];
        for (size_t i = 0; i < sb.size(); ++i) mb += sb[rng.uniform_index(sb.size())];
        ma /= static_cast<double>(sa.size());
        mb /= static_cast<double>(sb.size());
        if (std::abs(ma - mb) >= observed) ++extreme;
    }
    return static_cast<double>(extreme) / config.bootstrap_resamples < config.alpha;
}

struct SkGroup {
    size_t original_index;
    const std::vector<double>* samples;
    double mean;
};

void sk_partition(std::vector<SkGroup>& groups, size_t lo, size_t hi, int& next_rank,
                  std::vector<int>& ranks, const ScottKnottConfig& config, Rng& rng) {
    if (hi - lo >= 2) {
        // best split of the mean-sorted list by between-group sum of squares
        double best_ss = -1.0;
        size_t best_split = lo;
        for (size_t split = lo + 1; split < hi; ++split) {
            double nl = 0, nr = 0, sl = 0, sr = 0;
            for (size_t i = lo; i < split; ++i) {
                nl += static_cast<double>(groups[i].samples->size());
                sl += groups[i].mean * static_cast<double>(groups[i].samples->size());
            }
            for (size_t i = split; i < hi; ++i) {
                nr += static_cast<double>(groups[i].samples->size());
                sr += groups[i].mean * static_cast<double>(groups[i].samples->size());
            }
            double grand = (sl + sr) / (nl + nr);
            double ss = nl * std::pow(sl / nl - grand, 2) + nr * std::pow(sr / nr - grand, 2);
            if (ss > best_ss) {
                best_ss = ss;
                best_split = split;
            }
        }
        std::vector<double> left, right;
        for (size_t i = lo; i < best_split; ++i)
            left.insert(left.end(), groups[i].samples->begin(), groups[i].samples->end());
        for (size_t i = best_split; i < hi; ++i)
            right.insert(right.end(), groups[i].samples->begin(), groups[i].samples->end());
        if (bootstrap_significant(left, right, config, rng) &&
            std::abs(cliffs_delta(left, right)) >= config.cliffs_delta_threshold) {
            sk_partition(groups, lo, best_split, next_rank, ranks, config, rng);
            sk_partition(groups, best_split, hi, next_rank, ranks, config, rng);
            return;
        }
    }
    int rank = next_rank++;
    for (size_t i = lo; i < hi; ++i) ranks[groups[i].original_index] = rank;
}

}  // namespace

std::vector<int> scott_knott_rank(const std::vector<std::vector<double>>& groups,
                                  const ScottKnottConfig& config) {
    if (groups.empty()) throw ContractError("scott_knott_rank: no groups");
    for (const auto& g : groups)
        if (g.empty()) throw ContractError("scott_knott_rank: empty group");
    std::vector<SkGroup> sorted(groups.size());
    for (size_t i = 0; i < groups.size(); ++i) sorted[i] = {i, &groups[i], mean_of(groups[i])};
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const SkGroup& a, const SkGroup& b) { return a.mean > b.mean; });
    std::vector<int> ranks(groups.size(), 1);
    int next_rank = 1;
    Rng rng(config.seed);
    sk_partition(sorted, 0, sorted.size(), next_rank, ranks, config, rng);
    return ranks;
}

// --------------------------------------------------------------------------
// Plan -> refactoring methods

namespace {

// Metric effect matrix of 16 refactoring methods. 0 none, +-1 firm
// increase/decrease, +-2 possible increase/decrease.
struct RefactoringEffect {
    const char* metric;
    int effect;
};

const std::vector<std::vector<RefactoringEffect>>& refactoring_matrix() {
    static const std::vector<std::vector<RefactoringEffect>> matrix = {
        /* 1 inline methods */
        {{"amc", -2}, {"avg_cc", 1}, {"loc", -2}, {"max_cc", 2}, {"npm", -2}, {"rfc", -1}, {"wmc", -1}},
        /* 2 extract method */
        {{"amc", 2}, {"avg_cc", -1}, {"loc", 2}, {"max_cc", -2}, {"npm", 2}, {"rfc", 1}, {"wmc", 1}},
        /* 3 extract class */
        {{"amc", -1}, {"avg_cc", -1}, {"cam", 2}, {"cbo", 1}, {"ce", 1}, {"lcom", -2},
         {"lcom3", -2}, {"loc", -1}, {"max_cc", -2}, {"moa", -2}, {"rfc", -1}, {"wmc", -1}},
        /* 4 inline class */
        {{"amc", 1}, {"avg_cc", 1}, {"cam", -2}, {"cbo", -1}, {"ce", -1}, {"lcom", 2},
         {"lcom3", 2}, {"loc", 1}, {"max_cc", 2}, {"moa", 2}, {"rfc", 1}, {"wmc", 1}},
        /* 5 move method */
        {{"amc", -1}, {"avg_cc", 2}, {"loc", -1}, {"max_cc", -2}, {"moa", -2}, {"npm", -2}, {"wmc", -1}},
        /* 6 hide delegate */
        {{"ca", -1}, {"cbo", -1}},
        /* 7 consolidate conditional */
        {{"amc", -1}, {"avg_cc", -1}, {"cam", -1}, {"lcom", 1}, {"lcom3", 1}, {"loc", -1},
         {"max_cc", -2}, {"rfc", 1}, {"wmc", 1}},
        /* 8 replace conditional with polymorphism */
        {{"amc", -1}, {"avg_cc", -1}, {"ce", 1}, {"dit", 1}, {"ic", 1}, {"max_cc", -2}, {"noc", 1}},
        /* 9 flatten conditional */
        {{"amc", -1}, {"avg_cc", -1}, {"loc", -1}, {"max_cc", -2}},
        /* 10 hide method */
        {{"cam", 1}, {"dam", 1}},
        /* 11 simplify parameters */
        {{"amc", -1}, {"avg_cc", -1}, {"max_cc", -1}},
        /* 12 factory method */
        {{"amc", 1}, {"avg_cc", 1}, {"loc", 1}, {"max_cc", 2}, {"rfc", 1}, {"wmc", 1}},
        /* 13 push down method */
        {{"amc", -1}, {"avg_cc", -2}, {"cbm", -1}, {"rfc", -1}, {"wmc", -1}},
        /* 14 encapsulate field */
        {{"cam", -1}, {"lcom", 1}, {"lcom3", 1}, {"loc", 1}, {"wmc", 1}},
        /* 15 extract subclass */
        {{"amc", -1}, {"avg_cc", -1}, {"ca", 1}, {"cam", 2}, {"ce", 1}, {"lcom", -2},
         {"lcom3", -2}, {"loc", -1}, {"max_cc", -2}, {"mfa", -1}, {"noc", 1}, {"rfc", -1}, {"wmc", -1}},
        /* 16 inline subclass */
        {{"amc", 1}, {"avg_cc", 1}, {"ca", -1}, {"cam", -2}, {"ce", -1}, {"lcom", 2},
         {"lcom3", 2}, {"loc", 1}, {"max_cc", 2}, {"mfa", 1}, {"noc", -1}, {"rfc", 1}, {"wmc", 1}},
    };
    return matrix;
}

}  // namespace

std::vector<int> map_to_refactorings(const Plan& plan, const std::vector<double>& unit_instance) {
    // planned direction per feature: where the target interval midpoint sits
    // relative to the instance's current value
    std::vector<int> direction(kNumMetrics, 0);
    bool any = false;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        if (!plan.targets[f].has_value()) continue;
        double mid = (plan.targets[f]->lo + plan.targets[f]->hi) / 2.0;
        direction[f] = mid > unit_instance[f] ? 1 : -1;
        any = true;
    }
    std::vector<int> methods;
    if (!any) return methods;

    const auto& matrix = refactoring_matrix();
    for (size_t m = 0; m < matrix.size(); ++m) {
        bool supports = false, contradicts = false;
        for (const auto& effect : matrix[m]) {
            int f = metric_index(effect.metric);
            if (direction[f] == 0) continue;
            int sign = effect.effect > 0 ? 1 : -1;
            bool firm = std::abs(effect.effect) == 1;
            if (sign == direction[f]) {
                if (firm) supports = true;  // '?' effects are optional, never support
            } else if (firm) {
                contradicts = true;
            }
        }
        if (supports && !contradicts) methods.push_back(static_cast<int>(m) + 1);
    }
    return methods;
}

// --------------------------------------------------------------------------
// K-test harness

const std::vector<std::string>& planner_names() {
    static const std::vector<std::string> names = {"random", "lime",     "timelime", "alves",
                                                   "shatnawi", "oliveira", "xtree"};
    return names;
}

ScoreReport ktest_run(const ReleaseTriple& triple, const std::string& planner,
                      const std::string& trial_name, const RunConfig& config) {
    if (std::find(planner_names().begin(), planner_names().end(), planner) ==
        planner_names().end())
        throw UsageError("unknown planner: " + planner);

    ScoreReport report;
    report.trial = trial_name;
    report.planner = planner;
    if (triple.matched_files.empty()) return report;

    NormalizationMap map = NormalizationMap::fit(triple.oldest, triple.newer);
    Release nx = normalize(triple.oldest, map);
    Release ny = normalize(triple.newer, map);
    Release nz = normalize(triple.most_recent, map);
    BinScheme bins = BinScheme::fit(nx.records);
    ChangeHistory history = ChangeHistory::mine(triple, map, bins);
    FeatureShift shift = hedge_g(nx, ny);

    const bool needs_model = planner == "lime" || planner == "timelime" || planner == "random";
    std::optional<ForestModel> forest;
    std::optional<TrainStats> stats;
    if (needs_model) {
        SmoteConfig smote_config;
        smote_config.k_neighbors = config.smote_k;
        smote_config.seed = derive_seed(config.seed, trial_name + ".smote");
        auto balanced = smote(nx.records, smote_config);
        ForestConfig forest_config;
        forest_config.n_trees = config.n_trees;
        forest_config.seed = derive_seed(config.seed, trial_name + ".forest");
        forest = ForestModel::fit(balanced, forest_config);
        stats = TrainStats::fit(nx.records, bins);
    }

    std::optional<ThresholdRuleSet> alves, shatnawi;
    std::vector<OliveiraRule> oliveira;
    std::optional<XtreePlanner> xtree;
    if (planner == "alves") alves = alves_rules(triple.oldest, map);
    if (planner == "shatnawi") shatnawi = shatnawi_rules(triple.oldest, map);
    if (planner == "oliveira") oliveira = oliveira_rules(triple.oldest, map);
    if (planner == "xtree") xtree = XtreePlanner::fit(nx, bins);

    std::vector<double> overlap_fracs, overlap_pcts, sizes;
    std::vector<int> ndpvs;
    for (size_t i = 0; i < triple.matched_files.size(); ++i) {
        const std::string& name = triple.matched_files[i];
        const std::vector<double>& y_inst = ny.find(name)->metrics;
        const std::vector<double>& z_inst = nz.find(name)->metrics;

        Plan plan;
        if (needs_model) {
            LimeConfig lime_config;
            lime_config.n_samples = config.lime_samples;
            // the same explanation stream for every planner keeps the random
            // baseline's plan sizes aligned with TimeLIME's
            lime_config.seed = derive_seed(config.seed, trial_name + ".lime", i);
            Explanation expl =
                explain_instance(forest->as_probability_fn(), y_inst, bins, *stats, lime_config);
            if (planner == "lime") {
                plan = classical_plan(expl, config.flip_mode);
            } else {
                Plan tl = timelime_plan(expl, shift, history, config.top_m, config.flip_mode);
                plan = planner == "timelime"
                           ? tl
                           : random_plan(static_cast<int>(tl.size()),
                                         derive_seed(config.seed, trial_name + ".random", i));
            }
        } else if (planner == "alves") {
            plan = alves->apply(y_inst, "alves");
        } else if (planner == "shatnawi") {
            plan = shatnawi->apply(y_inst, "shatnawi");
        } else if (planner == "oliveira") {
            plan = oliveira_apply(oliveira, y_inst);
        } else {
            plan = xtree->plan(y_inst);
        }

        OverlapScore score = overlap(plan, y_inst, z_inst, bins, config.overlap_semantics);
        FileReport file;
        file.file = name;
        file.plan_size = plan.size();
        file.overlap_pct = score.score;
        file.ndpv = compute_ndpv(triple, name);
        file.tp = score.tp;
        file.tn = score.tn;
        file.fp = score.fp;
        file.fn = score.fn;
        report.counts.tp += score.tp;
        report.counts.tn += score.tn;
        report.counts.fp += score.fp;
        report.counts.fn += score.fn;
        overlap_fracs.push_back(score.score / 100.0);
        overlap_pcts.push_back(score.score);
        sizes.push_back(static_cast<double>(plan.size()));
        ndpvs.push_back(file.ndpv);
        report.files.push_back(std::move(file));
    }

    report.median_overlap = median(overlap_pcts);
    report.iqr_overlap = iqr(overlap_pcts);
    report.mean_plan_size = mean_of(sizes);
    auto [s, scaled] = weighted_scores(overlap_fracs, ndpvs);
    report.weighted_score = s;
    report.scaled_score = scaled;
    auto [precision, recall] = precision_recall(report.counts);
    report.precision = precision;
    report.recall = recall;
    return report;
}

}  // namespace defplan

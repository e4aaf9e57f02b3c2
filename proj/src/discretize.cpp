#include "defplan/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "defplan/errors.hpp"

namespace defplan {

namespace {

struct Grouped {
    std::vector<double> value;  // distinct, ascending
    std::vector<size_t> pos;    // positive labels per value
    std::vector<size_t> total;  // observations per value
};

Grouped group_by_value(const std::vector<double>& values, const std::vector<bool>& labels) {
    std::vector<std::pair<double, bool>> pairs(values.size());
    for (size_t i = 0; i < values.size(); ++i) pairs[i] = {values[i], labels[i]};
    std::sort(pairs.begin(), pairs.end());
    Grouped g;
    for (const auto& [v, l] : pairs) {
        if (g.value.empty() || g.value.back() != v) {
            g.value.push_back(v);
            g.pos.push_back(0);
            g.total.push_back(0);
        }
        g.pos.back() += l ? 1 : 0;
        g.total.back() += 1;
    }
    return g;
}

double entropy(size_t pos, size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    double e = 0.0;
    if (p > 0) e -= p * std::log2(p);
    if (p < 1) e -= (1.0 - p) * std::log2(1.0 - p);
    return e;
}

int class_count(size_t pos, size_t total) {
    int k = 0;
    if (pos > 0) ++k;
    if (pos < total) ++k;
    return k;
}

// Recursive MDLP over value groups [lo, hi).
void mdlp(const Grouped& g, size_t lo, size_t hi, std::vector<double>& cuts) {
    size_t n = 0, pos = 0;
    for (size_t i = lo; i < hi; ++i) {
        n += g.total[i];
        pos += g.pos[i];
    }
    if (n < 2 || pos == 0 || pos == n) return;

    const double ent_s = entropy(pos, n);
    double best_gain = -1.0;
    size_t best_split = 0;  // cut between groups best_split-1 and best_split
    size_t best_ln = 0, best_lpos = 0;

    size_t ln = 0, lpos = 0;
    for (size_t i = lo + 1; i < hi; ++i) {
        ln += g.total[i - 1];
        lpos += g.pos[i - 1];
        size_t rn = n - ln, rpos = pos - lpos;
        double child = (ln * entropy(lpos, ln) + rn * entropy(rpos, rn)) / static_cast<double>(n);
        double gain = ent_s - child;
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_split = i;
            best_ln = ln;
            best_lpos = lpos;
        }
    }
    if (best_gain <= 0) return;

    // MDL stopping rule.
    const int k = class_count(pos, n);
    const int k1 = class_count(best_lpos, best_ln);
    const int k2 = class_count(pos - best_lpos, n - best_ln);
    const double ent_s1 = entropy(best_lpos, best_ln);
    const double ent_s2 = entropy(pos - best_lpos, n - best_ln);
    const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent_s - k1 * ent_s1 - k2 * ent_s2);
    const double threshold =
        (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
    if (best_gain <= threshold) return;

    cuts.push_back((g.value[best_split - 1] + g.value[best_split]) / 2.0);
    mdlp(g, lo, best_split, cuts);
    mdlp(g, best_split, hi, cuts);
}

}  // namespace

std::vector<double> fayyad_irani(const std::vector<double>& values,
                                 const std::vector<bool>& labels) {
    if (values.size() != labels.size()) throw ContractError("fayyad_irani: length mismatch");
    if (values.size() < 2) throw ContractError("fayyad_irani: need at least 2 observations");
    Grouped g = group_by_value(values, labels);
    std::vector<double> cuts;
    mdlp(g, 0, g.value.size(), cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

std::vector<double> quartile_cuts(const std::vector<double>& values) {
    if (values.size() < 4) throw ContractError("quartile_cuts: need at least 4 values");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    auto percentile = [&](double q) {
        double rank = q * static_cast<double>(sorted.size() - 1);
        size_t below = static_cast<size_t>(std::floor(rank));
        double frac = rank - static_cast<double>(below);
        if (below + 1 >= sorted.size()) return sorted.back();
        return sorted[below] + frac * (sorted[below + 1] - sorted[below]);
    };
    std::vector<double> cuts = {percentile(0.25), percentile(0.50), percentile(0.75)};
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (sorted.front() == sorted.back()) return {};
    // A cut equal to the global min or max creates an empty bin; drop it.
    std::erase_if(cuts, [&](double c) { return c <= sorted.front() || c >= sorted.back(); });
    return cuts;
}

BinScheme BinScheme::fit(const std::vector<MetricRecord>& normalized_records) {
    BinScheme scheme;
    if (normalized_records.size() < 2) return scheme;
    std::vector<double> values(normalized_records.size());
    std::vector<bool> labels(normalized_records.size());
    for (size_t i = 0; i < normalized_records.size(); ++i)
        labels[i] = normalized_records[i].defective();
    for (size_t f = 0; f < kNumMetrics; ++f) {
        for (size_t i = 0; i < normalized_records.size(); ++i)
            values[i] = normalized_records[i].metrics[f];
        std::vector<double> cuts;
        bool uniform_labels = std::all_of(labels.begin(), labels.end(),
                                          [&](bool l) { return l == labels[0]; });
        if (!uniform_labels) cuts = fayyad_irani(values, labels);
        if (cuts.empty() && values.size() >= 4) cuts = quartile_cuts(values);
        scheme.set_cuts(f, std::move(cuts));
    }
    return scheme;
}

void BinScheme::set_cuts(size_t feature, std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts_[feature] = std::move(cuts);
}

size_t BinScheme::bin_of(size_t feature, double value) const {
    const auto& cuts = cuts_[feature];
    return static_cast<size_t>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

std::pair<double, double> BinScheme::bin_interval(size_t feature, size_t bin) const {
    const auto& cuts = cuts_[feature];
    if (bin > cuts.size()) throw ContractError("bin_interval: bin out of range");
    double lo = bin == 0 ? 0.0 : cuts[bin - 1];
    double hi = bin == cuts.size() ? 1.0 : cuts[bin];
    return {lo, hi};
}

}  // namespace defplan

#include "defplan/explain.hpp"

#include <algorithm>
#include <cmath>

#include "defplan/errors.hpp"
#include "defplan/rng.hpp"

namespace defplan {

namespace {

// Solve A c = b for a small symmetric system, with a light ridge term to
// keep degenerate designs (e.g. constant model output) well posed.
std::vector<double> solve_ridge(std::vector<std::vector<double>> a, std::vector<double> b,
                                double ridge) {
    const size_t n = b.size();
    for (size_t i = 1; i < n; ++i) a[i][i] += ridge;  // never penalize the intercept
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (std::abs(a[col][col]) < 1e-300) continue;
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> c(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        if (std::abs(a[i][i]) >= 1e-300) c[i] = b[i] / a[i][i];
    return c;
}

}  // namespace

TrainStats TrainStats::fit(const std::vector<MetricRecord>& normalized_records,
                           const BinScheme& bins) {
    TrainStats stats;
    stats.bin_frequency.resize(kNumMetrics);
    for (size_t f = 0; f < kNumMetrics; ++f) {
        stats.bin_frequency[f].assign(bins.n_bins(f), 0.0);
        for (const auto& r : normalized_records)
            stats.bin_frequency[f][bins.bin_of(f, r.metrics[f])] += 1.0;
        double total = 0.0;
        for (double c : stats.bin_frequency[f]) total += c;
        if (total > 0)
            for (double& c : stats.bin_frequency[f]) c /= total;
        else
            stats.bin_frequency[f].assign(bins.n_bins(f), 1.0 / bins.n_bins(f));
    }
    return stats;
}

Explanation explain_instance(const ProbabilityFn& model, const std::vector<double>& instance,
                             const BinScheme& bins, const TrainStats& stats,
                             const LimeConfig& config) {
    if (instance.size() != kNumMetrics)
        throw ContractError("explain_instance: instance must have 20 values");
    if (config.n_samples < 1) throw ContractError("explain_instance: n_samples must be >= 1");

    std::vector<int> features;  // binned features, in feature order
    for (size_t f = 0; f < kNumMetrics; ++f)
        if (bins.binned(f)) features.push_back(static_cast<int>(f));

    Explanation expl;
    expl.instance = instance;
    expl.predicted_defect_probability = model(instance);
    if (features.empty()) return expl;  // all-constant features: empty explanation

    const size_t m = features.size();
    const double kernel_width =
        config.kernel_width > 0 ? config.kernel_width : 0.75 * std::sqrt(double(kNumMetrics));
    std::vector<size_t> instance_bin(m);
    for (size_t j = 0; j < m; ++j) instance_bin[j] = bins.bin_of(features[j], instance[features[j]]);

    // Perturbation sampling in discretized space. Each sample is represented
    // in binary indicator space (1 iff same bin as the instance); a concrete
    // value drawn uniformly inside the sampled bin is what the model sees.
    Rng rng(config.seed);
    const size_t n = static_cast<size_t>(config.n_samples);
    std::vector<std::vector<uint8_t>> indicator(n, std::vector<uint8_t>(m));
    std::vector<double> target(n), pi(n);
    std::vector<double> probe = instance;
    for (size_t s = 0; s < n; ++s) {
        size_t mismatches = 0;
        for (size_t j = 0; j < m; ++j) {
            const int f = features[j];
            const auto& freq = stats.bin_frequency[f];
            double u = rng.uniform(), acc = 0.0;
            size_t bin = freq.size() - 1;
            for (size_t b = 0; b < freq.size(); ++b) {
                acc += freq[b];
                if (u < acc) {
                    bin = b;
                    break;
                }
            }
            indicator[s][j] = bin == instance_bin[j] ? 1 : 0;
            if (!indicator[s][j]) ++mismatches;
            auto [lo, hi] = bins.bin_interval(f, bin);
            probe[f] = lo + rng.uniform() * (hi - lo);
        }
        double p = model(probe);
        if (p < -1e-9 || p > 1.0 + 1e-9)
            throw ContractError("explain_instance: model probability outside [0,1]");
        target[s] = p;
        pi[s] = std::exp(-static_cast<double>(mismatches) / (kernel_width * kernel_width));
    }

    // Weighted Gram over [1, indicators]; every candidate fit reuses it.
    const size_t dim = m + 1;
    std::vector<std::vector<double>> gram(dim, std::vector<double>(dim, 0.0));
    std::vector<double> xty(dim, 0.0);
    for (size_t s = 0; s < n; ++s) {
        const double w = pi[s];
        gram[0][0] += w;
        xty[0] += w * target[s];
        for (size_t j = 0; j < m; ++j) {
            if (!indicator[s][j]) continue;
            gram[0][j + 1] += w;
            gram[j + 1][0] += w;
            xty[j + 1] += w * target[s];
            for (size_t k2 = j; k2 < m; ++k2) {
                if (!indicator[s][k2]) continue;
                gram[j + 1][k2 + 1] += w;
                if (k2 != j) gram[k2 + 1][j + 1] += w;
            }
        }
    }

    auto fit_subset = [&](const std::vector<size_t>& subset) {
        const size_t d = subset.size() + 1;
        std::vector<std::vector<double>> a(d, std::vector<double>(d));
        std::vector<double> b(d);
        a[0][0] = gram[0][0];
        b[0] = xty[0];
        for (size_t i = 0; i < subset.size(); ++i) {
            a[0][i + 1] = a[i + 1][0] = gram[0][subset[i] + 1];
            b[i + 1] = xty[subset[i] + 1];
            for (size_t j = 0; j < subset.size(); ++j)
                a[i + 1][j + 1] = gram[subset[i] + 1][subset[j] + 1];
        }
        return solve_ridge(std::move(a), std::move(b), 1e-8);
    };
    auto rss_of = [&](const std::vector<size_t>& subset, const std::vector<double>& coef) {
        // residual = yWy - b^T c (exact at the least-squares optimum)
        double fitq = coef[0] * xty[0];
        for (size_t i = 0; i < subset.size(); ++i) fitq += coef[i + 1] * xty[subset[i] + 1];
        return -fitq;  // yWy is constant across subsets; omit it
    };

    // Forward-selection lasso path of k_features steps.
    const size_t k_features = std::min<size_t>(std::max(config.k_features, 1), m);
    std::vector<size_t> selected;
    std::vector<bool> in_model(m, false);
    for (size_t step = 0; step < k_features; ++step) {
        double best_rss = 0.0;
        int best_j = -1;
        for (size_t j = 0; j < m; ++j) {
            if (in_model[j]) continue;
            selected.push_back(j);
            auto coef = fit_subset(selected);
            double rss = rss_of(selected, coef);
            selected.pop_back();
            if (best_j < 0 || rss < best_rss - 1e-12) {
                best_rss = rss;
                best_j = static_cast<int>(j);
            }
        }
        selected.push_back(static_cast<size_t>(best_j));
        in_model[best_j] = true;
    }

    auto coef = fit_subset(selected);
    std::vector<double> weight(m, 0.0);
    for (size_t i = 0; i < selected.size(); ++i) weight[selected[i]] = coef[i + 1];

    for (size_t j = 0; j < m; ++j) {
        ExplanationEntry entry;
        entry.feature = features[j];
        entry.weight = weight[j];
        auto [lo, hi] = bins.bin_interval(features[j], instance_bin[j]);
        entry.interval_lo = lo;
        entry.interval_hi = hi;
        expl.entries.push_back(entry);
    }
    return expl;
}

}  // namespace defplan

#include "defplan/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "defplan/errors.hpp"

namespace defplan {

const std::array<std::string, kNumMetrics>& metric_names() {
    static const std::array<std::string, kNumMetrics> names = {
        "wmc",  "dit", "noc", "cbo",   "rfc", "lcom", "ca",  "ce",  "npm",    "lcom3",
        "loc",  "dam", "moa", "mfa",   "cam", "ic",   "cbm", "amc", "max_cc", "avg_cc"};
    return names;
}

int metric_index(const std::string& name) {
    const auto& names = metric_names();
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

const MetricRecord* Release::find(const std::string& file_name) const {
    for (const auto& r : records)
        if (r.file_name == file_name) return &r;
    return nullptr;
}

void Release::recompute_bounds() {
    feature_bounds.assign(kNumMetrics, std::nullopt);
    if (records.empty()) return;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& r : records) {
            lo = std::min(lo, r.metrics[f]);
            hi = std::max(hi, r.metrics[f]);
        }
        feature_bounds[f] = std::make_pair(lo, hi);
    }
}

NormalizationMap NormalizationMap::fit(const Release& x, const Release& y) {
    NormalizationMap map;
    for (size_t f = 0; f < kNumMetrics; ++f) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const Release* rel : {&x, &y}) {
            for (const auto& r : rel->records) {
                lo = std::min(lo, r.metrics[f]);
                hi = std::max(hi, r.metrics[f]);
            }
        }
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 0.0;
        }
        map.lo_[f] = lo;
        map.hi_[f] = hi;
    }
    return map;
}

double NormalizationMap::to_unit(size_t feature, double raw, bool clamp) const {
    if (constant(feature)) return 0.0;
    double u = (raw - lo_[feature]) / (hi_[feature] - lo_[feature]);
    if (clamp) u = std::clamp(u, 0.0, 1.0);
    return u;
}

double NormalizationMap::to_raw(size_t feature, double unit) const {
    if (constant(feature)) return lo_[feature];
    return lo_[feature] + unit * (hi_[feature] - lo_[feature]);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Release load_release(const std::string& path, const std::string& version_id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("empty dataset file: " + path);
    auto header = split_csv_line(header_line);
    for (auto& h : header) h = trimmed(h);

    auto column_of = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };

    int name_col = column_of("name");
    if (name_col < 0) throw DataError(path + ": missing required column 'name'");
    int bug_col = column_of("bug");
    if (bug_col < 0) throw DataError(path + ": missing required column 'bug'");
    std::vector<int> metric_cols(kNumMetrics);
    for (size_t f = 0; f < kNumMetrics; ++f) {
        metric_cols[f] = column_of(metric_names()[f]);
        if (metric_cols[f] < 0)
            throw DataError(path + ": missing required column '" + metric_names()[f] + "'");
    }

    Release release;
    release.version_id = version_id;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trimmed(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() < header.size())
            throw DataError(path + ": row " + std::to_string(row) + " has too few columns");

        MetricRecord rec;
        rec.file_name = trimmed(cells[name_col]);
        rec.metrics.resize(kNumMetrics);
        for (size_t f = 0; f < kNumMetrics; ++f) {
            const std::string cell = trimmed(cells[metric_cols[f]]);
            try {
                size_t pos = 0;
                rec.metrics[f] = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw DataError(path + ": row " + std::to_string(row) + ", column '" +
                                metric_names()[f] + "': non-numeric value '" + cell + "'");
            }
            if (!std::isfinite(rec.metrics[f]))
                throw DataError(path + ": row " + std::to_string(row) + ", column '" +
                                metric_names()[f] + "': non-finite value");
        }
        const std::string bug_cell = trimmed(cells[bug_col]);
        try {
            // Some published CSVs carry bug counts as decimals ("2.0").
            double b = std::stod(bug_cell);
            if (b < 0) throw std::invalid_argument(bug_cell);
            rec.bug_count = static_cast<int>(std::lround(b));
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(row) +
                            ": bad bug count '" + bug_cell + "'");
        }
        release.records.push_back(std::move(rec));
    }
    release.recompute_bounds();
    return release;
}

ReleaseTriple build_triple(Release x, Release y, Release z) {
    ReleaseTriple triple;
    std::unordered_set<std::string> in_x, in_z;
    for (const auto& r : x.records) in_x.insert(r.file_name);
    for (const auto& r : z.records) in_z.insert(r.file_name);
    for (const auto& r : y.records) {
        if (r.defective() && in_x.count(r.file_name) && in_z.count(r.file_name))
            triple.matched_files.push_back(r.file_name);
    }
    std::sort(triple.matched_files.begin(), triple.matched_files.end());
    triple.oldest = std::move(x);
    triple.newer = std::move(y);
    triple.most_recent = std::move(z);
    return triple;
}

int compute_ndpv(const ReleaseTriple& triple, const std::string& file_name) {
    if (!std::binary_search(triple.matched_files.begin(), triple.matched_files.end(), file_name))
        throw DataError("file not in matched set: " + file_name);
    const MetricRecord* in_y = triple.newer.find(file_name);
    const MetricRecord* in_z = triple.most_recent.find(file_name);
    if (!in_y || !in_z) throw ContractError("matched file missing from release: " + file_name);
    return in_y->bug_count - in_z->bug_count;
}

Release normalize(const Release& release, const NormalizationMap& map) {
    Release out = release;
    for (auto& r : out.records)
        for (size_t f = 0; f < kNumMetrics; ++f)
            r.metrics[f] = map.to_unit(f, r.metrics[f], /*clamp=*/true);
    out.recompute_bounds();
    return out;
}

std::vector<Trial> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path);
    std::vector<Trial> trials;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::string body = trimmed(line);
        if (body.empty() || body[0] == '#') continue;
        size_t colon = body.find(':');
        if (colon == std::string::npos)
            throw DataError(path + ": line " + std::to_string(row) +
                            ": expected 'name: x.csv y.csv z.csv'");
        Trial t;
        t.name = trimmed(body.substr(0, colon));
        std::stringstream rest(body.substr(colon + 1));
        if (!(rest >> t.x_path >> t.y_path >> t.z_path) || t.name.empty())
            throw DataError(path + ": line " + std::to_string(row) +
                            ": expected 'name: x.csv y.csv z.csv'");
        std::string extra;
        if (rest >> extra)
            throw DataError(path + ": line " + std::to_string(row) + ": trailing token '" +
                            extra + "'");
        trials.push_back(std::move(t));
    }
    return trials;
}

}  // namespace defplan

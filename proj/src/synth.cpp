#include "defplan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "defplan/data.hpp"
#include "defplan/errors.hpp"
#include "defplan/rng.hpp"

namespace defplan {

namespace {

// A file's state across the simulated releases.
struct SimFile {
    std::string name;
    std::vector<double> x, y, z;  // metric values per release, raw scale 0..100
};

struct TrialShape {
    size_t n_files;
    std::vector<int> risky;     // high values raise defect odds; fixes decrease them
    std::vector<int> protective;  // low values raise defect odds; fixes increase them
    double worsen_prob;
    double improve_prob;
    double fix_prob;
};

double defect_score(const std::vector<double>& v, const TrialShape& shape) {
    double s = 0.0;
    for (int f : shape.risky) s += v[f] / 100.0;
    for (int f : shape.protective) s += 1.0 - v[f] / 100.0;
    return s;
}

int bug_count(const std::vector<double>& v, const TrialShape& shape, double noise) {
    double margin = defect_score(v, shape) + noise -
                    0.55 * static_cast<double>(shape.risky.size() + shape.protective.size());
    if (margin <= 0) return 0;
    return 1 + static_cast<int>(std::floor(margin * 3.0));
}

double clamp01_100(double v) { return std::clamp(v, 0.0, 100.0); }

// Developer-style improvement: push a bad metric value toward the healthy
// end of its range.
void improve_feature(std::vector<double>& v, int f, bool risky, Rng& rng) {
    double target = 100.0 - v[f];  // mirror across the range midpoint
    double jitter = (rng.uniform() - 0.5) * 10.0;
    if (risky)
        v[f] = clamp01_100(std::min(v[f], target + jitter));
    else
        v[f] = clamp01_100(std::max(v[f], target + jitter));
}

void worsen_feature(std::vector<double>& v, int f, bool risky, Rng& rng) {
    double delta = 15.0 + rng.uniform() * 25.0;
    v[f] = clamp01_100(risky ? v[f] + delta : v[f] - delta);
}

void write_release(const std::string& path, const std::vector<SimFile>& files,
                   const std::vector<double> SimFile::*release, const std::vector<int>& bugs) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "name";
    for (const auto& m : metric_names()) out << "," << m;
    out << ",bug\n";
    char buf[32];
    for (size_t i = 0; i < files.size(); ++i) {
        out << files[i].name;
        for (double v : files[i].*release) {
            std::snprintf(buf, sizeof(buf), "%.4f", v);
            out << "," << buf;
        }
        out << "," << bugs[i] << "\n";
    }
}

}  // namespace

std::string generate_benchmark(const std::string& out_dir, uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
    if (!manifest) throw DataError("cannot write manifest in " + out_dir);
    manifest << "# synthetic CK-metric benchmark, seed " << seed << "\n";

    for (int trial = 0; trial < 9; ++trial) {
        Rng rng(derive_seed(seed, "synth.trial", static_cast<uint64_t>(trial)));
        TrialShape shape;
        shape.n_files = 150 + 14 * static_cast<size_t>(trial);
        for (int j = 0; j < 4; ++j) shape.risky.push_back((trial * 3 + j * 5) % 20);
        for (int j = 0; j < 2; ++j) {
            int f = (trial * 3 + 3 + j * 7) % 20;
            while (std::count(shape.risky.begin(), shape.risky.end(), f) ||
                   std::count(shape.protective.begin(), shape.protective.end(), f))
                f = (f + 1) % 20;
            shape.protective.push_back(f);
        }
        shape.worsen_prob = 0.30 + 0.02 * trial;
        shape.improve_prob = 0.35;
        shape.fix_prob = 0.68 + 0.01 * trial;

        auto is_risky = [&](int f) {
            return std::count(shape.risky.begin(), shape.risky.end(), f) > 0;
        };
        auto active = shape.risky;
        active.insert(active.end(), shape.protective.begin(), shape.protective.end());

        std::vector<SimFile> files(shape.n_files);
        std::vector<int> bugs_x(shape.n_files), bugs_y(shape.n_files), bugs_z(shape.n_files);
        for (size_t i = 0; i < shape.n_files; ++i) {
            SimFile& file = files[i];
            char name[32];
            std::snprintf(name, sizeof(name), "src/F%03zu.java", i);
            file.name = name;
            file.x.resize(kNumMetrics);
            for (size_t f = 0; f < kNumMetrics; ++f) file.x[f] = rng.uniform() * 100.0;
            bugs_x[i] = bug_count(file.x, shape, (rng.uniform() - 0.5) * 0.4);

            // release y: drift; some files degrade, some get refactored
            file.y = file.x;
            double move = rng.uniform();
            size_t touched = 1 + rng.uniform_index(3);
            if (move < shape.worsen_prob) {
                for (size_t j = 0; j < touched; ++j) {
                    int f = active[rng.uniform_index(active.size())];
                    worsen_feature(file.y, f, is_risky(f), rng);
                }
            } else if (move < shape.worsen_prob + shape.improve_prob) {
                for (size_t j = 0; j < touched + 1; ++j) {
                    int f = active[rng.uniform_index(active.size())];
                    improve_feature(file.y, f, is_risky(f), rng);
                }
            }
            for (size_t f = 0; f < kNumMetrics; ++f)
                file.y[f] = clamp01_100(file.y[f] + (rng.uniform() - 0.5) * 3.0);
            bugs_y[i] = bug_count(file.y, shape, (rng.uniform() - 0.5) * 0.4);

            // release z: most defective files get fixed along the active
            // features, mirroring what y's history already shows
            file.z = file.y;
            if (bugs_y[i] > 0 && rng.uniform() < shape.fix_prob) {
                for (int f : active) {
                    bool bad = is_risky(f) ? file.z[f] > 55.0 : file.z[f] < 45.0;
                    if (bad && rng.uniform() < 0.8) improve_feature(file.z, f, is_risky(f), rng);
                }
            } else if (rng.uniform() < 0.15) {
                int f = active[rng.uniform_index(active.size())];
                worsen_feature(file.z, f, is_risky(f), rng);
            }
            for (size_t f = 0; f < kNumMetrics; ++f)
                file.z[f] = clamp01_100(file.z[f] + (rng.uniform() - 0.5) * 3.0);
            bugs_z[i] = bug_count(file.z, shape, (rng.uniform() - 0.5) * 0.4);
        }

        char trial_name[16];
        std::snprintf(trial_name, sizeof(trial_name), "synth%02d", trial + 1);
        for (auto [suffix, release, bugs] :
             {std::tuple{"x", &SimFile::x, &bugs_x}, std::tuple{"y", &SimFile::y, &bugs_y},
              std::tuple{"z", &SimFile::z, &bugs_z}}) {
            std::string file_name = std::string(trial_name) + "_" + suffix + ".csv";
            write_release((fs::path(out_dir) / file_name).string(), files, release, *bugs);
        }
        manifest << trial_name << ": " << trial_name << "_x.csv " << trial_name << "_y.csv "
                 << trial_name << "_z.csv\n";
    }
    return (fs::path(out_dir) / "manifest.txt").string();
}

}  // namespace defplan

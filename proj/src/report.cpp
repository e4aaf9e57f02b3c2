#include "defplan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "defplan/errors.hpp"

namespace defplan {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void write_file_csv(const std::string& path, const ScoreReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write report: " + path);
    out << "file,plan_size,overlap_pct,ndpv,tp,tn,fp,fn\n";
    for (const auto& f : report.files)
        out << f.file << "," << f.plan_size << "," << fmt(f.overlap_pct) << "," << f.ndpv << ","
            << f.tp << "," << f.tn << "," << f.fp << "," << f.fn << "\n";
}

json report_json(const ScoreReport& r) {
    json j;
    j["files"] = r.files.size();
    j["median_overlap"] = fmt(r.median_overlap);
    j["iqr_overlap"] = fmt(r.iqr_overlap);
    j["mean_plan_size"] = fmt(r.mean_plan_size);
    j["weighted_score"] = fmt(r.weighted_score);
    j["scaled_score"] = r.scaled_score ? json(fmt(*r.scaled_score)) : json(nullptr);
    j["precision"] = r.precision ? json(fmt(*r.precision)) : json(nullptr);
    j["recall"] = r.recall ? json(fmt(*r.recall)) : json(nullptr);
    json counts;
    counts["tp"] = r.counts.tp;
    counts["tn"] = r.counts.tn;
    counts["fp"] = r.counts.fp;
    counts["fn"] = r.counts.fn;
    j["counts"] = counts;
    return j;
}

}  // namespace

std::string report_csv_path(const std::string& out_dir, const std::string& trial,
                            const std::string& planner) {
    return (fs::path(out_dir) / (trial + "_" + planner + ".csv")).string();
}

std::vector<ScoreReport> run_experiment(const std::string& manifest_path,
                                        const std::vector<std::string>& planners,
                                        const RunConfig& config, const std::string& out_dir) {
    for (const auto& p : planners)
        if (std::find(planner_names().begin(), planner_names().end(), p) == planner_names().end())
            throw UsageError("unknown planner: " + p);

    auto trials = load_manifest(manifest_path);
    if (trials.empty()) throw DataError("manifest declares no trials: " + manifest_path);
    fs::create_directories(out_dir);
    const fs::path base = fs::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() ? path.string() : (base / path).string();
    };

    std::vector<ScoreReport> reports;
    json summary;
    for (const auto& trial : trials) {
        Release x = load_release(resolve(trial.x_path), trial.name + ".x");
        Release y = load_release(resolve(trial.y_path), trial.name + ".y");
        Release z = load_release(resolve(trial.z_path), trial.name + ".z");
        ReleaseTriple triple = build_triple(std::move(x), std::move(y), std::move(z));

        json trial_json;
        std::vector<std::vector<double>> overlap_groups;
        std::vector<std::string> group_names;
        for (const auto& planner : planners) {
            ScoreReport report = ktest_run(triple, planner, trial.name, config);
            write_file_csv(report_csv_path(out_dir, trial.name, planner), report);
            trial_json[planner] = report_json(report);
            if (!report.files.empty()) {
                std::vector<double> pcts;
                for (const auto& f : report.files) pcts.push_back(f.overlap_pct);
                overlap_groups.push_back(std::move(pcts));
                group_names.push_back(planner);
            }
            reports.push_back(std::move(report));
        }
        if (overlap_groups.size() >= 2) {
            auto ranks = scott_knott_rank(overlap_groups);
            json rank_json;
            for (size_t i = 0; i < group_names.size(); ++i) rank_json[group_names[i]] = ranks[i];
            trial_json["overlap_rank"] = rank_json;
        }
        summary["trials"][trial.name] = trial_json;
    }

    json meta;
    meta["manifest"] = manifest_path;
    meta["planners"] = planners;
    meta["top_m"] = config.top_m;
    meta["seed"] = config.seed;
    meta["lime_samples"] = config.lime_samples;
    meta["lime_kernel_width"] = "0.75*sqrt(20)";
    meta["smote_k"] = config.smote_k;
    meta["smote_target_ratio"] = 1.0;
    meta["n_trees"] = config.n_trees;
    meta["flip"] = config.flip_mode == FlipMode::kMirror ? "mirror" : "complement";
    meta["overlap"] =
        config.overlap_semantics == OverlapSemantics::kTable5 ? "table5" : "jaccard";

    std::ofstream meta_out(fs::path(out_dir) / "run_metadata.json");
    meta_out << meta.dump(2) << "\n";
    std::ofstream summary_out(fs::path(out_dir) / "summary.json");
    summary_out << summary.dump(2) << "\n";
    return reports;
}

}  // namespace defplan

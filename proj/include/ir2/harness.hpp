#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ir2/metrics.hpp"
#include "ir2/runner.hpp"

namespace ir2 {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct aggregation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- run configuration <-> JSON -------------------------------------------

inline std::string to_string(MetricKind k)
{
    switch (k) {
    case MetricKind::asf: return "asf";
    case MetricKind::pdm: return "pdm";
    case MetricKind::pbi: return "pbi";
    }
    return "?";
}

inline MetricKind parse_metric(const std::string& s)
{
    if (s == "asf") {
        return MetricKind::asf;
    }
    if (s == "pdm") {
        return MetricKind::pdm;
    }
    if (s == "pbi") {
        return MetricKind::pbi;
    }
    throw config_error("unknown association metric '" + s + "'");
}

inline json to_json(const RunConfig& c)
{
    json j{{"problem", c.problem},
           {"objectives", c.objectives},
           {"algorithm", to_string(c.algorithm)},
           {"ir2", c.ir2},
           {"pop_size", c.pop_size},
           {"generations", c.generations},
           {"seed", c.seed},
           {"p_c", c.genetic.p_c},
           {"eta_c", c.genetic.eta_c},
           {"p_m", c.genetic.p_m},
           {"eta_m", c.genetic.eta_m},
           {"t_past", c.ir2_settings.t_past},
           {"t_freq", c.ir2_settings.t_freq},
           {"eta", c.ir2_settings.eta},
           {"g_th", c.ir2_settings.g_th},
           {"repair_fraction", c.ir2_settings.repair_fraction},
           {"n_jobs", c.ir2_settings.n_jobs},
           {"neighborhood", c.moead.neighborhood},
           {"delta", c.moead.delta},
           {"n_r", c.moead.n_r},
           {"theta", c.moead.theta},
           {"gaps", c.gaps},
           {"shrink", c.shrink},
           {"record_metrics", c.record_metrics},
           {"front_samples", c.front_samples}};
    if (c.association) {
        j["association"] = to_string(*c.association);
    }
    if (c.wfg) {
        j["wfg"] = {{"A", c.wfg->A}, {"B", c.wfg->B}, {"C", c.wfg->C}};
    }
    return j;
}

/// Overlays the keys of j onto base. Unknown keys are rejected.
inline RunConfig run_config_from_json(const json& j, RunConfig c = {})
{
    if (!j.is_object()) {
        throw config_error("run configuration must be a JSON object");
    }
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "problem") c.problem = v.get<std::string>();
            else if (key == "objectives") c.objectives = v.get<std::size_t>();
            else if (key == "algorithm") c.algorithm = parse_algorithm(v.get<std::string>());
            else if (key == "ir2") c.ir2 = v.get<bool>();
            else if (key == "pop_size") c.pop_size = v.get<std::size_t>();
            else if (key == "generations") c.generations = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "p_c") c.genetic.p_c = v.get<double>();
            else if (key == "eta_c") c.genetic.eta_c = v.get<double>();
            else if (key == "p_m") c.genetic.p_m = v.get<double>();
            else if (key == "eta_m") c.genetic.eta_m = v.get<double>();
            else if (key == "t_past") c.ir2_settings.t_past = v.get<int>();
            else if (key == "t_freq") c.ir2_settings.t_freq = v.get<int>();
            else if (key == "eta") c.ir2_settings.eta = v.get<double>();
            else if (key == "g_th") c.ir2_settings.g_th = v.get<double>();
            else if (key == "repair_fraction") c.ir2_settings.repair_fraction = v.get<double>();
            else if (key == "n_jobs") c.ir2_settings.n_jobs = v.get<std::size_t>();
            else if (key == "neighborhood") c.moead.neighborhood = v.get<std::size_t>();
            else if (key == "delta") c.moead.delta = v.get<double>();
            else if (key == "n_r") c.moead.n_r = v.get<std::size_t>();
            else if (key == "theta") c.moead.theta = v.get<double>();
            else if (key == "gaps") c.gaps = v.get<std::vector<int>>();
            else if (key == "shrink") c.shrink = v.get<std::vector<double>>();
            else if (key == "association") c.association = parse_metric(v.get<std::string>());
            else if (key == "record_metrics") c.record_metrics = v.get<bool>();
            else if (key == "front_samples") c.front_samples = v.get<std::size_t>();
            else if (key == "wfg") c.wfg = WfgParams{v.at("A").get<double>(), v.at("B").get<double>(), v.at("C").get<double>()};
            else throw config_error("unknown configuration key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("bad configuration value: ") + e.what());
    }
    return c;
}

// ---- experiment -----------------------------------------------------------

struct ExperimentConfig {
    std::vector<RunConfig> runs; // templates; the seed field is replaced per run
    std::vector<std::uint64_t> seeds;
    fs::path output = "results";
    std::size_t snapshot_every = 0; // population snapshots every k generations; 0 = never
    std::size_t workers = 1;

    void validate() const
    {
        if (seeds.empty()) {
            throw config_error("experiment: seed list is empty");
        }
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
            throw config_error("experiment: duplicate seeds");
        }
        if (runs.empty()) {
            throw config_error("experiment: no run templates");
        }
        std::set<std::string> labels;
        for (const auto& r : runs) {
            ir2::validate(r);
            if (!labels.insert(r.label()).second) {
                throw config_error("experiment: duplicate run label " + r.label());
            }
        }
    }
};

/// Top-level keys: output, seeds, workers, snapshot_every, defaults (run keys
/// applied to every template) and runs (list of run-key objects).
inline ExperimentConfig experiment_from_json(const json& j)
{
    ExperimentConfig e;
    RunConfig defaults;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "output") e.output = v.get<std::string>();
            else if (key == "seeds") e.seeds = v.get<std::vector<std::uint64_t>>();
            else if (key == "workers") e.workers = v.get<std::size_t>();
            else if (key == "snapshot_every") e.snapshot_every = v.get<std::size_t>();
            else if (key == "defaults") defaults = run_config_from_json(v, defaults);
            else if (key != "runs") throw config_error("unknown experiment key '" + key + "'");
        }
        if (!j.contains("runs") || !j.at("runs").is_array()) {
            throw config_error("experiment: 'runs' must be a list");
        }
        for (const auto& r : j.at("runs")) {
            e.runs.push_back(run_config_from_json(r, defaults));
        }
    } catch (const json::exception& ex) {
        throw config_error(std::string("bad experiment file: ") + ex.what());
    }
    e.validate();
    return e;
}

inline ExperimentConfig load_experiment(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open experiment file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw config_error(path.string() + ": " + ex.what());
    }
    return experiment_from_json(j);
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count)
{
    std::vector<std::uint64_t> s(count);
    for (std::size_t i = 0; i < count; ++i) {
        s[i] = first + i;
    }
    return s;
}

/// Built-in sweeps. Generation counts match the observation points used in reports.
inline ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig e;
    e.seeds = seed_range(1, 11);
    e.output = "results/" + name;
    auto pair = [&](std::string problem, std::size_t M, Algorithm a, int generations) {
        RunConfig r;
        r.problem = std::move(problem);
        r.objectives = M;
        r.algorithm = a;
        r.generations = generations;
        r.ir2 = false;
        e.runs.push_back(r);
        r.ir2 = true;
        e.runs.push_back(r);
    };
    if (name == "zdt") {
        for (const char* p : {"ZDT1", "ZDT2", "ZDT3", "ZDT4", "ZDT6"}) {
            pair(p, 2, Algorithm::nsga2, 100);
        }
    } else if (name == "wfg-nsga3" || name == "wfg-moead") {
        const Algorithm a = name == "wfg-nsga3" ? Algorithm::nsga3 : Algorithm::moead;
        for (int i = 1; i <= 9; ++i) {
            pair("WFG" + std::to_string(i), 3, a, 100);
        }
    } else if (name == "dtlz") {
        for (int i = 1; i <= 4; ++i) {
            for (std::size_t M : {3, 4, 5}) {
                pair("DTLZ" + std::to_string(i), M, Algorithm::nsga3, 300);
            }
        }
    } else if (name == "wfg-mod") {
        for (const char* p : {"WFG4-mod", "WFG7-mod"}) {
            pair(p, 3, Algorithm::nsga3, 100);
        }
    } else {
        throw config_error("unknown preset '" + name + "' (zdt, wfg-nsga3, wfg-moead, dtlz, wfg-mod)");
    }
    e.validate();
    return e;
}

inline std::vector<std::string> preset_names() { return {"zdt", "wfg-nsga3", "wfg-moead", "dtlz", "wfg-mod"}; }

// ---- trace files ----------------------------------------------------------
//
// One JSON object per line:
//   {"type":"header","label":...,"seed":...,"pop_size":...,"config":{...}}
//   {"type":"generation","gen":...,"evals":...,"hv":...,"gd":...,"igd":...,"flag":...,"G":...,"rows":...}
//   {"type":"population","gen":...,"x":[[...]],"f":[[...]]}      (snapshots only)
//   {"type":"complete","evaluations":...}
// A file without the final line is treated as unfinished and rerun from its seed.

inline fs::path trace_path(const fs::path& dir, const std::string& label, std::uint64_t seed)
{
    return dir / label / ("seed-" + std::to_string(seed) + ".jsonl");
}

inline json to_json(const GenerationRecord& r)
{
    return {{"type", "generation"}, {"gen", r.generation}, {"evals", r.evaluations}, {"hv", r.hv}, {"gd", r.gd},
            {"igd", r.igd}, {"flag", r.flag}, {"G", r.G}, {"rows", r.rows}};
}

inline GenerationRecord record_from_json(const json& j)
{
    GenerationRecord r;
    r.generation = j.at("gen").get<int>();
    r.evaluations = j.at("evals").get<std::size_t>();
    r.hv = j.at("hv").get<double>();
    r.gd = j.at("gd").get<double>();
    r.igd = j.at("igd").get<double>();
    r.flag = j.at("flag").get<bool>();
    r.G = j.at("G").get<double>();
    r.rows = j.at("rows").get<std::size_t>();
    return r;
}

inline bool trace_complete(const fs::path& path)
{
    std::ifstream in(path);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            last = line;
        }
    }
    if (last.empty()) {
        return false;
    }
    try {
        return json::parse(last).value("type", "") == "complete";
    } catch (const json::exception&) {
        return false;
    }
}

struct StoredTrace {
    std::string label;
    std::uint64_t seed = 0;
    std::size_t pop_size = 0;
    json config;
    std::vector<GenerationRecord> records;
    bool complete = false;
};

inline StoredTrace load_trace(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw aggregation_error("cannot open trace " + path.string());
    }
    StoredTrace t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                t.label = j.at("label").get<std::string>();
                t.seed = j.at("seed").get<std::uint64_t>();
                t.pop_size = j.at("pop_size").get<std::size_t>();
                t.config = j.at("config");
            } else if (type == "generation") {
                t.records.push_back(record_from_json(j));
            } else if (type == "complete") {
                t.complete = true;
            }
        } catch (const json::exception& e) {
            throw aggregation_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return t;
}

/// Runs one configuration and streams its trace to `path`, line by line.
inline RunTrace run_to_file(const RunConfig& config, const fs::path& path, std::size_t snapshot_every = 0)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write trace " + path.string());
    }
    const detail::RunSetup setup = detail::resolve(config);
    out << json{{"type", "header"}, {"label", config.label()}, {"seed", config.seed}, {"pop_size", setup.N},
                {"config", to_json(config)}}
               .dump()
        << '\n';
    out.flush();
    RunTrace trace = run(config, [&](const GenerationRecord& r, const Population& P) {
        out << to_json(r).dump() << '\n';
        if (snapshot_every > 0 && r.generation % static_cast<int>(snapshot_every) == 0) {
            json xs = json::array();
            json fs_ = json::array();
            for (const auto& ind : P) {
                xs.push_back(ind.x);
                fs_.push_back(ind.f);
            }
            out << json{{"type", "population"}, {"gen", r.generation}, {"x", xs}, {"f", fs_}}.dump() << '\n';
        }
        out.flush();
    });
    out << json{{"type", "complete"}, {"evaluations", trace.records.back().evaluations}}.dump() << '\n';
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
    return trace;
}

struct ExperimentSummary {
    std::size_t completed = 0;
    std::size_t skipped = 0;
    std::size_t evaluations = 0;
    std::vector<std::pair<std::string, std::string>> failures; // (trace, message)
};

using ProgressCallback = std::function<void(const std::string& trace, const std::string& status)>;

/// Runs every (template, seed) pair whose trace is not complete yet. Failures
/// are collected per trace; siblings keep running.
inline ExperimentSummary run_experiment(const ExperimentConfig& config, const ProgressCallback& progress = {})
{
    config.validate();
    struct Job {
        RunConfig run;
        fs::path path;
    };
    std::vector<Job> jobs;
    ExperimentSummary summary;
    for (const auto& tmpl : config.runs) {
        for (std::uint64_t seed : config.seeds) {
            RunConfig r = tmpl;
            r.seed = seed;
            fs::path p = trace_path(config.output, r.label(), seed);
            if (trace_complete(p)) {
                ++summary.skipped;
                if (progress) {
                    progress(p.string(), "skipped");
                }
                continue;
            }
            jobs.push_back({std::move(r), std::move(p)});
        }
    }
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const RunTrace t = run_to_file(jobs[i].run, jobs[i].path, config.snapshot_every);
                std::lock_guard lock(mu);
                ++summary.completed;
                summary.evaluations += t.records.back().evaluations;
                if (progress) {
                    progress(jobs[i].path.string(), "done");
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                summary.failures.emplace_back(jobs[i].path.string(), e.what());
                if (progress) {
                    progress(jobs[i].path.string(), std::string("failed: ") + e.what());
                }
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(jobs.size(), 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n; ++w) {
            pool.emplace_back(worker);
        }
    }
    return summary;
}

// ---- aggregation ----------------------------------------------------------

/// Complete traces under dir/label, keyed by seed.
inline std::map<std::uint64_t, StoredTrace> load_label(const fs::path& dir, const std::string& label)
{
    std::map<std::uint64_t, StoredTrace> out;
    const fs::path sub = dir / label;
    if (!fs::is_directory(sub)) {
        throw aggregation_error("no traces for '" + label + "' under " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sub)) {
        if (e.path().extension() == ".jsonl") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        StoredTrace t = load_trace(f);
        if (t.complete) {
            out.emplace(t.seed, std::move(t));
        }
    }
    if (out.empty()) {
        throw aggregation_error("no complete traces for '" + label + "'");
    }
    return out;
}

/// Per-generation median HV across the given traces.
inline std::vector<double> median_series(const std::map<std::uint64_t, StoredTrace>& traces)
{
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& [s, t] : traces) {
        len = std::min(len, t.records.size());
    }
    std::vector<double> out(len);
    for (std::size_t g = 0; g < len; ++g) {
        std::vector<double> v;
        for (const auto& [s, t] : traces) {
            v.push_back(t.records[g].hv);
        }
        out[g] = median(v);
    }
    return out;
}

struct ResultRow {
    std::string problem;
    std::size_t objectives = 0;
    std::string base;
    std::string ir2;
    int generation = 0;
    std::size_t seeds = 0;
    double median_base = 0.0;
    double median_ir2 = 0.0;
    double p_two_sided = 1.0;
    double p_greater = 1.0; // alternative: IR2 HV exceeds base HV
    Recovery recovery;
};

struct ReportOptions {
    std::optional<int> generation;          // fixed observation generation
    std::optional<int> after_first_nonzero; // or: offset from the first generation with non-zero base median HV
};

inline ResultRow aggregate_and_report(const fs::path& dir, const std::string& base_label, const std::string& ir2_label,
                                      const ReportOptions& options)
{
    const auto base = load_label(dir, base_label);
    const auto repaired = load_label(dir, ir2_label);
    for (const auto& [seed, t] : base) {
        if (!repaired.count(seed)) {
            throw aggregation_error("seed " + std::to_string(seed) + " present for '" + base_label + "' but missing for '"
                                    + ir2_label + "'");
        }
    }
    for (const auto& [seed, t] : repaired) {
        if (!base.count(seed)) {
            throw aggregation_error("seed " + std::to_string(seed) + " present for '" + ir2_label + "' but missing for '"
                                    + base_label + "'");
        }
    }
    const auto base_series = median_series(base);
    int t = 0;
    if (options.generation) {
        t = *options.generation;
    } else if (options.after_first_nonzero) {
        const auto it = std::find_if(base_series.begin(), base_series.end(), [](double v) { return v > 0.0; });
        if (it == base_series.end()) {
            throw aggregation_error("base median HV never becomes non-zero for '" + base_label + "'");
        }
        t = static_cast<int>(it - base_series.begin()) + *options.after_first_nonzero;
    } else {
        t = static_cast<int>(base_series.size()) - 1;
    }
    if (t < 1) {
        throw aggregation_error("observation generation must be at least 1");
    }
    std::vector<double> hb, hr;
    for (const auto& [seed, tr] : base) {
        if (static_cast<std::size_t>(t) >= tr.records.size()) {
            throw aggregation_error("trace '" + base_label + "' seed " + std::to_string(seed) + " ends before generation "
                                    + std::to_string(t));
        }
        hb.push_back(tr.records[static_cast<std::size_t>(t)].hv);
    }
    for (const auto& [seed, tr] : repaired) {
        if (static_cast<std::size_t>(t) >= tr.records.size()) {
            throw aggregation_error("trace '" + ir2_label + "' seed " + std::to_string(seed) + " ends before generation "
                                    + std::to_string(t));
        }
        hr.push_back(tr.records[static_cast<std::size_t>(t)].hv);
    }
    ResultRow row;
    const json& cfg = base.begin()->second.config;
    row.problem = cfg.value("problem", "");
    row.objectives = cfg.value("objectives", std::size_t{0});
    row.base = base_label;
    row.ir2 = ir2_label;
    row.generation = t;
    row.seeds = base.size();
    row.median_base = median(hb);
    row.median_ir2 = median(hr);
    row.p_two_sided = wilcoxon_ranksum(hr, hb, Alternative::two_sided);
    row.p_greater = wilcoxon_ranksum(hr, hb, Alternative::greater);
    row.recovery = recovery_savings(base_series, row.median_ir2, t);
    return row;
}

/// All base/IR2 label pairs found under dir (labels differing only by the "-ir2" suffix).
inline std::vector<std::pair<std::string, std::string>> discover_pairs(const fs::path& dir)
{
    std::set<std::string> labels;
    if (fs::is_directory(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_directory()) {
                labels.insert(e.path().filename().string());
            }
        }
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& l : labels) {
        if (labels.count(l + "-ir2")) {
            out.emplace_back(l, l + "-ir2");
        }
    }
    return out;
}

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace detail

inline std::string report_csv(const std::vector<ResultRow>& rows)
{
    std::ostringstream os;
    os << "problem,M,base,ir2,generation,seeds,median_hv_base,median_hv_ir2,p_two_sided,p_greater,recovery_generation,"
          "savings_percent\n";
    for (const auto& r : rows) {
        os << r.problem << ',' << r.objectives << ',' << r.base << ',' << r.ir2 << ',' << r.generation << ','
           << r.seeds << ',' << detail::fmt(r.median_base) << ',' << detail::fmt(r.median_ir2) << ','
           << detail::fmt(r.p_two_sided, "%.3e") << ',' << detail::fmt(r.p_greater, "%.3e") << ','
           << (r.recovery.recovered() ? std::to_string(*r.recovery.generation) : std::string("never")) << ','
           << r.recovery.display() << '\n';
    }
    return os.str();
}

inline json report_json(const std::vector<ResultRow>& rows)
{
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"problem", r.problem},
                       {"objectives", r.objectives},
                       {"base", r.base},
                       {"ir2", r.ir2},
                       {"generation", r.generation},
                       {"seeds", r.seeds},
                       {"median_hv_base", r.median_base},
                       {"median_hv_ir2", r.median_ir2},
                       {"p_two_sided", r.p_two_sided},
                       {"p_greater", r.p_greater},
                       {"recovery_generation", r.recovery.generation ? json(*r.recovery.generation) : json(nullptr)},
                       {"savings_percent", r.recovery.savings},
                       {"savings_is_lower_bound", !r.recovery.recovered()}});
    }
    return {{"median_rule", "lower-middle element for even seed counts"}, {"rows", arr}};
}

} // namespace ir2

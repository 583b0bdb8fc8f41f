// ir2 command-line front end: single runs, sweeps, reports and standalone indicators.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ir2/harness.hpp"

namespace {

using namespace ir2;

struct RunFlags {
    std::string problem = "ZDT1";
    std::size_t objectives = 2;
    std::string algorithm = "nsga2";
    bool ir2 = false;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> generations;
    std::optional<std::size_t> pop_size;
    std::optional<double> eta;
    std::optional<int> tpast;
    std::optional<int> tfreq;
    std::optional<double> gth;
    std::optional<double> eta_m;
    std::optional<std::size_t> jobs;
    std::vector<int> gaps;
};

void add_overrides(CLI::App* app, RunFlags& f)
{
    app->add_option("--seed", f.seed, "Random seed");
    app->add_option("--generations", f.generations, "Number of generations");
    app->add_option("--pop-size", f.pop_size, "Population size (default: reference-set size)");
    app->add_option("--eta", f.eta, "Repair enhancement factor");
    app->add_option("--tpast", f.tpast, "Archive depth in generations");
    app->add_option("--tfreq", f.tfreq, "Repair cadence in generations");
    app->add_option("--gth", f.gth, "Learning-gate threshold in percent");
    app->add_option("--eta-m", f.eta_m, "Mutation distribution index (default 1/n_var)");
    app->add_option("--jobs", f.jobs, "Threads for forest training");
}

RunConfig apply_overrides(RunConfig c, const RunFlags& f)
{
    if (f.seed) c.seed = *f.seed;
    if (f.generations) c.generations = *f.generations;
    if (f.pop_size) c.pop_size = *f.pop_size;
    if (f.eta) c.ir2_settings.eta = *f.eta;
    if (f.tpast) c.ir2_settings.t_past = *f.tpast;
    if (f.tfreq) c.ir2_settings.t_freq = *f.tfreq;
    if (f.gth) c.ir2_settings.g_th = *f.gth;
    if (f.eta_m) c.genetic.eta_m = *f.eta_m;
    if (f.jobs) c.ir2_settings.n_jobs = *f.jobs;
    return c;
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
}

std::vector<ObjectiveVector> read_front(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open front file " + path);
    }
    std::vector<ObjectiveVector> F;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream is(line);
        ObjectiveVector f;
        double v;
        while (is >> v) {
            f.push_back(v);
        }
        if (!is.eof()) {
            throw config_error(path + ": malformed line '" + line + "'");
        }
        if (f.empty()) {
            continue;
        }
        if (!F.empty() && f.size() != F.front().size()) {
            throw config_error(path + ": inconsistent number of objectives");
        }
        F.push_back(std::move(f));
    }
    return F;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IR2 innovized repair with NSGA-II, NSGA-III and MOEA/D"};
    app.require_subcommand(1);

    // run
    RunFlags rf;
    std::string run_out;
    bool run_quiet = false;
    auto* run_cmd = app.add_subcommand("run", "Single seeded run; prints one JSON line per generation");
    run_cmd->add_option("--problem", rf.problem, "Problem name (see 'problems list')");
    run_cmd->add_option("-M,--objectives", rf.objectives, "Number of objectives");
    run_cmd->add_option("--algorithm", rf.algorithm, "nsga2, nsga3 or moead")->check(CLI::IsMember({"nsga2", "nsga3", "moead"}));
    run_cmd->add_flag("--ir2", rf.ir2, "Enable the IR2 repair operator");
    run_cmd->add_option("--config", rf.config, "JSON file with run keys (flags override it)");
    run_cmd->add_option("--gaps", rf.gaps, "Das-Dennis gaps (several values: layered set)");
    run_cmd->add_option("--out", run_out, "Write the trace file here instead of stdout");
    run_cmd->add_flag("--quiet", run_quiet, "Print only the final summary");
    add_overrides(run_cmd, rf);

    // experiment
    std::string exp_config, exp_preset, exp_out;
    std::optional<std::size_t> exp_seeds, exp_workers;
    RunFlags ef;
    auto* exp_cmd = app.add_subcommand("experiment", "Multi-seed sweep with resumable trace files");
    auto* cfg_opt = exp_cmd->add_option("--config", exp_config, "Experiment JSON file");
    exp_cmd->add_option("--preset", exp_preset, "Built-in sweep: zdt, wfg-nsga3, wfg-moead, dtlz, wfg-mod")->excludes(cfg_opt);
    exp_cmd->add_option("--out", exp_out, "Output directory");
    exp_cmd->add_option("--seeds", exp_seeds, "Use seeds 1..n");
    exp_cmd->add_option("--workers", exp_workers, "Concurrent runs");
    add_overrides(exp_cmd, ef);

    // report
    std::string rep_dir, rep_base, rep_ir2, rep_csv, rep_json;
    std::optional<int> rep_gen, rep_after;
    auto* rep_cmd = app.add_subcommand("report", "Median HV, Wilcoxon p-value and savings from stored traces");
    rep_cmd->add_option("--dir", rep_dir, "Experiment output directory")->required();
    rep_cmd->add_option("--generation", rep_gen, "Observation generation (default: last)");
    rep_cmd->add_option("--after-first-nonzero", rep_after, "Observe this many generations after the base median HV first becomes non-zero");
    rep_cmd->add_option("--base", rep_base, "Base label (default: every label with an -ir2 sibling)");
    rep_cmd->add_option("--ir2", rep_ir2, "IR2 label");
    rep_cmd->add_option("--csv", rep_csv, "Write the table as CSV");
    rep_cmd->add_option("--json", rep_json, "Write the table as JSON");

    // metrics
    std::string met_kind, met_file, met_ref = "auto", met_suite, met_true;
    std::size_t met_n = 0;
    auto* met_cmd = app.add_subcommand("metrics", "Standalone indicators on a front file (one vector per line)");
    met_cmd->add_option("kind", met_kind, "hv, gd or igd")->required()->check(CLI::IsMember({"hv", "gd", "igd"}));
    met_cmd->add_option("file", met_file, "Front file")->required();
    met_cmd->add_option("--ref", met_ref, "HV reference: 'auto' or comma-separated values");
    met_cmd->add_option("--pop-size", met_n, "N for the automatic reference N/(N-1) (default: number of points)");
    met_cmd->add_option("--suite", met_suite, "zdt, dtlz or wfg (wfg divides objective i by 2i before HV)");
    met_cmd->add_option("--true-front", met_true, "Reference front file for gd/igd");

    // refpoints
    std::size_t rp_m = 3;
    std::vector<int> rp_gaps;
    std::vector<double> rp_shrink;
    bool rp_stats = false, rp_layers = false, rp_full = false;
    auto* rp_cmd = app.add_subcommand("refpoints", "Reference-point generation");
    auto* rp_gen = rp_cmd->add_subcommand("gen", "Print one point per line");
    rp_cmd->require_subcommand(1);
    rp_gen->add_option("-M,--objectives", rp_m, "Number of objectives")->required();
    rp_gen->add_option("--gaps", rp_gaps, "Gaps p (one per layer with --layers)")->required();
    rp_gen->add_flag("--layers", rp_layers, "Build a layered set from the gap list");
    rp_gen->add_option("--shrink", rp_shrink, "Layer shrink factors (default 1, 1-1/L, ...)");
    rp_gen->add_flag("--full-layers", rp_full, "Keep every lattice point of each layer, not just the simplex edges");
    rp_gen->add_flag("--stats", rp_stats, "Print count and boundary fraction instead of the points");

    // problems
    auto* pr_cmd = app.add_subcommand("problems", "Problem registry");
    pr_cmd->add_subcommand("list", "List problems with their objective counts and n_var");
    pr_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig c;
            if (!rf.config.empty()) {
                c = run_config_from_json(read_json_file(rf.config));
            }
            if (!run_cmd->get_option("--problem")->empty() || rf.config.empty()) c.problem = rf.problem;
            if (!run_cmd->get_option("--objectives")->empty() || rf.config.empty()) c.objectives = rf.objectives;
            if (!run_cmd->get_option("--algorithm")->empty() || rf.config.empty()) c.algorithm = parse_algorithm(rf.algorithm);
            if (rf.ir2) c.ir2 = true;
            if (!rf.gaps.empty()) c.gaps = rf.gaps;
            c = apply_overrides(c, rf);
            RunTrace t;
            if (!run_out.empty()) {
                t = run_to_file(c, run_out);
            } else {
                t = run(c, [&](const GenerationRecord& r, const Population&) {
                    if (!run_quiet) {
                        std::cout << to_json(r).dump() << '\n';
                    }
                });
            }
            const auto& last = t.records.back();
            std::fprintf(stderr, "%s seed %llu: generation %d, evaluations %zu, HV %.6f, IGD %.6f\n", c.label().c_str(),
                         static_cast<unsigned long long>(c.seed), last.generation, last.evaluations, last.hv, last.igd);
        } else if (exp_cmd->parsed()) {
            if (exp_config.empty() && exp_preset.empty()) {
                throw config_error("experiment: give --config or --preset");
            }
            ExperimentConfig e = exp_config.empty() ? preset(exp_preset) : load_experiment(exp_config);
            if (!exp_out.empty()) e.output = exp_out;
            if (exp_seeds) e.seeds = seed_range(1, *exp_seeds);
            if (exp_workers) e.workers = *exp_workers;
            for (auto& r : e.runs) {
                r = apply_overrides(r, ef);
            }
            e.seeds = ef.seed ? std::vector<std::uint64_t>{*ef.seed} : e.seeds;
            const auto s = run_experiment(e, [](const std::string& trace, const std::string& status) {
                std::fprintf(stderr, "%s: %s\n", trace.c_str(), status.c_str());
            });
            std::fprintf(stderr, "completed %zu, skipped %zu, failed %zu, evaluations %zu\n", s.completed, s.skipped,
                         s.failures.size(), s.evaluations);
            return s.failures.empty() ? 0 : 1;
        } else if (rep_cmd->parsed()) {
            ReportOptions opt{rep_gen, rep_after};
            std::vector<std::pair<std::string, std::string>> pairs;
            if (!rep_base.empty() || !rep_ir2.empty()) {
                pairs.emplace_back(rep_base, rep_ir2.empty() ? rep_base + "-ir2" : rep_ir2);
            } else {
                pairs = discover_pairs(rep_dir);
            }
            if (pairs.empty()) {
                throw aggregation_error("no base/IR2 label pairs under " + rep_dir);
            }
            std::vector<ResultRow> rows;
            for (const auto& [b, r] : pairs) {
                rows.push_back(aggregate_and_report(rep_dir, b, r, opt));
            }
            const std::string csv = report_csv(rows);
            std::cout << csv;
            if (!rep_csv.empty()) {
                std::ofstream(rep_csv) << csv;
            }
            if (!rep_json.empty()) {
                std::ofstream(rep_json) << report_json(rows).dump(2) << '\n';
            }
        } else if (met_cmd->parsed()) {
            const auto F = read_front(met_file);
            if (F.empty()) {
                throw config_error(met_file + ": no points");
            }
            const std::size_t M = F.front().size();
            if (met_kind == "hv") {
                ObjectiveVector ref;
                if (met_ref == "auto") {
                    ref = hv_reference(met_n != 0 ? met_n : std::max<std::size_t>(F.size(), 2), M);
                } else {
                    std::stringstream ss(met_ref);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) {
                        ref.push_back(std::stod(tok));
                    }
                    if (ref.size() != M) {
                        throw config_error("--ref has " + std::to_string(ref.size()) + " values, front has " + std::to_string(M) + " objectives");
                    }
                }
                const HvProtocol protocol{ref, met_suite == "wfg"};
                std::printf("%.10f\n", protocol(F));
            } else {
                if (met_true.empty()) {
                    throw config_error("gd/igd need --true-front");
                }
                const auto R = read_front(met_true);
                std::printf("%.10f\n", gd_igd(F, R, met_kind == "gd" ? DistanceMode::gd : DistanceMode::igd));
            }
        } else if (rp_cmd->parsed()) {
            ReferenceSet Z;
            if (rp_layers || rp_gaps.size() > 1) {
                if (rp_shrink.empty()) {
                    for (std::size_t i = 0; i < rp_gaps.size(); ++i) {
                        rp_shrink.push_back(1.0 - static_cast<double>(i) / static_cast<double>(rp_gaps.size()));
                    }
                }
                Z = layered_points(rp_m, rp_gaps, rp_shrink, rp_full ? LayerLattice::full : LayerLattice::edges);
            } else {
                Z = das_dennis(rp_m, rp_gaps.front());
            }
            if (rp_stats) {
                const double frac = boundary_fraction(Z);
                std::printf("points %zu\nboundary %zu\nboundary_fraction %.4f\n", Z.size(),
                            static_cast<std::size_t>(std::llround(frac * static_cast<double>(Z.size()))), frac);
            } else {
                for (const auto& z : Z.points) {
                    for (std::size_t k = 0; k < z.size(); ++k) {
                        std::printf(k == 0 ? "%.12g" : " %.12g", z[k]);
                    }
                    std::printf("\n");
                }
            }
        } else if (pr_cmd->parsed()) {
            for (const auto& info : problem_registry()) {
                std::string ms;
                for (std::size_t m : info.objectives) {
                    ms += (ms.empty() ? "" : ",") + std::to_string(m);
                }
                std::printf("%-10s M=%-6s n_var=%zu\n", info.name.c_str(), ms.c_str(), info.n_var);
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

// oofa: construct and evaluate exact designs for order-of-addition
// experiments under transition-effect models.
//
// Subcommands: search, eval, bench, rank, verify, moment, enumerate.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "oofa/bench.hpp"
#include "oofa/io.hpp"
#include "oofa/modelfit.hpp"
#include "oofa/oracle.hpp"
#include "oofa/version.hpp"

namespace {

using namespace oofa;

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_usage = 2;
constexpr int exit_init = 3;
constexpr int exit_infeasible = 4;
constexpr int exit_refused = 5;

struct SearchFlags {
    int m = 0;
    std::string blocks;
    int n = 0;
    std::string model = "te1";
    std::string criterion = "D";
    std::string algo = "grasp";
    std::uint64_t seed = 0;
    int sa_iters = 1000000;
    int bubble_passes = 10;
    int grasp_candidates = 250;
    int grasp_iters = 100;
    int grasp_rcl = 10;
    bool grasp_restart = false;
    bool trace = false;
    std::string out, report, config;
};

void add_tuning_flags(CLI::App* cmd, SearchFlags& f) {
    cmd->add_option("--sa-iters", f.sa_iters, "Simulated annealing iterations");
    cmd->add_option("--bubble-passes", f.bubble_passes, "Bubble sort passes over the design");
    cmd->add_option("--grasp-candidates", f.grasp_candidates, "GRASP candidate swaps per iteration");
    cmd->add_option("--grasp-iters", f.grasp_iters, "GRASP outer iterations");
    cmd->add_option("--grasp-rcl", f.grasp_rcl, "Initial restricted candidate list size");
    cmd->add_flag("--grasp-restart", f.grasp_restart, "Re-randomize the GRASP start each iteration");
    cmd->add_flag("--trace", f.trace, "Record the best-objective series in the report");
}

//! Fill flags the user did not pass from a JSON config file.
void apply_json_config(const CLI::App& cmd, SearchFlags& f) {
    if (f.config.empty()) return;
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot open config " + f.config);
    const json j = json::parse(in);
    auto take = [&](const char* flag, const char* key, auto& slot) {
        if (cmd.count(flag) == 0 && j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    take("--m", "m", f.m);
    take("--n", "n", f.n);
    take("--model", "model", f.model);
    take("--criterion", "criterion", f.criterion);
    take("--algo", "algo", f.algo);
    take("--seed", "seed", f.seed);
    take("--sa-iters", "sa_iters", f.sa_iters);
    take("--bubble-passes", "bubble_passes", f.bubble_passes);
    take("--grasp-candidates", "grasp_candidates", f.grasp_candidates);
    take("--grasp-iters", "grasp_iters", f.grasp_iters);
    take("--grasp-rcl", "grasp_rcl", f.grasp_rcl);
    take("--grasp-restart", "grasp_restart", f.grasp_restart);
    if (cmd.count("--blocks") == 0 && j.contains("blocks")) {
        const auto& b = j.at("blocks");
        f.blocks = b.is_string() ? b.get<std::string>() : b.dump();
    }
}

SearchConfig build_config(const SearchFlags& f) {
    const BlockStructure bs = parse_blocks(f.blocks, f.m);
    SearchConfig cfg(ModelSpec::make(model_kind_from_string(f.model), bs), f.n,
                     criterion_from_string(f.criterion), algorithm_from_string(f.algo), f.seed);
    cfg.sa_iters = f.sa_iters;
    cfg.bubble_max_passes = f.bubble_passes;
    cfg.grasp_candidates = f.grasp_candidates;
    cfg.grasp_iters = f.grasp_iters;
    cfg.grasp_rcl_init = f.grasp_rcl;
    cfg.grasp_restart = f.grasp_restart;
    cfg.collect_trace = f.trace;
    return cfg;
}

json config_json(const SearchConfig& cfg) {
    return json{{"m", cfg.spec.m()},
                {"blocks", blocks_to_json(cfg.spec.blocks())},
                {"block_sizes", cfg.spec.blocks().sizes()},
                {"n", cfg.n},
                {"model", to_string(cfg.spec.kind())},
                {"criterion", to_string(cfg.criterion)},
                {"algo", to_string(cfg.algorithm)},
                {"seed", cfg.seed},
                {"sa_iters", cfg.sa_iters},
                {"bubble_passes", cfg.bubble_max_passes},
                {"grasp_candidates", cfg.grasp_candidates},
                {"grasp_iters", cfg.grasp_iters},
                {"grasp_rcl", cfg.grasp_rcl_init},
                {"grasp_restart", cfg.grasp_restart}};
}

int cmd_search(const SearchFlags& f) {
    const SearchConfig cfg = build_config(f);
    const auto t0 = std::chrono::steady_clock::now();
    SearchResult res;
    try {
        res = run_search(cfg);
    } catch (const init_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_init;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!f.out.empty()) write_design_csv(f.out, res.design);
    json rep{{"version", version},
             {"config", config_json(cfg)},
             {"criterion", to_string(cfg.criterion)},
             {"value", res.criterion_value},
             {"objective", res.objective},
             {"relative_efficiency", res.relative_efficiency},
             {"reference", reference_is_closed_form(cfg.spec) ? "closed-form" : "enumerated"},
             {"evaluations", res.evaluations},
             {"wall_seconds", wall},
             {"seed", cfg.seed}};
    if (!f.out.empty()) rep["design_csv"] = f.out;
    if (f.trace) rep["trace"] = res.trace;
    if (!f.report.empty()) write_json(f.report, rep);
    std::cout << std::setprecision(10) << to_string(cfg.algorithm) << " " << to_string(cfg.criterion)
              << "-criterion: value " << res.criterion_value << ", relative efficiency "
              << res.relative_efficiency << ", objective " << res.objective << ", evaluations "
              << res.evaluations << " (" << std::setprecision(3) << wall << " s)\n";
    return exit_ok;
}

int cmd_eval(int m, const std::string& blocks, const std::string& model, const std::string& criterion,
             const std::string& design_path, const std::string& report_path) {
    const BlockStructure bs = parse_blocks(blocks, m);
    const ModelSpec spec = ModelSpec::make(model_kind_from_string(model), bs);
    const Criterion crit = criterion_from_string(criterion);
    const std::vector<Permutation> design = read_design_csv(design_path, m);
    for (std::size_t r = 0; r < design.size(); ++r)
        if (!is_feasible(design[r], bs)) {
            std::cerr << "error: design row " << (r + 1) << " violates the block constraints\n";
            return exit_infeasible;
        }
    const MomentMatrix Mf = full_moment(spec);
    const MomentMatrix M = moment_of_design(design, spec);
    const double value = (crit == Criterion::D) ? d_criterion(M) : i_criterion(M, Mf);
    const double rel = relative_efficiency(M, Mf, crit);
    json rep{{"version", version},
             {"criterion", to_string(crit)},
             {"value", value},
             {"objective", objective(M, crit, &Mf)},
             {"relative_efficiency", rel},
             {"reference", reference_is_closed_form(spec) ? "closed-form" : "enumerated"},
             {"n", design.size()}};
    if (!report_path.empty()) write_json(report_path, rep);
    std::cout << std::setprecision(17) << to_string(crit) << "-criterion value " << value
              << "\nrelative efficiency " << rel << "\n";
    return exit_ok;
}

int cmd_bench(int table, const std::string& rows_filter, int replicates, std::uint64_t seed, int threads,
              const std::string& out) {
    std::vector<BenchScenario> scenarios;
    if (table == 0) {
        for (int t : {2, 3, 4, 5}) {
            auto s = table_scenarios(t);
            scenarios.insert(scenarios.end(), s.begin(), s.end());
        }
    } else {
        scenarios = table_scenarios(table);
    }
    if (!rows_filter.empty()) {
        std::stringstream ss(rows_filter);
        std::string cond;
        while (std::getline(ss, cond, ',')) {
            const auto eq = cond.find('=');
            if (eq == std::string::npos) throw invalid_input("bad --rows condition '" + cond + "'");
            const std::string key = cond.substr(0, eq), val = cond.substr(eq + 1);
            std::erase_if(scenarios, [&](const BenchScenario& s) {
                if (key == "m") return std::to_string(s.m) != val;
                if (key == "n") return std::to_string(s.n) != val;
                if (key == "algo") return to_string(s.algo) != val;
                if (key == "blocks") return s.blocks_label() != val;
                if (key == "c") return std::to_string(s.block_sizes.size()) != val;
                throw invalid_input("unknown --rows key '" + key + "'");
            });
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot open " + out + " for writing");
        os = &file;
    }
    *os << "table,m,blocks,n,algo,criterion,median,paper_value,replicates\n";
    for (const BenchScenario& sc : scenarios) {
        const BenchRow row = run_scenario(sc, replicates, seed, threads);
        *os << sc.table << "," << sc.m << "," << sc.blocks_label() << "," << sc.n << "," << to_string(sc.algo)
            << "," << to_string(sc.criterion) << "," << std::setprecision(6) << row.median << ","
            << sc.paper_value << "," << row.replicates << "\n";
        os->flush();
    }
    return exit_ok;
}

int cmd_rank(int m, const std::string& blocks, const std::string& data, std::uint64_t synthetic_seed,
             double noise, int n, const std::string& algo, const std::string& criterion,
             const std::string& models_csv, int repeats, std::uint64_t seed, const std::string& out,
             const std::string& coef_prefix) {
    const BlockStructure bs = parse_blocks(blocks, m);
    CostInstance truth = data.empty()
                             ? CostInstance::synthetic_sop(m, bs, synthetic_seed, noise)
                             : CostInstance::from_table(bs, read_cost_csv(data, m));
    if (!data.empty()) {
        // the table must cover every feasible order
        for (const Permutation& a : enumerate_feasible(bs)) {
            try {
                truth.cost(a);
            } catch (const invalid_input&) {
                std::cerr << "error: cost table is missing feasible runs\n";
                return exit_infeasible;
            }
        }
    }

    std::vector<ModelKind> models;
    std::stringstream ss(models_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) models.push_back(model_kind_from_string(tok));
    if (models.empty()) throw invalid_input("--models must name at least one model");

    // Per repeat: search a design under the TE1 model, look up its
    // responses, fit each model, rank its predicted-optimal order.
    std::vector<std::vector<double>> ranks(models.size());
    for (int rep = 0; rep < repeats; ++rep) {
        SearchConfig cfg(ModelSpec::make(ModelKind::TE1, bs), n, criterion_from_string(criterion),
                         algorithm_from_string(algo), seed + static_cast<std::uint64_t>(rep));
        const SearchResult res = run_search(cfg);
        std::vector<double> y;
        y.reserve(res.design.size());
        for (const Permutation& a : res.design) y.push_back(truth.cost(a));
        for (std::size_t k = 0; k < models.size(); ++k) {
            const ModelSpec spec = ModelSpec::make(models[k], bs);
            const FittedModel fm = fit(res.design, y, spec);
            ranks[k].push_back(rank_orders(fm, bs, truth));
            if (rep == 0 && !coef_prefix.empty()) {
                std::ofstream cf(coef_prefix + to_string(models[k]) + ".csv");
                cf << "label,estimate\n" << std::setprecision(17);
                for (int c = 0; c < spec.column_count(); ++c)
                    cf << spec.columns()[c].str() << "," << fm.coefficients[c] << "\n";
            }
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        os = &file;
    }
    *os << "model,average_rank,repeats\n";
    for (std::size_t k = 0; k < models.size(); ++k) {
        double mean = 0.0;
        for (double r : ranks[k]) mean += r;
        mean /= static_cast<double>(ranks[k].size());
        *os << to_string(models[k]) << "," << std::setprecision(6) << mean << "," << repeats << "\n";
    }
    return exit_ok;
}

int cmd_verify(int max_m, int trials, std::uint64_t seed) {
    std::vector<OracleReport> reports = verify_closed_forms(max_m);
    Rng rng(seed);
    reports.push_back(
        check_full_design_optimality(ModelSpec::make(ModelKind::TE1, BlockStructure::single(4)), trials, rng));
    reports.push_back(
        check_full_design_optimality(ModelSpec::make(ModelKind::TE2, BlockStructure::single(5)), trials, rng));
    reports.push_back(
        check_relabeling_invariance(ModelSpec::make(ModelKind::TE1, BlockStructure::single(4)), trials / 2, rng));
    reports.push_back(
        check_relabeling_invariance(ModelSpec::make(ModelKind::TE2, BlockStructure::single(5)), trials / 2, rng));

    bool all_pass = true;
    std::cout << std::left << std::setw(42) << "scenario" << std::setw(14) << "max_dev"
              << "result\n";
    for (const OracleReport& r : reports) {
        std::cout << std::left << std::setw(42) << r.scenario << std::setw(14) << std::setprecision(3)
                  << r.max_deviation << (r.pass ? "pass" : "FAIL") << "\n";
        if (!r.pass) {
            all_pass = false;
            std::cout << "    counterexample: " << r.counterexample << "\n";
        }
    }
    return all_pass ? exit_ok : exit_error;
}

int cmd_moment(int m, const std::string& blocks, const std::string& model, const std::string& out) {
    const BlockStructure bs = parse_blocks(blocks, m);
    const MomentMatrix M = full_moment(ModelSpec::make(model_kind_from_string(model), bs));
    if (out.empty())
        write_moment_csv(std::cout, M);
    else
        write_moment_csv(out, M);
    return exit_ok;
}

int cmd_enumerate(int m, const std::string& blocks, std::uint64_t cap, const std::string& out) {
    const BlockStructure bs = parse_blocks(blocks, m);
    const std::vector<Permutation> all = enumerate_feasible(bs, cap);
    if (out.empty())
        write_design_csv(std::cout, all);
    else
        write_design_csv(out, all);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact designs for order-of-addition experiments under transition-effect models"};
    app.set_version_flag("--version", oofa::version);
    app.require_subcommand(1);

    SearchFlags sf;
    auto* search = app.add_subcommand("search", "Search for an efficient design");
    search->add_option("--m", sf.m, "Number of components (required unless given via --config)");
    search->add_option("--blocks", sf.blocks, "Block sizes 's1,s2,...' or JSON label sets");
    search->add_option("--n", sf.n, "Run size");
    search->add_option("--model", sf.model, "Model: pwo|te1|te2 (default te1)");
    search->add_option("--criterion", sf.criterion, "Criterion: D|I (default D)");
    search->add_option("--algo", sf.algo, "Algorithm: sa|bubble|grasp (default grasp)");
    search->add_option("--seed", sf.seed, "Random seed");
    search->add_option("--out", sf.out, "Design CSV output path");
    search->add_option("--report", sf.report, "Report JSON output path");
    search->add_option("--config", sf.config, "JSON config file (flags override)");
    add_tuning_flags(search, sf);

    int em = 0;
    std::string eblocks, emodel = "te1", ecrit = "D", edesign, ereport;
    auto* eval = app.add_subcommand("eval", "Evaluate a design CSV against the full-design reference");
    eval->add_option("--m", em, "Number of components")->required();
    eval->add_option("--blocks", eblocks, "Block sizes or JSON label sets");
    eval->add_option("--model", emodel, "Model: pwo|te1|te2");
    eval->add_option("--criterion", ecrit, "Criterion: D|I");
    eval->add_option("--design", edesign, "Design CSV to evaluate")->required();
    eval->add_option("--report", ereport, "Report JSON output path");

    int btable = 0, breps = 20, bthreads = static_cast<int>(std::thread::hardware_concurrency());
    std::uint64_t bseed = 1;
    std::string brows, bout;
    auto* bench = app.add_subcommand("bench", "Reproduce the published benchmark tables");
    bench->add_option("--table", btable, "Table 2|3|4|5 (default: all)");
    bench->add_option("--rows", brows, "Row filter, e.g. 'm=9,n=600,algo=grasp'");
    bench->add_option("--replicates", breps, "Replicates per scenario (default 20)");
    bench->add_option("--seed", bseed, "Base seed (replicate i uses seed+i)");
    bench->add_option("--threads", bthreads, "Worker threads");
    bench->add_option("--out", bout, "Output CSV path (default stdout)");

    int rm = 0, rn = 0, rrepeats = 100;
    std::uint64_t rsynth = 1, rseed = 1;
    double rnoise = 1.0;
    std::string rblocks, rdata, ralgo = "grasp", rcrit = "I", rmodels = "pwo,te1,te2", rout;
    auto* rank = app.add_subcommand("rank", "Rank predicted-optimal orders against a cost oracle");
    rank->add_option("--m", rm, "Number of components")->required();
    rank->add_option("--blocks", rblocks, "Block sizes or JSON label sets");
    rank->add_option("--data", rdata, "Cost CSV covering every feasible order");
    rank->add_option("--synthetic-seed", rsynth, "Synthetic cost instance seed");
    rank->add_option("--noise", rnoise, "Synthetic noise scale (default 1.0)");
    rank->add_option("--n", rn, "Design size per repeat")->required();
    rank->add_option("--algo", ralgo, "Search algorithm (default grasp)");
    rank->add_option("--criterion", rcrit, "Search criterion (default I)");
    rank->add_option("--models", rmodels, "Models to fit, comma separated (default pwo,te1,te2)");
    rank->add_option("--repeats", rrepeats, "Repeats (default 100)");
    rank->add_option("--seed", rseed, "Base search seed");
    rank->add_option("--out", rout, "Output CSV path (default stdout)");
    std::string rcoef;
    rank->add_option("--coef-prefix", rcoef, "Write first-repeat fitted coefficients to <prefix><model>.csv");

    int vmax = 6, vtrials = 200;
    std::uint64_t vseed = 1;
    auto* verify = app.add_subcommand("verify", "Brute-force verification of the closed forms");
    verify->add_option("--max-m", vmax, "Verify closed forms up to this m (default 6)");
    verify->add_option("--trials", vtrials, "Random trials for optimality/invariance checks");
    verify->add_option("--seed", vseed, "Seed for the random checks");

    int mm = 0;
    std::string mblocks, mmodel = "te1", mout;
    auto* moment = app.add_subcommand("moment", "Write the closed-form full-design moment matrix");
    moment->add_option("--m", mm, "Number of components")->required();
    moment->add_option("--blocks", mblocks, "Block sizes or JSON label sets");
    moment->add_option("--model", mmodel, "Model: pwo|te1|te2");
    moment->add_option("--out", mout, "Output CSV path (default stdout)");

    int nm = 0;
    std::uint64_t ncap = 500000;
    std::string nblocks, nout;
    auto* enumerate = app.add_subcommand("enumerate", "Write every feasible order");
    enumerate->add_option("--m", nm, "Number of components")->required();
    enumerate->add_option("--blocks", nblocks, "Block sizes or JSON label sets");
    enumerate->add_option("--cap", ncap, "Enumeration cap (default 500000)");
    enumerate->add_option("--out", nout, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return exit_usage;
    }

    try {
        if (search->parsed()) {
            apply_json_config(*search, sf);
            if (sf.m <= 0) throw oofa::invalid_input("--m is required and must be positive");
            if (sf.n <= 0) throw oofa::invalid_input("--n is required and must be positive");
            return cmd_search(sf);
        }
        if (eval->parsed()) return cmd_eval(em, eblocks, emodel, ecrit, edesign, ereport);
        if (bench->parsed()) return cmd_bench(btable, brows, breps, bseed, std::max(1, bthreads), bout);
        if (rank->parsed())
            return cmd_rank(rm, rblocks, rdata, rsynth, rnoise, rn, ralgo, rcrit, rmodels, rrepeats, rseed, rout,
                            rcoef);
        if (verify->parsed()) return cmd_verify(vmax, vtrials, vseed);
        if (moment->parsed()) return cmd_moment(mm, mblocks, mmodel, mout);
        if (enumerate->parsed()) return cmd_enumerate(nm, nblocks, ncap, nout);
    } catch (const oofa::enumeration_refused& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_refused;
    } catch (const oofa::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_refused;
    } catch (const oofa::init_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_init;
    } catch (const oofa::rank_deficient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const oofa::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_usage;
}

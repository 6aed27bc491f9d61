#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "csphard/format.hpp"
#include "csphard/pipeline.hpp"

using namespace csphard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

PipelineConfig load_config(const std::string& path) {
    return config_from_json_text(read_file(path));
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open for writing: " + path);
    return file;
}

struct ConfigOverrides {
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<int> bins;
    std::optional<double> min_support, min_confidence, min_lift;
    std::optional<std::string> focal;
    std::optional<double> time_budget;
    std::optional<std::int64_t> backtrack_budget;
    std::optional<std::string> mode;
    std::optional<double> easy_below, hard_above;
    std::optional<std::int64_t> bt_easy_below, bt_hard_above;
    std::optional<int> checkpoint_interval;
    bool no_mac = false;
    bool two_phase = false;
    // phase-1 grid overrides
    std::optional<int> n, d, instances_per_point;
    std::optional<double> bif_share;
    std::optional<std::int64_t> e_start, e_end, e_step, nf_start, nf_end, nf_step;
    std::optional<double> t_start, t_end, t_step;
    std::optional<std::uint64_t> seed_start, seed_end, seed_step;
};

void add_override_flags(CLI::App* cmd, ConfigOverrides& ov) {
    cmd->add_option("--out-dir", ov.out_dir, "Artifact directory");
    cmd->add_option("--workers", ov.workers, "Worker threads (0 = all cores)");
    cmd->add_option("--n", ov.n, "Variable count");
    cmd->add_option("--d", ov.d, "Domain size");
    cmd->add_option("--e-start", ov.e_start, "Constraint-count axis start");
    cmd->add_option("--e-end", ov.e_end, "Constraint-count axis end");
    cmd->add_option("--e-step", ov.e_step, "Constraint-count axis step");
    cmd->add_option("--nf-start", ov.nf_start, "Functional-count axis start");
    cmd->add_option("--nf-end", ov.nf_end, "Functional-count axis end");
    cmd->add_option("--nf-step", ov.nf_step, "Functional-count axis step");
    cmd->add_option("--t-start", ov.t_start, "Tightness axis start");
    cmd->add_option("--t-end", ov.t_end, "Tightness axis end");
    cmd->add_option("--t-step", ov.t_step, "Tightness axis step");
    cmd->add_option("--seed-start", ov.seed_start, "Seed axis start");
    cmd->add_option("--seed-end", ov.seed_end, "Seed axis end");
    cmd->add_option("--seed-step", ov.seed_step, "Seed step between instances");
    cmd->add_option("--instances-per-point", ov.instances_per_point, "Instances per grid point");
    cmd->add_option("--bif-share", ov.bif_share, "Bi-functional share of functional constraints");
    cmd->add_option("--bins", ov.bins, "Discretization bin count");
    cmd->add_option("--min-support", ov.min_support, "Minimum rule support");
    cmd->add_option("--min-confidence", ov.min_confidence, "Minimum rule confidence");
    cmd->add_option("--min-lift", ov.min_lift, "Minimum rule lift");
    cmd->add_option("--focal", ov.focal, "Focal item for the pattern report");
    cmd->add_option("--time-budget", ov.time_budget, "Per-instance time budget (s)");
    cmd->add_option("--backtrack-budget", ov.backtrack_budget, "Per-instance backtrack budget");
    cmd->add_option("--mode", ov.mode, "Classification mode: wallclock|backtracks");
    cmd->add_option("--easy-below", ov.easy_below, "Easy/Medium wall-clock boundary (s)");
    cmd->add_option("--hard-above", ov.hard_above, "Medium/Hard wall-clock boundary (s)");
    cmd->add_option("--bt-easy-below", ov.bt_easy_below, "Easy/Medium backtrack boundary");
    cmd->add_option("--bt-hard-above", ov.bt_hard_above, "Medium/Hard backtrack boundary");
    cmd->add_option("--checkpoint-interval", ov.checkpoint_interval,
                    "Points between checkpoint rewrites");
    cmd->add_flag("--no-mac", ov.no_mac, "Plain backtracking with root arc consistency only");
    cmd->add_flag("--two-phase", ov.two_phase, "Derive a refined second sweep from phase 1");
}

void apply(const ConfigOverrides& ov, PipelineConfig& cfg) {
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.bins) cfg.bins = *ov.bins;
    if (ov.min_support) cfg.mining.min_support = *ov.min_support;
    if (ov.min_confidence) cfg.mining.min_confidence = *ov.min_confidence;
    if (ov.min_lift) cfg.mining.min_lift = *ov.min_lift;
    if (ov.focal) cfg.focal = *ov.focal;
    if (ov.time_budget) cfg.limits.time_budget_s = *ov.time_budget;
    if (ov.backtrack_budget) cfg.limits.backtrack_budget = *ov.backtrack_budget;
    if (ov.mode) {
        if (*ov.mode == "wallclock")
            cfg.thresholds.mode = ThresholdMode::WallClock;
        else if (*ov.mode == "backtracks")
            cfg.thresholds.mode = ThresholdMode::Backtracks;
        else
            throw std::invalid_argument("--mode must be wallclock or backtracks");
    }
    if (ov.easy_below) cfg.thresholds.easy_below = *ov.easy_below;
    if (ov.hard_above) cfg.thresholds.hard_above = *ov.hard_above;
    if (ov.bt_easy_below) cfg.thresholds.bt_easy_below = *ov.bt_easy_below;
    if (ov.bt_hard_above) cfg.thresholds.bt_hard_above = *ov.bt_hard_above;
    if (ov.checkpoint_interval) cfg.checkpoint_interval = *ov.checkpoint_interval;
    if (ov.no_mac) cfg.use_mac = false;
    if (ov.two_phase) cfg.two_phase = true;
    if (ov.n) cfg.phase1.n = *ov.n;
    if (ov.d) cfg.phase1.d = *ov.d;
    if (ov.e_start) cfg.phase1.e_axis.start = *ov.e_start;
    if (ov.e_end) cfg.phase1.e_axis.end = *ov.e_end;
    if (ov.e_step) cfg.phase1.e_axis.step = *ov.e_step;
    if (ov.nf_start) cfg.phase1.nf_axis.start = *ov.nf_start;
    if (ov.nf_end) cfg.phase1.nf_axis.end = *ov.nf_end;
    if (ov.nf_step) cfg.phase1.nf_axis.step = *ov.nf_step;
    if (ov.t_start) cfg.phase1.t_axis.start = *ov.t_start;
    if (ov.t_end) cfg.phase1.t_axis.end = *ov.t_end;
    if (ov.t_step) cfg.phase1.t_axis.step = *ov.t_step;
    if (ov.seed_start) cfg.phase1.seed_axis.start = *ov.seed_start;
    if (ov.seed_end) cfg.phase1.seed_axis.end = *ov.seed_end;
    if (ov.seed_step) cfg.phase1.seed_axis.step = *ov.seed_step;
    if (ov.instances_per_point) cfg.phase1.instances_per_point = *ov.instances_per_point;
    if (ov.bif_share) cfg.phase1.bif_share = *ov.bif_share;
}

void print_pipeline_outcome(const PipelineOutcome& out) {
    if (!out.complete) {
        std::cout << "sweep checkpointed; rerun `resume` to continue\n";
        return;
    }
    if (out.stopped_all_easy) {
        std::cout << "phase 1 produced only Easy instances; nothing to mine (see manifest.json)\n";
        return;
    }
    std::cout << "instances: " << out.total_records << "\n"
              << "selected for mining: " << out.selected << "\n"
              << "mined rules: " << out.mined_rules << "\n"
              << "rules after closure: " << out.closed_rules << "\n"
              << "artifacts: " << out.dir << "\n";
}

DeductionCaps parse_caps(const std::string& text, bool decomposition) {
    DeductionCaps caps;
    caps.decomposition = decomposition;
    if (text.empty()) return caps;
    auto parts = split(text, ',');
    if (parts.size() != 2) throw std::invalid_argument("--caps expects <side-items>,<generations>");
    caps.max_side_items = std::stoi(parts[0]);
    caps.max_generations = std::stoi(parts[1]);
    return caps;
}

// `mine` accepts either a transactions file or an instances CSV; the CSV
// path runs select/drop/discretize first.
TransactionDb load_mining_input(const std::string& path, int bins) {
    std::ifstream probe(path);
    if (!probe) throw std::invalid_argument("cannot open: " + path);
    std::string first;
    std::getline(probe, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    probe.close();

    if (first == kInstanceCsvHeader) {
        auto records = select_for_mining(read_csv_file(path));
        if (records.empty())
            throw std::invalid_argument("no Medium/Hard instances in " + path);
        return discretize(drop_redundant(records), bins).first;
    }
    std::ifstream is(path);
    return read_transactions(is);
}

int run(int argc, char** argv) {
    CLI::App app{"random binary CSP hardness pattern miner"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate one random instance");
    GenParams gp{.n = 10, .d = 5, .e = 12, .nf = 0, .t = 0.5, .bif_share = 0.0, .seed = 1};
    std::string gen_out;
    bool forbidden = false;
    gen->add_option("--n", gp.n, "Variable count")->required();
    gen->add_option("--d", gp.d, "Domain size")->required();
    gen->add_option("--e", gp.e, "Constraint count")->required();
    gen->add_option("--nf", gp.nf, "Functional constraint count");
    gen->add_option("--t", gp.t, "Tightness (allowed fraction)")->required();
    gen->add_option("--bif-share", gp.bif_share, "Bi-functional share of functional constraints");
    gen->add_option("--seed", gp.seed, "Seed");
    gen->add_option("--out", gen_out, "Output file (default stdout)");
    gen->add_flag("--tightness-means-forbidden", forbidden,
                  "Interpret --t as the forbidden fraction instead");
    gen->callback([&] {
        if (forbidden) gp.t = 1.0 - gp.t;
        std::ofstream file;
        write_instance(open_out(file, gen_out), generate(gp));
    });

    // solve
    auto* sol = app.add_subcommand("solve", "Solve one instance file");
    std::string sol_path;
    double sol_time = 0.0;
    std::int64_t sol_bt = 0;
    bool sol_no_mac = false;
    sol->add_option("instance", sol_path, "Instance file")->required();
    sol->add_option("--time-budget", sol_time, "Time budget in seconds (0 = none)");
    sol->add_option("--backtrack-budget", sol_bt, "Backtrack budget (0 = none)");
    sol->add_flag("--no-mac", sol_no_mac, "Plain backtracking with root arc consistency only");
    sol->callback([&] {
        SolveLimits limits;
        if (sol_time > 0) limits.time_budget_s = sol_time;
        if (sol_bt > 0) limits.backtrack_budget = sol_bt;
        auto res = solve(read_instance_file(sol_path), limits, SolveOptions{!sol_no_mac});
        std::cout << to_string(res.status) << ',' << res.backtracks << ',' << res.nodes << ','
                  << format_number(res.elapsed_s) << '\n';
    });

    // sweep-plan
    auto* plan = app.add_subcommand("sweep-plan", "Print the sweep grid as CSV");
    std::string plan_config;
    std::string plan_out;
    bool plan_phase2 = false;
    plan->add_option("--config", plan_config, "Pipeline config JSON")->required();
    plan->add_option("--out", plan_out, "Output file (default stdout)");
    plan->add_flag("--phase2", plan_phase2, "Use the explicit phase-2 grid");
    plan->callback([&] {
        auto cfg = load_config(plan_config);
        const SweepConfig& sweep =
            plan_phase2 ? (cfg.phase2 ? *cfg.phase2
                                      : throw std::invalid_argument("config has no phase2"))
                        : cfg.phase1;
        std::ofstream file;
        auto& os = open_out(file, plan_out);
        os << "n,d,e,nf,t,bif_share,seed\n";
        for (const auto& p : sweep_grid(sweep))
            os << p.n << ',' << p.d << ',' << p.e << ',' << p.nf << ',' << format_number(p.t)
               << ',' << format_number(p.bif_share) << ',' << p.seed << '\n';
    });

    // phase1
    auto* ph1 = app.add_subcommand("phase1", "Run the coarse sweep and derive refined ranges");
    std::string ph1_config;
    ConfigOverrides ph1_ov;
    std::int64_t ph1_stop_after = 0;
    bool ph1_resume = false;
    ph1->add_option("--config", ph1_config, "Pipeline config JSON")->required();
    add_override_flags(ph1, ph1_ov);
    ph1->add_option("--stop-after", ph1_stop_after,
                    "Checkpoint and exit after solving this many new points");
    ph1->add_flag("--resume", ph1_resume, "Continue from an existing phase-1 checkpoint");
    ph1->callback([&] {
        auto cfg = load_config(ph1_config);
        apply(ph1_ov, cfg);
        std::optional<std::size_t> stop;
        if (ph1_stop_after > 0) stop = static_cast<std::size_t>(ph1_stop_after);
        auto res = run_phase1(cfg, ph1_resume, stop);
        if (!res.complete) {
            std::cout << "phase 1 checkpointed; rerun with --resume to continue\n";
            return;
        }
        std::cout << "phase 1 instances: " << res.records.size() << "\n";
        if (res.plan.any_non_easy) {
            const auto& r = res.plan.refined;
            std::cout << "refined e: [" << r.e_axis.start << ", " << r.e_axis.end << "]\n"
                      << "refined nf: [" << r.nf_axis.start << ", " << r.nf_axis.end << "]\n"
                      << "refined t: [" << format_number(r.t_axis.start) << ", "
                      << format_number(r.t_axis.end) << "]\n";
        } else {
            std::cout << "all instances Easy; nothing to refine\n";
        }
    });

    // pipeline / resume
    std::string pipe_config;
    ConfigOverrides pipe_ov;
    std::int64_t pipe_stop_after = 0;
    auto* pipe = app.add_subcommand("pipeline", "Run the full cascade");
    pipe->add_option("--config", pipe_config, "Pipeline config JSON")->required();
    add_override_flags(pipe, pipe_ov);
    pipe->add_option("--stop-after", pipe_stop_after,
                     "Checkpoint and exit after solving this many new points");
    pipe->callback([&] {
        auto cfg = load_config(pipe_config);
        apply(pipe_ov, cfg);
        std::optional<std::size_t> stop;
        if (pipe_stop_after > 0) stop = static_cast<std::size_t>(pipe_stop_after);
        print_pipeline_outcome(run_pipeline(cfg, false, stop));
    });

    std::string res_config;
    ConfigOverrides res_ov;
    std::int64_t res_stop_after = 0;
    auto* resume_cmd = app.add_subcommand("resume", "Continue a checkpointed pipeline run");
    resume_cmd->add_option("--config", res_config, "Pipeline config JSON")->required();
    add_override_flags(resume_cmd, res_ov);
    resume_cmd->add_option("--stop-after", res_stop_after,
                           "Checkpoint and exit after solving this many new points");
    resume_cmd->callback([&] {
        auto cfg = load_config(res_config);
        apply(res_ov, cfg);
        std::optional<std::size_t> stop;
        if (res_stop_after > 0) stop = static_cast<std::size_t>(res_stop_after);
        print_pipeline_outcome(run_pipeline(cfg, true, stop));
    });

    // mine
    auto* mine = app.add_subcommand("mine", "Mine association rules from transactions");
    std::string mine_in, mine_out;
    MiningThresholds mine_th;
    std::int64_t mine_max_rules = 0;
    int mine_bins = 20;
    int mine_workers = 1;
    mine->add_option("--input", mine_in, "Transactions file or instances CSV")->required();
    mine->add_option("--out", mine_out, "Rules CSV output (default stdout)");
    mine->add_option("--min-support", mine_th.min_support, "Minimum support");
    mine->add_option("--min-confidence", mine_th.min_confidence, "Minimum confidence");
    mine->add_option("--min-lift", mine_th.min_lift, "Minimum lift");
    mine->add_option("--max-rules", mine_max_rules, "Keep at most this many rules (0 = all)");
    mine->add_option("--bins", mine_bins, "Bin count used when the input is an instances CSV");
    mine->add_option("--workers", mine_workers, "Worker threads for support counting");
    mine->callback([&] {
        if (mine_max_rules > 0) mine_th.max_rules = static_cast<std::size_t>(mine_max_rules);
        auto db = load_mining_input(mine_in, mine_bins);
        auto rules = mine_rules(db, mine_th, mine_workers);
        std::ofstream file;
        write_rules_csv(rules, open_out(file, mine_out), false);
    });

    // deduce
    auto* ded = app.add_subcommand("deduce", "Close a rule set under deduction");
    std::string ded_rules, ded_tx, ded_caps, ded_out, ded_report, ded_minimal, ded_focal;
    bool ded_no_decomp = false;
    ded->add_option("--rules", ded_rules, "Mined rules CSV")->required();
    ded->add_option("--transactions", ded_tx, "Transactions file (measures of deduced rules)")
        ->required();
    ded->add_option("--caps", ded_caps, "Closure caps as <side-items>,<generations>");
    ded->add_option("--focal", ded_focal, "Focal item for the pattern report");
    ded->add_option("--out", ded_out, "Deduced rules CSV (default rules_deduced.csv)");
    ded->add_option("--report-out", ded_report, "Pattern report JSON (default pattern_report.json)");
    ded->add_option("--minimal-out", ded_minimal, "Also write the minimized rule set here");
    ded->add_flag("--no-decomposition", ded_no_decomp, "Skip the decomposition step");
    ded->callback([&] {
        auto caps = parse_caps(ded_caps, !ded_no_decomp);
        auto rules = read_rules_csv_file(ded_rules);
        std::ifstream txs(ded_tx);
        if (!txs) throw std::invalid_argument("cannot open: " + ded_tx);
        auto db = read_transactions(txs);
        auto closed = closure(rules, db, caps);
        write_rules_csv_file(ded_out.empty() ? "rules_deduced.csv" : ded_out, closed, true);
        if (!ded_minimal.empty())
            write_rules_csv_file(ded_minimal, minimize(closed, db, caps), true);
        if (!ded_focal.empty()) {
            std::ofstream file;
            open_out(file, ded_report.empty() ? "pattern_report.json" : ded_report)
                << pattern_report_json(pattern_report(closed, ded_focal));
        }
    });

    // report
    auto* rep = app.add_subcommand("report", "Pattern report from a rules CSV");
    std::string rep_rules, rep_focal = "class=Hard", rep_out;
    rep->add_option("--rules", rep_rules, "Rules CSV")->required();
    rep->add_option("--focal", rep_focal, "Focal item");
    rep->add_option("--out", rep_out, "Report JSON output (default stdout)");
    rep->callback([&] {
        auto rules = read_rules_csv_file(rep_rules);
        std::ofstream file;
        open_out(file, rep_out) << pattern_report_json(pattern_report(rules, rep_focal));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    }
}

#include "csphard/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "csphard/format.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace csphard {

namespace {

json axis_to_json(const IntAxis& a) {
    return {{"start", a.start}, {"end", a.end}, {"step", a.step}};
}
json axis_to_json(const FloatAxis& a) {
    return {{"start", a.start}, {"end", a.end}, {"step", a.step}};
}
json axis_to_json(const SeedAxis& a) {
    return {{"start", a.start}, {"end", a.end}, {"step", a.step}};
}

IntAxis int_axis_from_json(const json& j) {
    return {j.at("start").get<std::int64_t>(), j.at("end").get<std::int64_t>(),
            j.value("step", std::int64_t{1})};
}
FloatAxis float_axis_from_json(const json& j) {
    return {j.at("start").get<double>(), j.at("end").get<double>(), j.value("step", 1.0)};
}
SeedAxis seed_axis_from_json(const json& j) {
    return {j.at("start").get<std::uint64_t>(), j.at("end").get<std::uint64_t>(),
            j.value("step", std::uint64_t{1})};
}

json sweep_to_json(const SweepConfig& s) {
    return {{"n", s.n},
            {"d", s.d},
            {"e", axis_to_json(s.e_axis)},
            {"nf", axis_to_json(s.nf_axis)},
            {"t", axis_to_json(s.t_axis)},
            {"seed", axis_to_json(s.seed_axis)},
            {"instances_per_point", s.instances_per_point},
            {"bif_share", s.bif_share}};
}

SweepConfig sweep_from_json(const json& j) {
    SweepConfig s;
    s.n = j.at("n").get<int>();
    s.d = j.at("d").get<int>();
    s.e_axis = int_axis_from_json(j.at("e"));
    s.nf_axis = int_axis_from_json(j.at("nf"));
    s.t_axis = float_axis_from_json(j.at("t"));
    if (j.contains("seed")) s.seed_axis = seed_axis_from_json(j.at("seed"));
    s.instances_per_point = j.value("instances_per_point", 1);
    s.bif_share = j.value("bif_share", 0.0);
    return s;
}

json config_to_json(const PipelineConfig& c) {
    json j;
    j["phase1"] = sweep_to_json(c.phase1);
    j["phase2"] = c.phase2 ? sweep_to_json(*c.phase2) : json(nullptr);
    j["two_phase"] = c.two_phase;
    j["phase2_instances_per_point"] = c.phase2_instances_per_point;
    j["limits"] = {{"time_budget_s", c.limits.time_budget_s ? json(*c.limits.time_budget_s)
                                                            : json(nullptr)},
                   {"backtrack_budget", c.limits.backtrack_budget
                                            ? json(*c.limits.backtrack_budget)
                                            : json(nullptr)}};
    j["use_mac"] = c.use_mac;
    j["thresholds"] = {
        {"mode", c.thresholds.mode == ThresholdMode::WallClock ? "wallclock" : "backtracks"},
        {"easy_below", c.thresholds.easy_below},
        {"hard_above", c.thresholds.hard_above},
        {"bt_easy_below", c.thresholds.bt_easy_below},
        {"bt_hard_above", c.thresholds.bt_hard_above}};
    j["bins"] = c.bins;
    j["mining"] = {{"min_support", c.mining.min_support},
                   {"min_confidence", c.mining.min_confidence},
                   {"min_lift", c.mining.min_lift},
                   {"max_rules", c.mining.max_rules ? json(*c.mining.max_rules) : json(nullptr)}};
    j["caps"] = {{"max_side_items", c.caps.max_side_items},
                 {"max_generations", c.caps.max_generations},
                 {"decomposition", c.caps.decomposition}};
    j["focal"] = c.focal;
    j["out_dir"] = c.out_dir;
    j["workers"] = c.workers;
    j["checkpoint_interval"] = c.checkpoint_interval;
    return j;
}

void validate_sweep(const SweepConfig& s, const char* name) {
    if (s.n < 1 || s.d < 1)
        throw std::invalid_argument(std::string(name) + ": n and d must be >= 1");
    if (s.e_axis.step <= 0 || s.nf_axis.step <= 0 || s.t_axis.step <= 0 || s.seed_axis.step == 0)
        throw std::invalid_argument(std::string(name) + ": axis steps must be > 0");
    if (s.instances_per_point < 0)
        throw std::invalid_argument(std::string(name) + ": instances_per_point must be >= 0");
    // Every grid point must be generable, so the axis extremes must already
    // satisfy the per-instance parameter invariants.
    std::int64_t pairs = static_cast<std::int64_t>(s.n) * (s.n - 1) / 2;
    if (s.e_axis.start < 1 || s.e_axis.end > pairs)
        throw std::invalid_argument(std::string(name) + ": e axis leaves [1, n(n-1)/2]");
    if (s.nf_axis.start < 0)
        throw std::invalid_argument(std::string(name) + ": nf axis must be >= 0");
    if (s.nf_axis.end > s.e_axis.start)
        throw std::invalid_argument(std::string(name) +
                                    ": nf axis exceeds e at some grid points");
    if (s.t_axis.start < 0.0 || s.t_axis.end > 1.0 + 1e-9)
        throw std::invalid_argument(std::string(name) + ": t axis leaves [0, 1]");
    if (s.bif_share < 0.0 || s.bif_share > 1.0)
        throw std::invalid_argument(std::string(name) + ": bif_share must be in [0, 1]");
}

void validate_config(const PipelineConfig& c) {
    validate_sweep(c.phase1, "phase1");
    if (c.phase2) validate_sweep(*c.phase2, "phase2");
    if (!(c.thresholds.easy_below < c.thresholds.hard_above))
        throw std::invalid_argument("thresholds: easy_below must be < hard_above");
    if (!(c.thresholds.bt_easy_below < c.thresholds.bt_hard_above))
        throw std::invalid_argument("thresholds: bt_easy_below must be < bt_hard_above");
    if (c.bins < 1) throw std::invalid_argument("bins must be >= 1");
    if (c.caps.max_side_items < 1 || c.caps.max_generations < 1)
        throw std::invalid_argument("caps must be >= 1");
    if (!(c.mining.min_support > 0.0))
        throw std::invalid_argument("mining: min_support must be > 0");
    if (c.mining.min_confidence < 0.0 || c.mining.min_confidence > 1.0)
        throw std::invalid_argument("mining: min_confidence must be in [0, 1]");
    if (c.mining.min_lift < 0.0) throw std::invalid_argument("mining: min_lift must be >= 0");
    if (c.workers < 0) throw std::invalid_argument("workers must be >= 0");
    if (c.checkpoint_interval < 1) throw std::invalid_argument("checkpoint_interval must be >= 1");
    if (c.focal.empty()) throw std::invalid_argument("focal item must be non-empty");
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::string record_key(const InstanceRecord& r) {
    std::ostringstream os;
    os << r.e << ',' << r.nf << ',' << format_number(r.t) << ',' << r.seed;
    return os.str();
}

void write_checkpoint_file(const std::string& path, std::uint64_t hash,
                           const std::set<std::string>& completed) {
    json j;
    j["config_hash"] = hash_hex(hash);
    j["completed"] = completed;
    write_text_file(path, j.dump(2) + "\n");
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        PipelineConfig c;
        c.phase1 = sweep_from_json(j.at("phase1"));
        if (j.contains("phase2") && !j["phase2"].is_null())
            c.phase2 = sweep_from_json(j["phase2"]);
        c.two_phase = j.value("two_phase", false);
        c.phase2_instances_per_point = j.value("phase2_instances_per_point", 1);
        if (j.contains("limits")) {
            const auto& l = j["limits"];
            if (l.contains("time_budget_s") && !l["time_budget_s"].is_null())
                c.limits.time_budget_s = l["time_budget_s"].get<double>();
            if (l.contains("backtrack_budget") && !l["backtrack_budget"].is_null())
                c.limits.backtrack_budget = l["backtrack_budget"].get<std::int64_t>();
        }
        c.use_mac = j.value("use_mac", true);
        if (j.contains("thresholds")) {
            const auto& t = j["thresholds"];
            std::string mode = t.value("mode", "wallclock");
            if (mode == "wallclock")
                c.thresholds.mode = ThresholdMode::WallClock;
            else if (mode == "backtracks")
                c.thresholds.mode = ThresholdMode::Backtracks;
            else
                throw std::invalid_argument("thresholds.mode must be wallclock or backtracks");
            c.thresholds.easy_below = t.value("easy_below", c.thresholds.easy_below);
            c.thresholds.hard_above = t.value("hard_above", c.thresholds.hard_above);
            c.thresholds.bt_easy_below = t.value("bt_easy_below", c.thresholds.bt_easy_below);
            c.thresholds.bt_hard_above = t.value("bt_hard_above", c.thresholds.bt_hard_above);
        }
        c.bins = j.value("bins", 20);
        if (j.contains("mining")) {
            const auto& m = j["mining"];
            c.mining.min_support = m.value("min_support", 0.1);
            c.mining.min_confidence = m.value("min_confidence", 0.0);
            c.mining.min_lift = m.value("min_lift", 1.1);
            if (m.contains("max_rules") && !m["max_rules"].is_null())
                c.mining.max_rules = m["max_rules"].get<std::size_t>();
        }
        if (j.contains("caps")) {
            const auto& d = j["caps"];
            c.caps.max_side_items = d.value("max_side_items", 4);
            c.caps.max_generations = d.value("max_generations", 8);
            c.caps.decomposition = d.value("decomposition", true);
        }
        c.focal = j.value("focal", std::string("class=Hard"));
        c.out_dir = j.value("out_dir", std::string("out"));
        c.workers = j.value("workers", 1);
        c.checkpoint_interval = j.value("checkpoint_interval", 25);
        validate_config(c);
        return c;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

std::string config_to_json_text(const PipelineConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("out_dir");
    j.erase("workers");
    j.erase("checkpoint_interval");
    return fnv1a(j.dump());
}

std::string sweep_to_json_text(const SweepConfig& cfg) {
    return sweep_to_json(cfg).dump(2) + "\n";
}

InstanceRecord solve_point(const GenParams& p, const SolveLimits& limits, bool use_mac,
                           const HardnessThresholds& th) {
    SolveLimits effective = limits;
    // Wall-clock budgets are nondeterministic; in Backtracks mode the
    // backtrack budget alone bounds the search so artifacts stay identical
    // across runs and machines.
    if (th.mode == ThresholdMode::Backtracks) effective.time_budget_s.reset();

    CspInstance inst = generate(p);
    SolveResult res = solve(inst, effective, SolveOptions{use_mac});

    InstanceRecord r;
    r.n = p.n;
    r.d = p.d;
    r.e = p.e;
    r.nf = p.nf;
    r.t = p.t;
    r.seed = p.seed;
    switch (res.status) {
        case SolveStatus::Sat: r.sat = SatLabel::Yes; break;
        case SolveStatus::Unsat: r.sat = SatLabel::No; break;
        case SolveStatus::Timeout: r.sat = SatLabel::Timeout; break;
    }
    r.backtracks = res.backtracks;
    r.nodes = res.nodes;
    r.elapsed_s = th.mode == ThresholdMode::Backtracks ? 0.0 : res.elapsed_s;
    r.cls = classify_outcome(r.sat, res.elapsed_s, res.backtracks, th);
    return r;
}

std::vector<InstanceRecord> solve_points_serial(const std::vector<GenParams>& points,
                                                const SolveLimits& limits, bool use_mac,
                                                const HardnessThresholds& th) {
    std::vector<InstanceRecord> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(solve_point(p, limits, use_mac, th));
    return out;
}

std::string sweep_point_key(const GenParams& p) {
    std::ostringstream os;
    os << p.e << ',' << p.nf << ',' << format_number(p.t) << ',' << p.seed;
    return os.str();
}

SweepRunResult run_sweep(const SweepConfig& sweep, const SolveLimits& limits, bool use_mac,
                         const HardnessThresholds& th, const SweepRunOptions& opts,
                         const SweepProgress* progress) {
    auto points = sweep_grid(sweep);
    SweepRunResult out;
    out.records.resize(points.size());

    std::unordered_map<std::string, const InstanceRecord*> known;
    if (progress)
        for (const auto& r : progress->records) known[record_key(r)] = &r;

    std::set<std::string> completed;
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto key = sweep_point_key(points[i]);
        auto it = known.find(key);
        if (it != known.end()) {
            out.records[i] = *it->second;
            completed.insert(std::move(key));
        } else {
            todo.push_back(i);
        }
    }

    bool truncated = false;
    if (opts.stop_after && todo.size() > *opts.stop_after) {
        todo.resize(*opts.stop_after);
        truncated = true;
    }

    std::ofstream partial;
    if (!opts.partial_csv_path.empty()) {
        bool fresh = !fs::exists(opts.partial_csv_path) ||
                     fs::file_size(opts.partial_csv_path) == 0;
        partial.open(opts.partial_csv_path, std::ios::app);
        if (!partial) throw std::runtime_error("cannot open: " + opts.partial_csv_path);
        if (fresh) partial << kInstanceCsvHeader << '\n' << std::flush;
    }

    int since_checkpoint = 0;
    auto commit = [&](std::size_t i, InstanceRecord rec) {
        out.records[i] = rec;
        completed.insert(sweep_point_key(points[i]));
        if (partial.is_open()) partial << record_csv_row(rec) << '\n' << std::flush;
        if (!opts.checkpoint_path.empty() && ++since_checkpoint >= opts.checkpoint_interval) {
            write_checkpoint_file(opts.checkpoint_path, opts.config_hash, completed);
            since_checkpoint = 0;
        }
    };

    int workers = resolve_workers(opts.workers);
#ifdef _OPENMP
    if (workers > 1) {
        // A worker-thread exception must not escape the parallel region;
        // capture the first one and rethrow after the join.
        std::exception_ptr first_error = nullptr;
        std::atomic<bool> failed{false};
        auto n = static_cast<std::int64_t>(todo.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic)
        for (std::int64_t k = 0; k < n; ++k) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                std::size_t i = todo[static_cast<std::size_t>(k)];
                InstanceRecord rec = solve_point(points[i], limits, use_mac, th);
#pragma omp critical
                commit(i, rec);
            } catch (...) {
#pragma omp critical
                if (!first_error) {
                    first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
    } else
#endif
    {
        for (std::size_t i : todo) commit(i, solve_point(points[i], limits, use_mac, th));
    }

    out.solved_now = todo.size();
    out.complete = !truncated;
    if (!out.complete && !opts.checkpoint_path.empty())
        write_checkpoint_file(opts.checkpoint_path, opts.config_hash, completed);
    return out;
}

SweepProgress load_progress(const std::string& checkpoint_path, const std::string& partial_csv_path,
                            std::uint64_t expected_hash) {
    SweepProgress progress;
    if (checkpoint_path.empty() || !fs::exists(checkpoint_path)) return progress;

    std::ifstream is(checkpoint_path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("checkpoint: invalid JSON: " + std::string(e.what()));
    }
    if (j.value("config_hash", std::string()) != hash_hex(expected_hash))
        throw std::invalid_argument(
            "resume: checkpoint config hash does not match the current config");
    for (const auto& k : j.value("completed", std::vector<std::string>{}))
        progress.completed.insert(k);

    if (!partial_csv_path.empty() && fs::exists(partial_csv_path)) {
        auto rows = read_csv_file(partial_csv_path);
        for (auto& r : rows)
            if (progress.completed.count(record_key(r))) progress.records.push_back(r);
    }
    return progress;
}

RefinedPlan refine_sweep(const SweepConfig& coarse, const std::vector<InstanceRecord>& records,
                         int instances_per_point) {
    RefinedPlan plan;
    plan.refined = coarse;
    plan.refined.instances_per_point = instances_per_point;

    std::int64_t e_lo = 0, e_hi = 0, nf_lo = 0, nf_hi = 0;
    double t_lo = 0.0, t_hi = 0.0;
    bool first = true;
    for (const auto& r : records) {
        if (r.cls == HardClass::Easy) continue;
        if (first) {
            e_lo = e_hi = r.e;
            nf_lo = nf_hi = r.nf;
            t_lo = t_hi = r.t;
            first = false;
        } else {
            e_lo = std::min<std::int64_t>(e_lo, r.e);
            e_hi = std::max<std::int64_t>(e_hi, r.e);
            nf_lo = std::min<std::int64_t>(nf_lo, r.nf);
            nf_hi = std::max<std::int64_t>(nf_hi, r.nf);
            t_lo = std::min(t_lo, r.t);
            t_hi = std::max(t_hi, r.t);
        }
    }
    if (first) return plan;  // nothing left Easy behind: no second step

    plan.any_non_easy = true;
    plan.refined.e_axis.start = e_lo;
    plan.refined.e_axis.end = e_hi;
    plan.refined.nf_axis.start = nf_lo;
    plan.refined.nf_axis.end = nf_hi;
    plan.refined.t_axis.start = t_lo;
    plan.refined.t_axis.end = t_hi;
    return plan;
}

Phase1Result run_phase1(const PipelineConfig& cfg, bool resume,
                        std::optional<std::size_t> stop_after) {
    validate_config(cfg);
    fs::create_directories(cfg.out_dir);
    fs::path dir(cfg.out_dir);
    auto hash = config_hash(cfg);

    SweepRunOptions opts;
    opts.workers = cfg.workers;
    opts.stop_after = stop_after;
    opts.partial_csv_path = (dir / "phase1_instances.partial.csv").string();
    opts.checkpoint_path = (dir / "phase1_checkpoint.json").string();
    opts.config_hash = hash;
    opts.checkpoint_interval = cfg.checkpoint_interval;

    SweepProgress progress;
    if (resume)
        progress = load_progress(opts.checkpoint_path, opts.partial_csv_path, hash);
    else {
        fs::remove(opts.checkpoint_path);
        fs::remove(opts.partial_csv_path);
    }

    Phase1Result res;
    auto run = stage("phase1", [&] {
        return run_sweep(cfg.phase1, cfg.limits, cfg.use_mac, cfg.thresholds, opts,
                         resume ? &progress : nullptr);
    });
    res.complete = run.complete;
    res.solved_now = run.solved_now;
    if (!res.complete) return res;

    res.records = sorted_by_sweep_key(run.records);
    stage("phase1-artifacts", [&] {
        write_csv_file((dir / "phase1_instances.csv").string(), res.records);
        fs::remove(opts.checkpoint_path);
        fs::remove(opts.partial_csv_path);
        return 0;
    });
    res.plan = refine_sweep(cfg.phase1, res.records, cfg.phase2_instances_per_point);
    stage("phase1-artifacts", [&] {
        write_text_file(dir / "refined_config.json",
                        res.plan.any_non_easy ? sweep_to_json_text(res.plan.refined)
                                              : std::string("null\n"));
        return 0;
    });
    return res;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg, bool resume,
                             std::optional<std::size_t> stop_after) {
    validate_config(cfg);
    fs::create_directories(cfg.out_dir);
    fs::path dir(cfg.out_dir);
    auto hash = config_hash(cfg);

    PipelineOutcome out;
    out.dir = cfg.out_dir;

    json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["config"] = json::parse(config_to_json_text(cfg));
    manifest["config_hash"] = hash_hex(hash);
    manifest["stopped"] = nullptr;

    // Decide the grid the dataset comes from.
    SweepConfig main_sweep = cfg.phase1;
    if (cfg.phase2) {
        main_sweep = *cfg.phase2;
    } else if (cfg.two_phase) {
        Phase1Result p1;
        auto phase1_csv = dir / "phase1_instances.csv";
        if (resume && fs::exists(phase1_csv) && !fs::exists(dir / "phase1_checkpoint.json")) {
            // Phase 1 already finished in an earlier session.
            p1.records = stage("phase1", [&] { return read_csv_file(phase1_csv.string()); });
            p1.plan = refine_sweep(cfg.phase1, p1.records, cfg.phase2_instances_per_point);
        } else {
            p1 = run_phase1(cfg, resume, stop_after);
            if (!p1.complete) {
                out.complete = false;
                return out;
            }
            // Whatever budget phase 1 used comes off the main sweep's.
            if (stop_after) stop_after = *stop_after - p1.solved_now;
        }
        if (!p1.plan.any_non_easy) {
            out.stopped_all_easy = true;
            manifest["stopped"] = "phase1-all-easy";
            manifest["counts"] = {{"instances", p1.records.size()}};
            write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
            return out;
        }
        main_sweep = p1.plan.refined;
    }

    SweepRunOptions opts;
    opts.workers = cfg.workers;
    opts.stop_after = stop_after;
    opts.partial_csv_path = (dir / "instances.partial.csv").string();
    opts.checkpoint_path = (dir / "checkpoint.json").string();
    opts.config_hash = hash;
    opts.checkpoint_interval = cfg.checkpoint_interval;

    SweepProgress progress;
    if (resume)
        progress = load_progress(opts.checkpoint_path, opts.partial_csv_path, hash);
    else {
        fs::remove(opts.checkpoint_path);
        fs::remove(opts.partial_csv_path);
    }

    auto sweep_run = stage("sweep", [&] {
        return run_sweep(main_sweep, cfg.limits, cfg.use_mac, cfg.thresholds, opts,
                         resume ? &progress : nullptr);
    });
    if (!sweep_run.complete) {
        out.complete = false;
        return out;
    }

    auto records = sorted_by_sweep_key(sweep_run.records);
    out.total_records = records.size();
    stage("instances", [&] {
        write_csv_file((dir / "instances.csv").string(), records);
        fs::remove(opts.checkpoint_path);
        fs::remove(opts.partial_csv_path);
        return 0;
    });

    auto selected = select_for_mining(records);
    out.selected = selected.size();

    std::vector<AssociationRule> mined;
    std::vector<AssociationRule> closed;
    TransactionDb db;
    if (selected.empty()) {
        manifest["stopped"] = "no-instances-selected";
        stage("transactions", [&] {
            write_text_file(dir / "transactions.txt", "");
            return 0;
        });
    } else {
        auto table = stage("discretize", [&] { return drop_redundant(selected); });
        auto [tdb, scheme] = stage("discretize", [&] { return discretize(table, cfg.bins); });
        db = std::move(tdb);
        stage("transactions", [&] {
            std::ofstream os(dir / "transactions.txt");
            if (!os) throw std::runtime_error("cannot open transactions.txt");
            write_transactions(db, os);
            return 0;
        });
        json bins_json = json::array();
        for (const auto& s : scheme.specs)
            bins_json.push_back({{"attr", s.attr},
                                 {"constant", s.constant},
                                 {"min", s.min},
                                 {"max", s.max},
                                 {"width", s.width},
                                 {"labels", s.labels}});
        manifest["binning"] = {{"bins", scheme.bins}, {"specs", std::move(bins_json)}};

        mined = stage("mine", [&] {
            // A min_support above 1 cannot be met by any itemset; emit the
            // empty rule set instead of rejecting the run.
            if (cfg.mining.min_support > 1.0) return std::vector<AssociationRule>{};
            return mine_rules(db, cfg.mining, resolve_workers(cfg.workers));
        });
        closed = stage("deduce", [&] { return closure(mined, db, cfg.caps); });
    }
    out.mined_rules = mined.size();
    out.closed_rules = closed.size();

    stage("rules", [&] {
        write_rules_csv_file((dir / "rules_mined.csv").string(), mined, false);
        write_rules_csv_file((dir / "rules_deduced.csv").string(), closed, true);
        return 0;
    });

    stage("report", [&] {
        if (closed.empty()) {
            PatternReport empty;
            empty.focal = cfg.focal;
            write_text_file(dir / "pattern_report.json", pattern_report_json(empty));
        } else {
            write_text_file(dir / "pattern_report.json",
                            pattern_report_json(pattern_report(closed, cfg.focal)));
        }
        return 0;
    });

    manifest["counts"] = {{"instances", out.total_records},
                          {"selected", out.selected},
                          {"mined_rules", out.mined_rules},
                          {"closed_rules", out.closed_rules}};
    manifest["artifacts"] = {"instances.csv", "transactions.txt", "rules_mined.csv",
                             "rules_deduced.csv", "pattern_report.json"};
    stage("manifest", [&] {
        write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
        return 0;
    });
    return out;
}

}  // namespace csphard

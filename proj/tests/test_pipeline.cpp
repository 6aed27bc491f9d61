#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csphard/pipeline.hpp"

using namespace csphard;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("csphard-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small, fast grid with a real Easy/Medium/Hard mix under the thresholds
// below (checked empirically, then frozen).
PipelineConfig mini_config(const std::string& dir_name) {
    PipelineConfig cfg;
    cfg.phase1.n = 12;
    cfg.phase1.d = 6;
    cfg.phase1.e_axis = {33, 66, 11};
    cfg.phase1.nf_axis = {0, 2, 1};
    cfg.phase1.t_axis = {0.3, 0.7, 0.1};
    cfg.phase1.seed_axis = {93728, 93728, 123};
    cfg.phase1.instances_per_point = 2;
    cfg.limits.backtrack_budget = 20000;
    cfg.thresholds.mode = ThresholdMode::Backtracks;
    cfg.thresholds.bt_easy_below = 1;
    cfg.thresholds.bt_hard_above = 2;
    cfg.bins = 4;
    cfg.mining.min_support = 0.1;
    cfg.mining.min_lift = 1.05;
    cfg.mining.max_rules = 60;
    cfg.focal = "class=Hard";
    cfg.out_dir = fresh_dir(dir_name).string();
    cfg.workers = 1;
    cfg.checkpoint_interval = 10;
    return cfg;
}

// The manifest embeds the config (including out_dir), so it is compared for
// existence only; the data artifacts must match byte for byte.
const std::vector<std::string> kArtifacts = {"instances.csv", "transactions.txt",
                                             "rules_mined.csv", "rules_deduced.csv",
                                             "pattern_report.json"};

void check_same_artifacts(const fs::path& a, const fs::path& b) {
    for (const auto& name : kArtifacts) CHECK(slurp(a / name) == slurp(b / name));
    CHECK(fs::exists(a / "manifest.json"));
    CHECK(fs::exists(b / "manifest.json"));
}

}  // namespace

TEST_CASE("sweep farm: parallel run equals the serial reference") {
    auto cfg = mini_config("farm");
    auto points = sweep_grid(cfg.phase1);
    auto serial = solve_points_serial(points, cfg.limits, true, cfg.thresholds);

    SweepRunOptions opts;
    opts.workers = 4;
    auto parallel = run_sweep(cfg.phase1, cfg.limits, true, cfg.thresholds, opts);
    REQUIRE(parallel.complete);
    CHECK(sorted_by_sweep_key(serial) == sorted_by_sweep_key(parallel.records));
}

TEST_CASE("pipeline artifacts are a pure function of the config") {
    auto cfg1 = mini_config("det1");
    auto out1 = run_pipeline(cfg1);
    REQUIRE(out1.complete);
    CHECK(out1.total_records == sweep_grid(cfg1.phase1).size());

    auto cfg2 = mini_config("det2");
    auto out2 = run_pipeline(cfg2);
    REQUIRE(out2.complete);
    check_same_artifacts(cfg1.out_dir, cfg2.out_dir);

    auto cfg4 = mini_config("det4");
    cfg4.workers = 4;
    REQUIRE(run_pipeline(cfg4).complete);
    check_same_artifacts(cfg1.out_dir, cfg4.out_dir);
}

TEST_CASE("interrupted sweep resumes to an identical result") {
    auto full_cfg = mini_config("resume-full");
    REQUIRE(run_pipeline(full_cfg).complete);

    auto cfg = mini_config("resume-part");
    auto points = sweep_grid(cfg.phase1).size();
    auto part = run_pipeline(cfg, false, points / 2);
    CHECK_FALSE(part.complete);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "checkpoint.json"));

    auto resumed = run_pipeline(cfg, true);
    REQUIRE(resumed.complete);
    check_same_artifacts(cfg.out_dir, full_cfg.out_dir);
    // Checkpoint scaffolding is cleaned up after completion.
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "checkpoint.json"));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "instances.partial.csv"));
}

TEST_CASE("a run interrupted repeatedly still converges to the same bytes") {
    auto full_cfg = mini_config("chunk-full");
    REQUIRE(run_pipeline(full_cfg).complete);

    auto cfg = mini_config("chunk-part");
    REQUIRE_FALSE(run_pipeline(cfg, false, 25).complete);
    REQUIRE_FALSE(run_pipeline(cfg, true, 25).complete);
    REQUIRE_FALSE(run_pipeline(cfg, true, 25).complete);
    REQUIRE(run_pipeline(cfg, true).complete);
    check_same_artifacts(cfg.out_dir, full_cfg.out_dir);
}

TEST_CASE("two-phase runs survive interruption in either phase") {
    // The refined grid carries a different class mix, so this test pins the
    // checkpointing behaviour with a focal item that is always present.
    auto two_phase_cfg = [&](const std::string& name) {
        auto c = mini_config(name);
        c.two_phase = true;
        c.phase2_instances_per_point = 3;
        c.mining.min_lift = 1.0;
        c.focal = "sat=NO";
        return c;
    };
    auto full_cfg = two_phase_cfg("twophase-full");
    REQUIRE(run_pipeline(full_cfg).complete);
    CHECK(fs::exists(fs::path(full_cfg.out_dir) / "phase1_instances.csv"));
    CHECK(fs::exists(fs::path(full_cfg.out_dir) / "refined_config.json"));

    auto cfg = two_phase_cfg("twophase-part");
    auto phase1_points = sweep_grid(cfg.phase1).size();
    // First interruption lands inside phase 1, the second inside the main sweep.
    REQUIRE_FALSE(run_pipeline(cfg, false, phase1_points / 2).complete);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "phase1_checkpoint.json"));
    REQUIRE_FALSE(run_pipeline(cfg, true, phase1_points / 2 + 10).complete);
    REQUIRE(run_pipeline(cfg, true).complete);
    check_same_artifacts(cfg.out_dir, full_cfg.out_dir);
    CHECK(slurp(fs::path(cfg.out_dir) / "phase1_instances.csv") ==
          slurp(fs::path(full_cfg.out_dir) / "phase1_instances.csv"));
}

TEST_CASE("resume refuses an edited config") {
    auto cfg = mini_config("resume-edit");
    auto part = run_pipeline(cfg, false, 10);
    REQUIRE_FALSE(part.complete);

    auto edited = cfg;
    edited.phase1.t_axis.end = 0.6;
    CHECK_THROWS_AS(run_pipeline(edited, true), std::invalid_argument);
}

TEST_CASE("resume without a checkpoint runs the full sweep") {
    auto cfg = mini_config("resume-fresh");
    auto out = run_pipeline(cfg, true);
    REQUIRE(out.complete);
    CHECK(out.total_records == sweep_grid(cfg.phase1).size());
}

TEST_CASE("wallclock mode completes and skips mining when nothing is selected") {
    // At this scale every solve is far below the 5 s Easy boundary, so the
    // wall-clock pipeline exercises the empty-selection path.
    auto cfg = mini_config("wallclock");
    cfg.thresholds.mode = ThresholdMode::WallClock;
    cfg.limits.time_budget_s = 10.0;
    auto out = run_pipeline(cfg);
    REQUIRE(out.complete);
    CHECK(out.selected == 0);
    CHECK(out.mined_rules == 0);
    CHECK(slurp(fs::path(cfg.out_dir) / "transactions.txt").empty());
    CHECK(slurp(fs::path(cfg.out_dir) / "manifest.json").find("no-instances-selected") !=
          std::string::npos);

    // Real wall times make it into the CSV in this mode.
    auto records = read_csv_file((fs::path(cfg.out_dir) / "instances.csv").string());
    bool any_elapsed = false;
    for (const auto& r : records) any_elapsed = any_elapsed || r.elapsed_s > 0.0;
    CHECK(any_elapsed);
}

TEST_CASE("stray partial rows not covered by the checkpoint are re-solved") {
    auto full_cfg = mini_config("stray-full");
    REQUIRE(run_pipeline(full_cfg).complete);

    auto cfg = mini_config("stray-part");
    REQUIRE_FALSE(run_pipeline(cfg, false, 20).complete);
    {
        // A row flushed after the last checkpoint rewrite looks exactly like
        // this: present in the partial CSV, absent from the checkpoint.
        std::ofstream partial(fs::path(cfg.out_dir) / "instances.partial.csv", std::ios::app);
        InstanceRecord fake;
        fake.n = cfg.phase1.n;
        fake.d = cfg.phase1.d;
        fake.e = 66;
        fake.nf = 2;
        fake.t = 0.7;
        fake.seed = 999999;  // not a grid key
        fake.sat = SatLabel::Yes;
        fake.cls = HardClass::Easy;
        partial << record_csv_row(fake) << '\n';
    }
    REQUIRE(run_pipeline(cfg, true).complete);
    check_same_artifacts(cfg.out_dir, full_cfg.out_dir);
}

TEST_CASE("unreachable support yields header-only rule files") {
    auto cfg = mini_config("nosupport");
    cfg.mining.min_support = 1.1;
    auto out = run_pipeline(cfg);
    REQUIRE(out.complete);
    CHECK(out.mined_rules == 0);
    CHECK(slurp(fs::path(cfg.out_dir) / "rules_mined.csv") ==
          "antecedent,consequent,support,confidence,lift,conviction\n");
}

TEST_CASE("refine_sweep trims to the non-Easy hull") {
    SweepConfig coarse;
    coarse.n = 8;
    coarse.d = 4;
    coarse.e_axis = {100, 1076, 122};
    coarse.nf_axis = {0, 4, 1};
    coarse.t_axis = {0.1, 0.9, 0.1};
    coarse.seed_axis = {1, 1, 1};
    coarse.instances_per_point = 1;

    std::vector<InstanceRecord> records;
    auto rec = [&](int e, int nf, double t, HardClass cls) {
        InstanceRecord r;
        r.n = 8;
        r.d = 4;
        r.e = e;
        r.nf = nf;
        r.t = t;
        r.cls = cls;
        records.push_back(r);
    };
    rec(100, 0, 0.1, HardClass::Easy);
    rec(344, 1, 0.3, HardClass::Medium);
    rec(588, 2, 0.6, HardClass::Hard);
    rec(710, 3, 0.7, HardClass::Medium);
    rec(1076, 4, 0.9, HardClass::Easy);

    auto plan = refine_sweep(coarse, records, 1);
    REQUIRE(plan.any_non_easy);
    CHECK(plan.refined.e_axis.start == 344);
    CHECK(plan.refined.e_axis.end == 710);
    CHECK(plan.refined.nf_axis.start == 1);
    CHECK(plan.refined.nf_axis.end == 3);
    CHECK(plan.refined.t_axis.start == 0.3);
    CHECK(plan.refined.t_axis.end == 0.7);
    CHECK(plan.refined.instances_per_point == 1);

    auto none = refine_sweep(coarse, {records[0], records[4]}, 1);
    CHECK_FALSE(none.any_non_easy);
}

TEST_CASE("phase 1 refinement stays inside the coarse box") {
    auto cfg = mini_config("phase1");
    cfg.phase1.t_axis = {0.1, 0.9, 0.2};
    auto res = run_phase1(cfg);
    REQUIRE(res.complete);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "phase1_instances.csv"));
    if (res.plan.any_non_easy) {
        CHECK(res.plan.refined.e_axis.start >= cfg.phase1.e_axis.start);
        CHECK(res.plan.refined.e_axis.end <= cfg.phase1.e_axis.end);
        CHECK(res.plan.refined.nf_axis.start >= cfg.phase1.nf_axis.start);
        CHECK(res.plan.refined.nf_axis.end <= cfg.phase1.nf_axis.end);
        CHECK(res.plan.refined.t_axis.start >= cfg.phase1.t_axis.start - 1e-9);
        CHECK(res.plan.refined.t_axis.end <= cfg.phase1.t_axis.end + 1e-9);
    }
}

TEST_CASE("two-phase pipeline stops with a manifest when everything is Easy") {
    auto cfg = mini_config("alleasy");
    cfg.two_phase = true;
    cfg.thresholds.bt_easy_below = 1000000000;  // nothing can leave Easy
    cfg.thresholds.bt_hard_above = 2000000000;
    auto out = run_pipeline(cfg);
    REQUIRE(out.complete);
    CHECK(out.stopped_all_easy);
    CHECK(slurp(fs::path(cfg.out_dir) / "manifest.json").find("phase1-all-easy") !=
          std::string::npos);
}

TEST_CASE("config JSON round trips and hashes ignore presentation fields") {
    auto cfg = mini_config("json");
    auto text = config_to_json_text(cfg);
    auto back = config_from_json_text(text);
    CHECK(config_to_json_text(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));

    auto moved = cfg;
    moved.out_dir = "elsewhere";
    moved.workers = 16;
    CHECK(config_hash(moved) == config_hash(cfg));

    auto changed = cfg;
    changed.phase1.d = 5;
    CHECK(config_hash(changed) != config_hash(cfg));

    CHECK_THROWS_AS(config_from_json_text("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json_text("{}"), std::invalid_argument);
}

TEST_CASE("configs whose grid would violate instance invariants are rejected") {
    auto cfg = mini_config("badcfg");
    auto bad = cfg;
    bad.phase1.nf_axis.end = bad.phase1.e_axis.start + 1;  // nf > e at the low-e points
    CHECK_THROWS_AS(run_pipeline(bad), std::invalid_argument);

    bad = cfg;
    bad.phase1.e_axis.end = 1000;  // beyond n(n-1)/2
    CHECK_THROWS_AS(run_pipeline(bad), std::invalid_argument);

    bad = cfg;
    bad.phase1.t_axis.end = 1.5;
    CHECK_THROWS_AS(run_pipeline(bad), std::invalid_argument);
}

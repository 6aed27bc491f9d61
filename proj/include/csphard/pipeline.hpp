#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "csphard/dataset.hpp"
#include "csphard/deduce.hpp"
#include "csphard/generator.hpp"
#include "csphard/miner.hpp"
#include "csphard/solver.hpp"

namespace csphard {

inline constexpr const char* kToolName = "csphard";
inline constexpr const char* kToolVersion = "0.1.0";

// End-to-end cascade configuration. In Backtracks threshold mode the
// pipeline zeroes recorded wall times and drops the wall-clock budget so the
// artifacts are a pure function of this struct.
struct PipelineConfig {
    SweepConfig phase1;
    std::optional<SweepConfig> phase2;  // explicit second-step grid; overrides two_phase
    bool two_phase = false;             // derive the second step from phase-1 results
    int phase2_instances_per_point = 1;
    SolveLimits limits;
    bool use_mac = true;
    HardnessThresholds thresholds;
    int bins = 20;
    MiningThresholds mining;
    DeductionCaps caps;
    std::string focal = "class=Hard";
    std::string out_dir = "out";
    int workers = 1;
    int checkpoint_interval = 25;
};

PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& cfg);
// Hash of the scientific part of the config (output dir, worker count and
// checkpoint cadence excluded: they cannot change results).
std::uint64_t config_hash(const PipelineConfig& cfg);

// Generate + solve + classify one sweep point.
InstanceRecord solve_point(const GenParams& p, const SolveLimits& limits, bool use_mac,
                           const HardnessThresholds& th);

// Serial reference for the sweep farm; the checkpointed OpenMP runner in
// run_sweep is tested against it.
std::vector<InstanceRecord> solve_points_serial(const std::vector<GenParams>& points,
                                                const SolveLimits& limits, bool use_mac,
                                                const HardnessThresholds& th);

std::string sweep_point_key(const GenParams& p);

struct SweepProgress {
    std::set<std::string> completed;
    std::vector<InstanceRecord> records;
};

struct SweepRunOptions {
    int workers = 1;
    std::optional<std::size_t> stop_after;  // solve at most this many new points, then checkpoint
    std::string partial_csv_path;           // completed rows are appended here when set
    std::string checkpoint_path;            // checkpoint JSON is rewritten periodically when set
    std::uint64_t config_hash = 0;
    int checkpoint_interval = 25;
};

struct SweepRunResult {
    std::vector<InstanceRecord> records;  // meaningful only when complete
    bool complete = true;
    std::size_t solved_now = 0;
};

// Solves every grid point not already in `progress`, farming points across
// an OpenMP worker pool. Results are keyed by grid index, so worker count
// and completion order never affect the output.
SweepRunResult run_sweep(const SweepConfig& sweep, const SolveLimits& limits, bool use_mac,
                         const HardnessThresholds& th, const SweepRunOptions& opts,
                         const SweepProgress* progress = nullptr);

// Loads checkpoint + partial CSV; throws when the stored hash does not match.
SweepProgress load_progress(const std::string& checkpoint_path, const std::string& partial_csv_path,
                            std::uint64_t expected_hash);

struct RefinedPlan {
    bool any_non_easy = false;
    SweepConfig refined;
};

// Second-step grid derivation: per swept axis, the smallest contiguous range
// covering every non-Easy point, padded by one step and clamped to the
// original bounds. Axes that never left Easy leave the plan empty.
RefinedPlan refine_sweep(const SweepConfig& coarse, const std::vector<InstanceRecord>& records,
                         int instances_per_point);

std::string sweep_to_json_text(const SweepConfig& cfg);

struct Phase1Result {
    std::vector<InstanceRecord> records;
    RefinedPlan plan;
    bool complete = true;
    std::size_t solved_now = 0;
};

Phase1Result run_phase1(const PipelineConfig& cfg, bool resume = false,
                        std::optional<std::size_t> stop_after = std::nullopt);

struct PipelineOutcome {
    bool complete = true;          // false when stop_after interrupted the sweep
    bool stopped_all_easy = false; // two-phase run found only Easy instances
    std::string dir;
    std::size_t total_records = 0;
    std::size_t selected = 0;
    std::size_t mined_rules = 0;
    std::size_t closed_rules = 0;
};

// The full cascade: sweep -> classify -> select -> discretize -> mine ->
// deduce -> pattern report, with artifacts and a manifest under
// cfg.out_dir. Stage failures throw StageError; artifacts written so far
// stay on disk.
PipelineOutcome run_pipeline(const PipelineConfig& cfg, bool resume = false,
                             std::optional<std::size_t> stop_after = std::nullopt);

struct StageError : std::runtime_error {
    explicit StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage_name(stage) {}
    std::string stage_name;
};

}  // namespace csphard

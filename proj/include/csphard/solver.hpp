#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csphard/bits.hpp"
#include "csphard/model.hpp"

namespace csphard {

// Mutable search state: the remaining domain of every variable plus the
// AC-2001 last-support table. last_support[(c*2+dir)*d + v] holds the most
// recently verified partner for value v across constraint c (dir 0: value of
// i supported in D_j, dir 1: value of j supported in D_i), or -1 before the
// first lookup. A stored entry is always a member of the relation; it is a
// live support whenever it is still in the neighbour's domain.
struct DomainState {
    std::vector<ValueSet> dom;
    std::vector<std::int32_t> last_support;

    static DomainState full(const CspInstance& inst);
};

struct PropagationResult {
    bool consistent = true;
    int wiped_var = -1;  // first variable whose domain emptied
};

// AC-2001/3.1: arc-consistency fixpoint with last-support caching. Returns
// the unique maximal arc-consistent subdomain or the first wipeout.
PropagationResult ac2001_propagate(const CspInstance& inst, DomainState& dom);

// Naive AC-3 revise (no support memory). Same fixpoint contract; kept as the
// serial reference the AC-2001 path is tested against.
PropagationResult ac3_propagate(const CspInstance& inst, DomainState& dom);

struct SolveLimits {
    std::optional<double> time_budget_s;
    std::optional<std::int64_t> backtrack_budget;
};

struct SolveOptions {
    // MAC (propagate after every assignment) by default; false gives plain
    // chronological backtracking with AC only at the root.
    bool use_mac = true;
};

enum class SolveStatus { Sat, Unsat, Timeout };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Unsat;
    std::optional<std::vector<int>> assignment;
    std::int64_t backtracks = 0;  // retreats from a variable after exhausting its values
    std::int64_t nodes = 0;       // assignments tried
    double elapsed_s = 0.0;
};

// Complete search: static max-degree variable order (ties by smallest
// index), ascending value order, chronological backtracking. Statistics are
// deterministic for a given instance; elapsed_s is wall time around the
// solve only.
SolveResult solve(const CspInstance& inst, const SolveLimits& limits = {},
                  const SolveOptions& opts = {});

bool verify_assignment(const CspInstance& inst, const std::vector<int>& assignment);

// Exhaustive oracle; guarded to d^n <= 10^7 assignments.
bool brute_force_satisfiable(const CspInstance& inst);

}  // namespace csphard

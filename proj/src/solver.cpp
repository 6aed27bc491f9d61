#include "csphard/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace csphard {

DomainState DomainState::full(const CspInstance& inst) {
    DomainState s;
    s.dom.assign(inst.num_vars, ValueSet(inst.domain_size, true));
    s.last_support.assign(inst.constraints.size() * 2 * static_cast<std::size_t>(inst.domain_size),
                          -1);
    return s;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Sat: return "SAT";
        case SolveStatus::Unsat: return "UNSAT";
        case SolveStatus::Timeout: return "TIMEOUT";
    }
    return "?";
}

namespace {

struct TrailEntry {
    std::size_t idx;
    std::int32_t old;
};
using Trail = std::vector<TrailEntry>;

// Shared arc-revision engine for AC-2001 and the AC-3 reference. Arcs are
// encoded as c*2+dir where dir 0 revises variable i against j and dir 1
// revises j against i.
class Propagator {
public:
    explicit Propagator(const CspInstance& inst) : inst_(inst), adj_(inst.var_constraints()) {}

    // seed_var >= 0 starts from the arcs around one just-assigned variable
    // (valid when the incoming state is already arc consistent); otherwise
    // every arc is queued.
    PropagationResult run(DomainState& s, bool use_last, Trail* trail, int seed_var = -1) {
        std::size_t arcs = inst_.constraints.size() * 2;
        in_queue_.assign(arcs, false);
        queue_.clear();
        if (seed_var < 0) {
            for (std::size_t a = 0; a < arcs; ++a) push(static_cast<int>(a));
        } else {
            enqueue_neighbours(seed_var, -1);
        }
        std::size_t head = 0;
        while (head < queue_.size()) {
            int arc = queue_[head++];
            in_queue_[arc] = false;
            int ci = arc >> 1;
            int dir = arc & 1;
            int revised = dir == 0 ? inst_.constraints[ci].i : inst_.constraints[ci].j;
            if (revise(s, ci, dir, use_last, trail)) {
                if (s.dom[revised].empty()) return {false, revised};
                enqueue_neighbours(revised, ci);
            }
        }
        return {true, -1};
    }

private:
    void push(int arc) {
        if (!in_queue_[arc]) {
            in_queue_[arc] = true;
            queue_.push_back(arc);
        }
    }

    // Queue the arcs that revise x's neighbours against x. The constraint
    // just revised is skipped: values deleted from x for lack of support in
    // y cannot have supported anything in y.
    void enqueue_neighbours(int x, int skip_ci) {
        for (int ci : adj_[x]) {
            if (ci == skip_ci) continue;
            const auto& c = inst_.constraints[ci];
            push(c.i == x ? ci * 2 + 1 : ci * 2);
        }
    }

    bool revise(DomainState& s, int ci, int dir, bool use_last, Trail* trail) {
        const auto& c = inst_.constraints[ci];
        int x = dir == 0 ? c.i : c.j;
        int y = dir == 0 ? c.j : c.i;
        const ValueSet& dy = s.dom[y];
        std::size_t base =
            (static_cast<std::size_t>(ci) * 2 + dir) * static_cast<std::size_t>(inst_.domain_size);
        bool changed = false;
        for (int v = s.dom[x].first(); v >= 0; v = s.dom[x].next_ge(v + 1)) {
            auto row = dir == 0 ? c.allowed.row(v) : c.allowed.col(v);
            if (use_last) {
                std::int32_t last = s.last_support[base + v];
                if (last >= 0 && dy.test(last)) continue;
                // Supports are scanned in ascending order; everything below
                // `last` is out of dom(y) for as long as this entry lives
                // (the trail restores it on backtrack).
                int b = next_common_ge(row, dy, last + 1);
                if (b >= 0) {
                    if (trail) trail->push_back({base + v, last});
                    s.last_support[base + v] = static_cast<std::int32_t>(b);
                    continue;
                }
            } else {
                if (next_common_ge(row, dy, 0) >= 0) continue;
            }
            s.dom[x].remove(v);
            changed = true;
        }
        return changed;
    }

    const CspInstance& inst_;
    std::vector<std::vector<int>> adj_;
    std::vector<char> in_queue_;
    std::vector<int> queue_;
};

std::vector<int> static_order(const CspInstance& inst) {
    auto deg = inst.degrees();
    std::vector<int> order(inst.num_vars);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (deg[a] != deg[b]) return deg[a] > deg[b];
        return a < b;
    });
    return order;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Search {
    const CspInstance& inst;
    Propagator& prop;
    const std::vector<int>& order;
    const SolveLimits& limits;
    Clock::time_point t0;
    SolveResult& res;

    DomainState state;
    Trail trail;
    std::vector<std::vector<ValueSet>> saved_dom;  // per depth, capacity reused
    std::vector<int> values;
    std::vector<std::vector<int>> adj;
    bool aborted = false;
    int tick = 0;

    Search(const CspInstance& in, Propagator& p, const std::vector<int>& ord,
           const SolveLimits& lim, Clock::time_point start, SolveResult& r, DomainState root)
        : inst(in), prop(p), order(ord), limits(lim), t0(start), res(r), state(std::move(root)),
          saved_dom(in.num_vars), values(in.num_vars, -1), adj(in.var_constraints()) {}

    // Budgets are checked between nodes, so a search that completes right at
    // the limit still reports its true status.
    bool out_of_budget() {
        if (limits.backtrack_budget && res.backtracks > *limits.backtrack_budget) return true;
        if (!limits.time_budget_s) return false;
        if ((++tick & 63) != 0) return false;
        return seconds_since(t0) > *limits.time_budget_s;
    }

    bool mac_dfs(int depth) {
        if (depth == inst.num_vars) return true;
        int x = order[depth];
        for (int v = state.dom[x].first(); v >= 0; v = state.dom[x].next_ge(v + 1)) {
            if (out_of_budget()) {
                aborted = true;
                return false;
            }
            ++res.nodes;
            saved_dom[depth] = state.dom;
            std::size_t mark = trail.size();

            ValueSet single(inst.domain_size, false);
            single.insert(v);
            state.dom[x] = single;
            auto pr = prop.run(state, true, &trail, x);
            if (pr.consistent) {
                values[x] = v;
                if (mac_dfs(depth + 1)) return true;
                values[x] = -1;
            }
            state.dom = saved_dom[depth];
            while (trail.size() > mark) {
                state.last_support[trail.back().idx] = trail.back().old;
                trail.pop_back();
            }
            if (aborted) return false;
        }
        ++res.backtracks;
        return false;
    }

    bool bt_dfs(int depth) {
        if (depth == inst.num_vars) return true;
        int x = order[depth];
        for (int v = state.dom[x].first(); v >= 0; v = state.dom[x].next_ge(v + 1)) {
            if (out_of_budget()) {
                aborted = true;
                return false;
            }
            ++res.nodes;
            bool consistent = true;
            for (int ci : adj[x]) {
                const auto& c = inst.constraints[ci];
                int other = c.i == x ? c.j : c.i;
                if (values[other] < 0) continue;
                bool ok = c.i == x ? c.allowed.contains(v, values[other])
                                   : c.allowed.contains(values[other], v);
                if (!ok) {
                    consistent = false;
                    break;
                }
            }
            if (consistent) {
                values[x] = v;
                if (bt_dfs(depth + 1)) return true;
                values[x] = -1;
            }
            if (aborted) return false;
        }
        ++res.backtracks;
        return false;
    }
};

}  // namespace

PropagationResult ac2001_propagate(const CspInstance& inst, DomainState& dom) {
    Propagator prop(inst);
    return prop.run(dom, true, nullptr);
}

PropagationResult ac3_propagate(const CspInstance& inst, DomainState& dom) {
    Propagator prop(inst);
    return prop.run(dom, false, nullptr);
}

SolveResult solve(const CspInstance& inst, const SolveLimits& limits, const SolveOptions& opts) {
    auto t0 = Clock::now();
    SolveResult res;

    Propagator prop(inst);
    DomainState root = DomainState::full(inst);
    auto pr = prop.run(root, true, nullptr);
    if (!pr.consistent) {
        res.status = SolveStatus::Unsat;
        res.elapsed_s = seconds_since(t0);
        return res;
    }

    auto order = static_order(inst);
    Search search(inst, prop, order, limits, t0, res, std::move(root));
    bool found = opts.use_mac ? search.mac_dfs(0) : search.bt_dfs(0);

    if (found) {
        res.status = SolveStatus::Sat;
        res.assignment = search.values;
        if (!verify_assignment(inst, *res.assignment))
            throw std::logic_error("solve: produced assignment failed verification");
    } else if (!search.aborted) {
        res.status = SolveStatus::Unsat;
    } else {
        res.status = SolveStatus::Timeout;
    }
    res.elapsed_s = seconds_since(t0);
    if (res.status == SolveStatus::Timeout && limits.time_budget_s &&
        res.elapsed_s > *limits.time_budget_s)
        res.elapsed_s = *limits.time_budget_s;
    return res;
}

bool verify_assignment(const CspInstance& inst, const std::vector<int>& assignment) {
    if (static_cast<int>(assignment.size()) != inst.num_vars) return false;
    for (int v : assignment)
        if (v < 0 || v >= inst.domain_size) return false;
    for (const auto& c : inst.constraints)
        if (!c.allowed.contains(assignment[c.i], assignment[c.j])) return false;
    return true;
}

bool brute_force_satisfiable(const CspInstance& inst) {
    double total = 1.0;
    for (int i = 0; i < inst.num_vars; ++i) {
        total *= inst.domain_size;
        if (total > 1e7) throw std::invalid_argument("brute_force_satisfiable: d^n exceeds 10^7");
    }
    std::vector<int> a(inst.num_vars, 0);
    while (true) {
        if (verify_assignment(inst, a)) return true;
        int pos = inst.num_vars - 1;
        while (pos >= 0 && ++a[pos] == inst.domain_size) a[pos--] = 0;
        if (pos < 0) return false;
    }
}

}  // namespace csphard

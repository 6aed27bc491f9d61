// Compares the serial reference implementations against the OpenMP kernels:
// the sweep solve farm and Apriori candidate counting. Also checks that both
// paths produce identical results before timing them.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "csphard/pipeline.hpp"

using namespace csphard;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

SweepConfig bench_sweep(int n, int d) {
    SweepConfig s;
    s.n = n;
    s.d = d;
    std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
    s.e_axis = {n, std::min<std::int64_t>(3 * n, pairs), n};
    s.nf_axis = {0, 2, 1};
    s.t_axis = {0.4, 0.7, 0.1};
    s.seed_axis = {93728, 93728, 123};
    s.instances_per_point = 2;
    return s;
}

TransactionDb bench_db(int transactions) {
    // Synthetic attribute=value transactions, one item per attribute.
    constexpr int kAttrs = 5;
    constexpr int kValues = 8;
    TransactionDb db;
    for (int a = 0; a < kAttrs; ++a)
        for (int v = 0; v < kValues; ++v)
            db.items.push_back("a" + std::to_string(a) + "=v" + std::to_string(v));
    std::sort(db.items.begin(), db.items.end());
    Rng rng(424242);
    for (int t = 0; t < transactions; ++t) {
        std::vector<int> tr;
        for (int a = 0; a < kAttrs; ++a) {
            int v = static_cast<int>(rng.next_below(kValues));
            tr.push_back(db.id_of("a" + std::to_string(a) + "=v" + std::to_string(v)));
        }
        std::sort(tr.begin(), tr.end());
        db.transactions.push_back(std::move(tr));
    }
    return db;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    int n = 14, d = 8, workers = 0, repeats = 3, transactions = 4000;
    app.add_option("--n", n, "Variables per benchmark instance");
    app.add_option("--d", d, "Domain size");
    app.add_option("--workers", workers, "Thread count (0 = all cores)");
    app.add_option("--repeats", repeats, "Timing repetitions");
    app.add_option("--transactions", transactions, "Transaction count for the counting kernel");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (workers <= 0) workers = omp_get_max_threads();
#else
    workers = 1;
    std::printf("built without OpenMP; parallel paths run serially\n");
#endif

    HardnessThresholds th;
    th.mode = ThresholdMode::Backtracks;
    th.bt_easy_below = 10;
    th.bt_hard_above = 10000;
    SolveLimits limits;
    limits.backtrack_budget = 200000;

    // Sweep farm kernel.
    auto points = sweep_grid(bench_sweep(n, d));
    std::printf("sweep farm: %zu points (n=%d d=%d), %d workers\n", points.size(), n, d, workers);

    SweepRunOptions opts;
    opts.workers = workers;
    auto serial_records = solve_points_serial(points, limits, true, th);
    auto parallel = run_sweep(bench_sweep(n, d), limits, true, th, opts);
    if (sorted_by_sweep_key(serial_records) != sorted_by_sweep_key(parallel.records)) {
        std::printf("FAIL: serial and parallel sweep results differ\n");
        return 1;
    }

    double best_serial = 1e30, best_parallel = 1e30;
    for (int r = 0; r < repeats; ++r) {
        double t0 = now_s();
        auto rec = solve_points_serial(points, limits, true, th);
        best_serial = std::min(best_serial, now_s() - t0);
        t0 = now_s();
        auto par = run_sweep(bench_sweep(n, d), limits, true, th, opts);
        best_parallel = std::min(best_parallel, now_s() - t0);
        (void)rec;
        (void)par;
    }
    std::printf("  serial:   %8.3f s\n", best_serial);
    std::printf("  parallel: %8.3f s  (speedup %.2fx)\n\n", best_parallel,
                best_serial / best_parallel);

    // Candidate counting kernel.
    auto db = bench_db(transactions);
    std::vector<std::vector<int>> candidates;
    int u = static_cast<int>(db.items.size());
    for (int a = 0; a < u; ++a)
        for (int b = a + 1; b < u; ++b)
            for (int c = b + 1; c < u; ++c) candidates.push_back({a, b, c});
    std::printf("candidate counting: %zu transactions x %zu candidates\n", db.transactions.size(),
                candidates.size());

    if (count_candidates_serial(db, candidates) != count_candidates(db, candidates, workers)) {
        std::printf("FAIL: serial and parallel counts differ\n");
        return 1;
    }
    best_serial = best_parallel = 1e30;
    for (int r = 0; r < repeats; ++r) {
        double t0 = now_s();
        auto a = count_candidates_serial(db, candidates);
        best_serial = std::min(best_serial, now_s() - t0);
        t0 = now_s();
        auto b = count_candidates(db, candidates, workers);
        best_parallel = std::min(best_parallel, now_s() - t0);
        (void)a;
        (void)b;
    }
    std::printf("  serial:   %8.3f s\n", best_serial);
    std::printf("  parallel: %8.3f s  (speedup %.2fx)\n", best_parallel,
                best_serial / best_parallel);
    return 0;
}

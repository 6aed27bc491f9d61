// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "csphard/pipeline.hpp"
#include "oracles.hpp"

using namespace csphard;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s  criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    if (!is) return "<missing:" + p.string() + ">";
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

GenParams random_small_params(Rng& rng) {
    GenParams p;
    p.n = 3 + static_cast<int>(rng.next_below(4));  // 3..6
    p.d = 2 + static_cast<int>(rng.next_below(3));  // 2..4
    int pairs = p.n * (p.n - 1) / 2;
    p.e = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pairs)));
    p.nf = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p.e) + 1));
    p.t = rng.next_unit();
    p.bif_share = rng.next_unit();
    p.seed = rng.next();
    return p;
}

// ---------------------------------------------------------------- criteria

void criterion_1_solver_vs_oracle() {
    double t0 = now_s();
    Rng rng(10001);
    int agree = 0;
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        auto inst = generate(random_small_params(rng));
        auto res = solve(inst);
        bool oracle = brute_force_satisfiable(inst);
        if (res.status != SolveStatus::Timeout && (res.status == SolveStatus::Sat) == oracle)
            ++agree;
    }
    double elapsed = now_s() - t0;
    std::ostringstream d;
    d << agree << "/" << total << " agree in " << static_cast<int>(elapsed) << "s";
    report(1, "solver status matches brute force on 500 random instances",
           agree == total && elapsed < 60.0, d.str());
}

void criterion_2_ac_fixpoint() {
    Rng rng(10002);
    int agree = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        auto inst = generate(random_small_params(rng));
        auto a = DomainState::full(inst);
        auto b = DomainState::full(inst);
        auto ra = ac2001_propagate(inst, a);
        auto rb = ac3_propagate(inst, b);
        bool same = ra.consistent == rb.consistent;
        if (same && ra.consistent)
            for (int v = 0; v < inst.num_vars; ++v) same = same && a.dom[v] == b.dom[v];
        if (same) ++agree;
    }
    report(2, "AC-2001 and AC-3 fixpoints agree on 200 random instances", agree == total,
           std::to_string(agree) + "/" + std::to_string(total));
}

void criterion_3_apriori_oracle() {
    Rng rng(10003);
    int agree = 0, total = 0;
    for (int i = 0; i < 100; ++i) {
        auto db = oracles::random_db(rng, 15, 8);
        for (double ms :
             {1.0 / static_cast<double>(db.transactions.size()), 0.25, 0.5}) {
            ++total;
            std::map<std::vector<int>, std::int64_t> got;
            for (const auto& [k, sets] : frequent_itemsets(db, ms))
                for (const auto& f : sets) got[f.items] = f.count;
            if (got == oracles::enumerate_frequent(db, ms)) ++agree;
        }
    }
    report(3, "Apriori equals exhaustive enumeration on 100 random databases", agree == total,
           std::to_string(agree) + "/" + std::to_string(total));
}

void criterion_4_measures() {
    TransactionDb db;
    db.items = {"A", "B", "C"};
    db.transactions = {{0, 1}, {0, 1}, {0, 2}, {1}};
    auto m = rule_measures(db, {"A"}, {"B"});
    auto brute = oracles::brute_measures(db, {"A"}, {"B"});
    bool ok = m.support == 0.5 && m.confidence == 2.0 / 3.0 && m.lift == 8.0 / 9.0 &&
              m.conviction == 0.75 && m.support == brute.support &&
              m.confidence == brute.confidence && m.lift == brute.lift &&
              m.conviction == brute.conviction;
    report(4, "worked database yields exact support/confidence/lift/conviction", ok);
}

void criterion_5_lift_symmetry() {
    Rng rng(10005);
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
        auto db = oracles::random_db(rng);
        MiningThresholds th;
        th.min_support = 0.2;
        th.min_confidence = 0.0;
        th.min_lift = 0.0;
        auto rules = mine_rules(db, th);
        for (const auto& r : rules) {
            bool found = false;
            for (const auto& s : rules)
                if (s.antecedent == r.consequent && s.consequent == r.antecedent &&
                    s.measures.lift == r.measures.lift) {
                    found = true;
                    break;
                }
            if (!found) {
                ok = false;
                break;
            }
        }
    }
    report(5, "symmetric rules appear with bitwise-equal lift on 50 random databases", ok);
}

void criterion_6_deduction() {
    const std::string T = "Tightness=0.620", CH = "Classification=Hard", SN = "Satisfiability=No";
    TransactionDb db;
    db.items = {CH, SN, T};
    std::sort(db.items.begin(), db.items.end());
    auto tx = [&](std::vector<std::string> labels) {
        std::vector<int> tr;
        for (const auto& l : labels) tr.push_back(db.id_of(l));
        std::sort(tr.begin(), tr.end());
        return tr;
    };
    db.transactions = {tx({T, CH, SN}), tx({T, CH, SN}), tx({CH, SN}), tx({T})};

    auto mk = [&](std::vector<std::string> x, std::vector<std::string> y) {
        AssociationRule r;
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        r.antecedent = std::move(x);
        r.consequent = std::move(y);
        r.measures = rule_measures(db, r.antecedent, r.consequent);
        return r;
    };
    auto r1 = mk({CH}, {SN});
    auto r2 = mk({T}, {CH});

    auto closed = closure({r1, r2}, db, DeductionCaps{});
    using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;
    std::set<Key> got;
    for (const auto& r : closed) got.insert({r.antecedent, r.consequent});
    std::set<Key> want = {{{CH}, {SN}}, {{T}, {CH}}, {{T}, {SN}}, {{T}, {CH, SN}}};

    auto minimal = minimize(closed, db, DeductionCaps{});
    std::set<Key> min_got;
    for (const auto& r : minimal) min_got.insert({r.antecedent, r.consequent});
    std::set<Key> min_want = {{{CH}, {SN}}, {{T}, {CH}}};

    report(6, "closure({R1,R2}) adds exactly R3 and R4; minimize recovers {R1,R2}",
           got == want && min_got == min_want);
}

void criterion_7_class_boundaries() {
    HardnessThresholds th;  // Table defaults 5.00 / 60.00
    bool ok = classify(5.00, th) == HardClass::Medium && classify(60.00, th) == HardClass::Medium &&
              classify(4.999, th) == HardClass::Easy && classify(60.001, th) == HardClass::Hard;
    report(7, "classification boundaries are exact", ok);
}

// Desk-scale settings shared by criteria 8 and 9. The backtrack thresholds
// were picked once from the observed backtrack distribution of this exact
// grid and then frozen.
PipelineConfig desk_config(const std::string& dir) {
    PipelineConfig cfg;
    cfg.phase1.n = 15;
    cfg.phase1.d = 8;
    cfg.phase1.e_axis = {30, 84, 18};
    cfg.phase1.nf_axis = {0, 4, 1};
    cfg.phase1.t_axis = {0.30, 0.75, 0.05};
    cfg.phase1.seed_axis = {93728, 93728, 123};
    cfg.phase1.instances_per_point = 3;
    cfg.limits.backtrack_budget = 50000;
    cfg.thresholds.mode = ThresholdMode::Backtracks;
    // Zero backtracks means the root propagation all but solved the
    // instance; the search tail above two backtracks is this grid's "hard"
    // band (its maximum is a few dozen).
    cfg.thresholds.bt_easy_below = 1;
    cfg.thresholds.bt_hard_above = 2;
    cfg.bins = 20;
    cfg.mining.min_support = 0.1;
    cfg.mining.min_confidence = 0.0;
    cfg.mining.min_lift = 1.1;
    cfg.focal = "class=Hard";
    cfg.out_dir = dir;
    cfg.workers = 4;
    return cfg;
}

fs::path acceptance_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("csphard-acceptance-" + name);
    fs::remove_all(dir);
    return dir;
}

bool desk_ran = false;
fs::path desk_a;

void criterion_8_desk_cascade() {
    double t0 = now_s();
    desk_a = acceptance_dir("a");
    auto cfg = desk_config(desk_a.string());
    PipelineOutcome out;
    try {
        out = run_pipeline(cfg);
    } catch (const std::exception& e) {
        report(8, "desk-scale cascade", false, e.what());
        return;
    }
    double elapsed = now_s() - t0;
    desk_ran = out.complete;

    bool class_rule = false;
    try {
        for (const auto& r : read_rules_csv_file((desk_a / "rules_mined.csv").string())) {
            bool touches_class = false;
            for (const auto& item : r.antecedent)
                if (item.rfind("class=", 0) == 0) touches_class = true;
            for (const auto& item : r.consequent)
                if (item.rfind("class=", 0) == 0) touches_class = true;
            if (touches_class && r.measures.lift >= 1.1) class_rule = true;
        }
    } catch (const std::exception&) {
    }

    auto report_text = slurp(desk_a / "pattern_report.json");
    bool report_nonempty = report_text.find("class=Hard") != std::string::npos &&
                           report_text.find("\"item\"") != std::string::npos;

    std::ostringstream d;
    d << out.total_records << " instances, " << out.selected << " selected, " << out.mined_rules
      << " rules in " << static_cast<int>(elapsed) << "s";
    report(8,
           "desk-scale cascade finishes under 10 min with a class rule (lift >= 1.1) and a "
           "non-empty report",
           out.complete && elapsed < 600.0 && class_rule && report_nonempty, d.str());
}

void criterion_9_determinism() {
    if (!desk_ran) {
        report(9, "desk-scale determinism", false, "criterion 8 run unavailable");
        return;
    }
    const std::vector<std::string> names = {"instances.csv", "transactions.txt", "rules_mined.csv",
                                            "rules_deduced.csv", "pattern_report.json"};

    auto dir_b = acceptance_dir("b");
    auto cfg_b = desk_config(dir_b.string());
    auto dir_c = acceptance_dir("c");
    auto cfg_c = desk_config(dir_c.string());
    cfg_c.workers = 1;

    bool ok = true;
    std::string why;
    try {
        run_pipeline(cfg_b);
        run_pipeline(cfg_c);
        for (const auto& n : names) {
            if (slurp(desk_a / n) != slurp(dir_b / n)) {
                ok = false;
                why = n + " differs across repeated runs";
                break;
            }
            if (slurp(desk_a / n) != slurp(dir_c / n)) {
                ok = false;
                why = n + " differs across worker counts";
                break;
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        why = e.what();
    }
    report(9, "repeated runs and worker counts 1/4 give byte-identical artifacts", ok, why);
}

void criterion_10_generator_contract() {
    Rng rng(10010);
    int good = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        auto p = oracles::random_params(rng, 10, 8);
        auto inst = generate(p);
        bool ok = static_cast<int>(inst.constraints.size()) == p.e;
        std::set<std::pair<int, int>> scopes;
        auto general_want = std::llround(p.t * static_cast<double>(p.d) * p.d);
        int nf_seen = 0;
        for (const auto& c : inst.constraints) {
            ok = ok && scopes.insert({c.i, c.j}).second && c.i < c.j;
            if (c.kind == ConstraintKind::General) {
                ok = ok && c.allowed.count() == general_want;
            } else {
                ++nf_seen;
                ok = ok && c.allowed.count() == p.d && is_functional(c, FuncDirection::OnJ);
            }
        }
        ok = ok && nf_seen == p.nf;
        if (ok) ++good;
    }
    report(10, "generator contract holds for 1000 random parameter sets", good == total,
           std::to_string(good) + "/" + std::to_string(total));
}

}  // namespace

int main() {
    criterion_1_solver_vs_oracle();
    criterion_2_ac_fixpoint();
    criterion_3_apriori_oracle();
    criterion_4_measures();
    criterion_5_lift_symmetry();
    criterion_6_deduction();
    criterion_7_class_boundaries();
    criterion_8_desk_cascade();
    criterion_9_determinism();
    criterion_10_generator_contract();
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

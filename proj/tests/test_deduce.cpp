#include <doctest.h>

#include <algorithm>
#include <set>

#include "csphard/deduce.hpp"
#include "oracles.hpp"

using namespace csphard;

namespace {

// Worked deduction example. Items: T = Tightness=0.620, CH =
// Classification=Hard, SN = Satisfiability=No.
const std::string kT = "Tightness=0.620";
const std::string kCH = "Classification=Hard";
const std::string kSN = "Satisfiability=No";

TransactionDb worked_db() {
    TransactionDb db;
    db.items = {kCH, kSN, kT};
    std::sort(db.items.begin(), db.items.end());
    auto id = [&](const std::string& s) { return db.id_of(s); };
    auto tx = [&](std::vector<std::string> labels) {
        std::vector<int> tr;
        for (const auto& l : labels) tr.push_back(id(l));
        std::sort(tr.begin(), tr.end());
        return tr;
    };
    db.transactions = {tx({kT, kCH, kSN}), tx({kT, kCH, kSN}), tx({kCH, kSN}), tx({kT})};
    return db;
}

AssociationRule rule(std::vector<std::string> x, std::vector<std::string> y,
                     const TransactionDb& db) {
    AssociationRule r;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    r.antecedent = std::move(x);
    r.consequent = std::move(y);
    r.measures = rule_measures(db, r.antecedent, r.consequent);
    return r;
}

using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;
std::set<Key> keys(const std::vector<AssociationRule>& rules) {
    std::set<Key> out;
    for (const auto& r : rules) out.insert({r.antecedent, r.consequent});
    return out;
}

}  // namespace

TEST_CASE("transitivity derives R3 from R2 and R1") {
    auto db = worked_db();
    auto r1 = rule({kCH}, {kSN}, db);
    auto r2 = rule({kT}, {kCH}, db);

    auto r3 = transitivity(r2, r1, db);
    REQUIRE(r3.has_value());
    CHECK(r3->antecedent == std::vector<std::string>{kT});
    CHECK(r3->consequent == std::vector<std::string>{kSN});
    CHECK(r3->provenance == Provenance::Deduced);
    // Deduced measures are re-evaluated, not inherited.
    auto direct = rule_measures(db, {kT}, {kSN});
    CHECK(r3->measures.lift == direct.lift);
    CHECK(r3->measures.support == direct.support);

    CHECK_FALSE(transitivity(r1, r2, db).has_value());  // consequent != antecedent
    CHECK_FALSE(transitivity(r1, r1, db).has_value());  // would need X = Y
}

TEST_CASE("augmentation merges same-antecedent rules and respects caps") {
    auto db = worked_db();
    auto r2 = rule({kT}, {kCH}, db);
    auto r3 = rule({kT}, {kSN}, db);

    DeductionCaps caps;
    auto r4 = augmentation(r2, r3, db, caps);
    REQUIRE(r4.has_value());
    CHECK(r4->antecedent == std::vector<std::string>{kT});
    CHECK(r4->consequent == std::vector<std::string>{kCH, kSN});

    auto self = augmentation(r2, r2, db, caps);
    REQUIRE(self.has_value());
    CHECK(self->antecedent == r2.antecedent);
    CHECK(self->consequent == r2.consequent);

    DeductionCaps tight;
    tight.max_side_items = 1;
    CHECK_FALSE(augmentation(r2, r3, db, tight).has_value());
}

TEST_CASE("closure of the worked example adds exactly R3 and R4") {
    auto db = worked_db();
    auto r1 = rule({kCH}, {kSN}, db);
    auto r2 = rule({kT}, {kCH}, db);

    auto closed = closure({r1, r2}, db, DeductionCaps{});
    std::set<Key> want = {{{kCH}, {kSN}},
                          {{kT}, {kCH}},
                          {{kT}, {kSN}},
                          {{kT}, {kCH, kSN}}};
    CHECK(keys(closed) == want);

    int deduced = 0;
    for (const auto& r : closed)
        if (r.provenance == Provenance::Deduced) ++deduced;
    CHECK(deduced == 2);
}

TEST_CASE("closure is empty on empty input and idempotent") {
    auto db = worked_db();
    CHECK(closure({}, db, DeductionCaps{}).empty());

    auto r1 = rule({kCH}, {kSN}, db);
    auto r2 = rule({kT}, {kCH}, db);
    auto once = closure({r1, r2}, db, DeductionCaps{});
    auto twice = closure(once, db, DeductionCaps{});
    CHECK(keys(once) == keys(twice));
}

TEST_CASE("minimize recovers the generating rules") {
    auto db = worked_db();
    auto r1 = rule({kCH}, {kSN}, db);
    auto r2 = rule({kT}, {kCH}, db);
    auto closed = closure({r1, r2}, db, DeductionCaps{});

    auto minimal = minimize(closed, db, DeductionCaps{});
    std::set<Key> want = {{{kCH}, {kSN}}, {{kT}, {kCH}}};
    CHECK(keys(minimal) == want);

    // Re-closing the minimal set reproduces the closed set.
    auto reclosed = closure(minimal, db, DeductionCaps{});
    CHECK(keys(reclosed) == keys(closed));

    CHECK(keys(minimize({r1}, db, DeductionCaps{})) == std::set<Key>{{{kCH}, {kSN}}});
}

TEST_CASE("every deduced rule is derivable within the closed set") {
    // Soundness: each deduced rule must come from one transitivity,
    // augmentation or decomposition step over other members, which by
    // induction gives a finite derivation chain from the mined input.
    Rng rng(888);
    auto db = oracles::random_db(rng, 12, 6);
    MiningThresholds th;
    th.min_support = 0.3;
    th.min_lift = 0.0;
    auto mined = mine_rules(db, th);
    if (mined.size() > 10) mined.resize(10);
    DeductionCaps caps;
    auto closed = closure(mined, db, caps);

    for (const auto& r : closed) {
        if (r.provenance != Provenance::Deduced) continue;
        bool derivable = false;
        for (const auto& a : closed) {
            if (!derivable && caps.decomposition && a.antecedent == r.antecedent &&
                a.consequent != r.consequent &&
                std::includes(a.consequent.begin(), a.consequent.end(), r.consequent.begin(),
                              r.consequent.end()))
                derivable = true;
            for (const auto& b : closed) {
                if (derivable) break;
                if (auto t = transitivity(a, b, db);
                    t && t->antecedent == r.antecedent && t->consequent == r.consequent)
                    derivable = true;
                if (a.antecedent == b.antecedent) {
                    if (auto g = augmentation(a, b, db, caps);
                        g && g->antecedent == r.antecedent && g->consequent == r.consequent)
                        derivable = true;
                }
            }
            if (derivable) break;
        }
        CHECK(derivable);
    }
}

TEST_CASE("closure preserves disjoint sides and recomputes measures") {
    Rng rng(1212);
    for (int it = 0; it < 10; ++it) {
        auto db = oracles::random_db(rng, 12, 6);
        MiningThresholds th;
        th.min_support = 0.25;
        th.min_lift = 0.0;
        auto mined = mine_rules(db, th);
        if (mined.size() > 12) mined.resize(12);
        auto closed = closure(mined, db, DeductionCaps{});
        for (const auto& r : closed) {
            std::vector<std::string> common;
            std::set_intersection(r.antecedent.begin(), r.antecedent.end(), r.consequent.begin(),
                                  r.consequent.end(), std::back_inserter(common));
            CHECK(common.empty());
            if (r.provenance == Provenance::Deduced && support(db, r.antecedent) > 0.0) {
                auto direct = rule_measures(db, r.antecedent, r.consequent);
                CHECK(r.measures.lift == direct.lift);
                CHECK(r.measures.support == direct.support);
                CHECK(r.measures.confidence == direct.confidence);
            }
        }
    }
}

TEST_CASE("pattern report collects co-occurring items per attribute") {
    auto db = worked_db();
    auto r1 = rule({kCH}, {kSN}, db);
    auto r2 = rule({kT}, {kCH}, db);
    auto closed = closure({r1, r2}, db, DeductionCaps{});

    auto report = pattern_report(closed, kCH);
    CHECK(report.focal == kCH);
    REQUIRE(report.attributes.count("Tightness") == 1);
    REQUIRE(report.attributes.count("Satisfiability") == 1);
    CHECK(report.attributes.at("Tightness")[0].item == kT);

    CHECK_THROWS(pattern_report(closed, "Nope=Never"));

    // A single rule X => focal lists exactly X's items.
    auto single = pattern_report({r2}, kCH);
    REQUIRE(single.attributes.size() == 1);
    CHECK(single.attributes.begin()->second[0].item == kT);

    auto json_text = pattern_report_json(report);
    CHECK(json_text.find("\"focal\"") != std::string::npos);
    CHECK(json_text.find(kT) != std::string::npos);
}

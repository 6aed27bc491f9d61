#include "csphard/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "csphard/format.hpp"

namespace csphard {

std::int64_t min_count(double min_support, std::size_t db_size) {
    double target = min_support * static_cast<double>(db_size);
    auto c = static_cast<std::int64_t>(std::floor(target));
    if (static_cast<double>(c) < target) ++c;
    return std::max<std::int64_t>(c, 0);
}

namespace {

bool contains_all(const std::vector<int>& transaction, const std::vector<int>& itemset) {
    auto it = transaction.begin();
    for (int id : itemset) {
        it = std::lower_bound(it, transaction.end(), id);
        if (it == transaction.end() || *it != id) return false;
        ++it;
    }
    return true;
}

std::int64_t count_one(const TransactionDb& db, const std::vector<int>& itemset) {
    std::int64_t n = 0;
    for (const auto& tr : db.transactions)
        if (contains_all(tr, itemset)) ++n;
    return n;
}

RuleMeasures measures_from_counts(std::int64_t both, std::int64_t cx, std::int64_t cy,
                                  std::int64_t m) {
    RuleMeasures out;
    out.support = static_cast<double>(both) / static_cast<double>(m);
    out.confidence = static_cast<double>(both) / static_cast<double>(cx);
    // A consequent that never occurs leaves 0/0; report zero interest, not NaN.
    out.lift = cy == 0 ? 0.0
                       : static_cast<double>(both * m) / static_cast<double>(cx * cy);
    if (cx == both)
        out.conviction = std::numeric_limits<double>::infinity();
    else
        out.conviction =
            static_cast<double>(cx * (m - cy)) / static_cast<double>(m * (cx - both));
    return out;
}

std::vector<int> ids_of(const TransactionDb& db, const std::vector<std::string>& labels,
                        bool* all_known) {
    std::vector<int> ids;
    ids.reserve(labels.size());
    *all_known = true;
    for (const auto& l : labels) {
        int id = db.id_of(l);
        if (id < 0) *all_known = false;
        ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

std::vector<std::int64_t> count_candidates_serial(const TransactionDb& db,
                                                  const std::vector<std::vector<int>>& candidates) {
    std::vector<std::int64_t> counts(candidates.size(), 0);
    for (const auto& tr : db.transactions)
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (contains_all(tr, candidates[c])) ++counts[c];
    return counts;
}

std::vector<std::int64_t> count_candidates(const TransactionDb& db,
                                           const std::vector<std::vector<int>>& candidates,
                                           int workers) {
#ifdef _OPENMP
    if (workers > 1 && !candidates.empty()) {
        std::vector<std::int64_t> counts(candidates.size(), 0);
        auto n = static_cast<std::int64_t>(db.transactions.size());
#pragma omp parallel num_threads(workers)
        {
            std::vector<std::int64_t> local(candidates.size(), 0);
#pragma omp for schedule(static) nowait
            for (std::int64_t i = 0; i < n; ++i) {
                const auto& tr = db.transactions[static_cast<std::size_t>(i)];
                for (std::size_t c = 0; c < candidates.size(); ++c)
                    if (contains_all(tr, candidates[c])) ++local[c];
            }
#pragma omp critical
            for (std::size_t c = 0; c < candidates.size(); ++c) counts[c] += local[c];
        }
        return counts;
    }
#else
    (void)workers;
#endif
    return count_candidates_serial(db, candidates);
}

std::map<int, std::vector<FrequentSet>> frequent_itemsets(const TransactionDb& db,
                                                          double min_support, int workers) {
    if (db.transactions.empty())
        throw std::invalid_argument("frequent_itemsets: empty transaction database");
    if (!(min_support > 0.0) || min_support > 1.0)
        throw std::invalid_argument("frequent_itemsets: min_support must be in (0, 1]");
    std::int64_t need = min_count(min_support, db.transactions.size());

    std::map<int, std::vector<FrequentSet>> result;

    std::vector<std::vector<int>> candidates;
    for (int id = 0; id < static_cast<int>(db.items.size()); ++id) candidates.push_back({id});

    int k = 1;
    std::vector<std::vector<int>> level;  // L_{k}, kept sorted
    while (!candidates.empty()) {
        auto counts = count_candidates(db, candidates, workers);
        level.clear();
        std::vector<FrequentSet> kept;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (counts[c] >= need) {
                level.push_back(candidates[c]);
                kept.push_back({candidates[c], counts[c]});
            }
        }
        if (kept.empty()) break;
        result[k] = std::move(kept);

        // Join step: pairs of L_k sharing their first k-1 items; the level
        // is lexicographically sorted so matching pairs are adjacent runs.
        std::set<std::vector<int>> level_set(level.begin(), level.end());
        candidates.clear();
        ++k;
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                if (!std::equal(level[i].begin(), level[i].end() - 1, level[j].begin(),
                                level[j].end() - 1))
                    break;
                std::vector<int> cand = level[i];
                cand.push_back(level[j].back());
                // Prune: every (k-1)-subset must be frequent.
                bool ok = true;
                for (std::size_t drop = 0; ok && drop + 2 < cand.size(); ++drop) {
                    std::vector<int> sub = cand;
                    sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
                    ok = level_set.count(sub) > 0;
                }
                if (ok) candidates.push_back(std::move(cand));
            }
        }
    }
    return result;
}

double support(const TransactionDb& db, const std::vector<std::string>& itemset) {
    if (db.transactions.empty()) throw std::invalid_argument("support: empty database");
    if (itemset.empty()) return 1.0;
    bool known = false;
    auto ids = ids_of(db, itemset, &known);
    if (!known) return 0.0;
    return static_cast<double>(count_one(db, ids)) /
           static_cast<double>(db.transactions.size());
}

RuleMeasures rule_measures(const TransactionDb& db, const std::vector<std::string>& antecedent,
                           const std::vector<std::string>& consequent) {
    if (antecedent.empty() || consequent.empty())
        throw std::invalid_argument("rule_measures: sides must be non-empty");
    for (const auto& label : antecedent)
        if (std::find(consequent.begin(), consequent.end(), label) != consequent.end())
            throw std::invalid_argument("rule_measures: sides must be disjoint");
    bool kx = false, ky = false;
    auto x = ids_of(db, antecedent, &kx);
    auto y = ids_of(db, consequent, &ky);
    if (!kx || !ky) throw std::invalid_argument("rule_measures: unknown item label");

    auto m = static_cast<std::int64_t>(db.transactions.size());
    std::int64_t cx = count_one(db, x);
    if (cx == 0) throw std::invalid_argument("rule_measures: antecedent has zero support");
    std::int64_t cy = count_one(db, y);
    std::vector<int> both;
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
    return measures_from_counts(count_one(db, both), cx, cy, m);
}

namespace {

std::vector<std::string> labels_of(const TransactionDb& db, const std::vector<int>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(db.items[id]);
    return out;
}

}  // namespace

std::vector<AssociationRule> mine_rules(const TransactionDb& db, const MiningThresholds& th,
                                        int workers) {
    auto frequent = frequent_itemsets(db, th.min_support, workers);
    std::map<std::vector<int>, std::int64_t> counts;
    for (const auto& [k, sets] : frequent)
        for (const auto& fs : sets) counts[fs.items] = fs.count;

    auto m = static_cast<std::int64_t>(db.transactions.size());
    std::vector<AssociationRule> rules;
    for (const auto& [k, sets] : frequent) {
        if (k < 2) continue;
        for (const auto& fs : sets) {
            int sz = static_cast<int>(fs.items.size());
            for (unsigned mask = 1; mask + 1 < (1u << sz); ++mask) {
                std::vector<int> x, y;
                for (int b = 0; b < sz; ++b)
                    ((mask >> b) & 1 ? x : y).push_back(fs.items[b]);
                std::int64_t cx = counts.at(x);
                std::int64_t cy = counts.at(y);
                auto meas = measures_from_counts(fs.count, cx, cy, m);
                if (meas.confidence < th.min_confidence) continue;
                if (meas.lift < th.min_lift) continue;
                AssociationRule r;
                r.antecedent = labels_of(db, x);
                r.consequent = labels_of(db, y);
                r.measures = meas;
                r.provenance = Provenance::Mined;
                rules.push_back(std::move(r));
            }
        }
    }
    std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
        if (a.measures.lift != b.measures.lift) return a.measures.lift > b.measures.lift;
        if (a.measures.support != b.measures.support) return a.measures.support > b.measures.support;
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return a.consequent < b.consequent;
    });
    if (th.max_rules && rules.size() > *th.max_rules) rules.resize(*th.max_rules);
    return rules;
}

std::string rule_to_string(const AssociationRule& r) {
    return join(r.antecedent, " ") + " => " + join(r.consequent, " ");
}

static const char* const kRulesHeader = "antecedent,consequent,support,confidence,lift,conviction";

void write_rules_csv(const std::vector<AssociationRule>& rules, std::ostream& os,
                     bool with_provenance) {
    os << kRulesHeader;
    if (with_provenance) os << ",provenance";
    os << '\n';
    for (const auto& r : rules) {
        os << join(r.antecedent, " ") << ',' << join(r.consequent, " ") << ','
           << format_number(r.measures.support) << ',' << format_number(r.measures.confidence)
           << ',' << format_number(r.measures.lift) << ',' << format_number(r.measures.conviction);
        if (with_provenance)
            os << ',' << (r.provenance == Provenance::Mined ? "mined" : "deduced");
        os << '\n';
    }
}

std::vector<AssociationRule> read_rules_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("rules csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_provenance;
    if (line == kRulesHeader)
        with_provenance = false;
    else if (line == std::string(kRulesHeader) + ",provenance")
        with_provenance = true;
    else
        throw std::runtime_error("rules csv line 1: header mismatch");

    std::vector<AssociationRule> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        std::size_t want = with_provenance ? 7 : 6;
        if (fields.size() != want)
            throw std::runtime_error("rules csv line " + std::to_string(lineno) +
                                     ": wrong field count");
        AssociationRule r;
        r.antecedent = split(fields[0], ' ');
        r.consequent = split(fields[1], ' ');
        std::sort(r.antecedent.begin(), r.antecedent.end());
        std::sort(r.consequent.begin(), r.consequent.end());
        try {
            r.measures.support = parse_number(fields[2]);
            r.measures.confidence = parse_number(fields[3]);
            r.measures.lift = parse_number(fields[4]);
            r.measures.conviction = parse_number(fields[5]);
        } catch (const std::exception& e) {
            throw std::runtime_error("rules csv line " + std::to_string(lineno) + ": " + e.what());
        }
        if (with_provenance)
            r.provenance = fields[6] == "deduced" ? Provenance::Deduced : Provenance::Mined;
        out.push_back(std::move(r));
    }
    return out;
}

void write_rules_csv_file(const std::string& path, const std::vector<AssociationRule>& rules,
                          bool with_provenance) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_rules_csv(rules, os, with_provenance);
}

std::vector<AssociationRule> read_rules_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_rules_csv(is);
}

}  // namespace csphard

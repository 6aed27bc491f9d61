#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csphard/dataset.hpp"

namespace csphard {

struct MiningThresholds {
    double min_support = 0.1;
    double min_confidence = 0.0;
    double min_lift = 1.1;
    std::optional<std::size_t> max_rules;
};

// All four measures come from exact transaction counts; the only floating
// step is the final division, so e.g. lift(X=>Y) and lift(Y=>X) are
// bitwise-equal. conviction is +inf when confidence is 1.
struct RuleMeasures {
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0;
    double conviction = 0.0;
};

enum class Provenance { Mined, Deduced };

struct AssociationRule {
    std::vector<std::string> antecedent;  // sorted labels, disjoint from consequent
    std::vector<std::string> consequent;
    RuleMeasures measures;
    Provenance provenance = Provenance::Mined;
};

struct FrequentSet {
    std::vector<int> items;  // sorted ids into the db universe
    std::int64_t count = 0;
};

// Smallest count c with c >= min_support * db_size (the support threshold
// applied to counts).
std::int64_t min_count(double min_support, std::size_t db_size);

// Candidate support counting, the data-parallel inner loop of Apriori.
// The serial walk is the reference; the threaded version splits the
// transaction list and merges per-thread integer counts, so both return
// identical results.
std::vector<std::int64_t> count_candidates_serial(const TransactionDb& db,
                                                  const std::vector<std::vector<int>>& candidates);
std::vector<std::int64_t> count_candidates(const TransactionDb& db,
                                           const std::vector<std::vector<int>>& candidates,
                                           int workers);

// Level-wise Apriori: L1 = frequent items; C_k joins L_{k-1} pairs sharing
// k-2 items and prunes candidates with an infrequent (k-1)-subset; stops at
// the first empty level. Returns every frequent itemset with its exact
// count, keyed by level.
std::map<int, std::vector<FrequentSet>> frequent_itemsets(const TransactionDb& db,
                                                          double min_support, int workers = 1);

// Fraction of transactions containing the itemset; 1.0 for the empty set,
// 0.0 when any label is outside the universe.
double support(const TransactionDb& db, const std::vector<std::string>& itemset);

RuleMeasures rule_measures(const TransactionDb& db, const std::vector<std::string>& antecedent,
                           const std::vector<std::string>& consequent);

// Every split X => Z\X of every frequent itemset Z (|Z| >= 2) that meets all
// thresholds, sorted by lift desc, support desc, then label order.
std::vector<AssociationRule> mine_rules(const TransactionDb& db, const MiningThresholds& th,
                                        int workers = 1);

std::string rule_to_string(const AssociationRule& r);

// Rule CSV: antecedent,consequent,support,confidence,lift,conviction with
// itemsets space-joined and +inf printed as inf. with_provenance appends a
// provenance column (mined/deduced).
void write_rules_csv(const std::vector<AssociationRule>& rules, std::ostream& os,
                     bool with_provenance = false);
std::vector<AssociationRule> read_rules_csv(std::istream& is);
void write_rules_csv_file(const std::string& path, const std::vector<AssociationRule>& rules,
                          bool with_provenance = false);
std::vector<AssociationRule> read_rules_csv_file(const std::string& path);

}  // namespace csphard

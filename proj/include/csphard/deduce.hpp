#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csphard/miner.hpp"

namespace csphard {

struct DeductionCaps {
    int max_side_items = 4;    // largest antecedent/consequent a deduced rule may have
    int max_generations = 8;   // closure rounds before giving up
    bool decomposition = true; // X => Y,W also yields X => Y and X => W
};

// Transitivity: consequent(r1) = antecedent(r2) as sets gives
// antecedent(r1) => consequent(r2). The deduced form gets its measures
// re-evaluated on db (a derived rule may well have low support); nothing is
// returned when sides would overlap.
std::optional<AssociationRule> transitivity(const AssociationRule& r1, const AssociationRule& r2,
                                            const TransactionDb& db);

// Augmentation: X => Y with Z => W gives (X u Z) => (Y u W), simplified by
// keeping items that land on both sides in the antecedent only. Nothing is
// returned when the consequent empties or a side exceeds the cap.
std::optional<AssociationRule> augmentation(const AssociationRule& r1, const AssociationRule& r2,
                                            const TransactionDb& db, const DeductionCaps& caps);

// Bounded closure under transitivity, same-antecedent augmentation and
// (when enabled) consequent decomposition, deduplicated by rule form.
// Reflexivity adds nothing and is skipped. Returns mined u deduced; deduced
// rules carry recomputed measures and Provenance::Deduced.
std::vector<AssociationRule> closure(const std::vector<AssociationRule>& rules,
                                     const TransactionDb& db, const DeductionCaps& caps);

// Greedy non-redundant cover: repeatedly drops any rule derivable from the
// remaining set in one deduction step, largest rules first, until fixpoint.
// Re-closing the result reproduces the closed set.
std::vector<AssociationRule> minimize(const std::vector<AssociationRule>& rules,
                                      const TransactionDb& db, const DeductionCaps& caps);

struct PatternEntry {
    std::string item;
    double lift = 0.0;
    double support = 0.0;
    std::string rule;  // highest-lift rule connecting the item to the focal item
};

// Radial summary around a focal item (e.g. class=Hard): for every attribute,
// the items that co-occur with the focal item in some retained rule,
// strongest rule first.
struct PatternReport {
    std::string focal;
    std::map<std::string, std::vector<PatternEntry>> attributes;
};

PatternReport pattern_report(const std::vector<AssociationRule>& rules, const std::string& focal);

std::string pattern_report_json(const PatternReport& report);

}  // namespace csphard

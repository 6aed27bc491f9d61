#include "csphard/deduce.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace csphard {

namespace {

using Items = std::vector<std::string>;

Items set_union(const Items& a, const Items& b) {
    Items out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Items set_minus(const Items& a, const Items& b) {
    Items out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool disjoint(const Items& a, const Items& b) {
    Items common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return common.empty();
}

using RuleKey = std::pair<Items, Items>;

RuleKey key_of(const AssociationRule& r) { return {r.antecedent, r.consequent}; }

// Non-throwing measure evaluation for deduced rules; a form whose antecedent
// never occurs in db keeps zeroed measures rather than failing the closure.
RuleMeasures measures_or_zero(const TransactionDb& db, const Items& x, const Items& y) {
    try {
        return rule_measures(db, x, y);
    } catch (const std::invalid_argument&) {
        return {};
    }
}

AssociationRule make_deduced(const TransactionDb& db, Items x, Items y) {
    AssociationRule r;
    r.antecedent = std::move(x);
    r.consequent = std::move(y);
    r.measures = measures_or_zero(db, r.antecedent, r.consequent);
    r.provenance = Provenance::Deduced;
    return r;
}

}  // namespace

std::optional<AssociationRule> transitivity(const AssociationRule& r1, const AssociationRule& r2,
                                            const TransactionDb& db) {
    if (r1.consequent != r2.antecedent) return std::nullopt;
    if (!disjoint(r1.antecedent, r2.consequent)) return std::nullopt;
    return make_deduced(db, r1.antecedent, r2.consequent);
}

std::optional<AssociationRule> augmentation(const AssociationRule& r1, const AssociationRule& r2,
                                            const TransactionDb& db, const DeductionCaps& caps) {
    Items ante = set_union(r1.antecedent, r2.antecedent);
    Items cons = set_minus(set_union(r1.consequent, r2.consequent), ante);
    if (cons.empty()) return std::nullopt;
    if (static_cast<int>(ante.size()) > caps.max_side_items ||
        static_cast<int>(cons.size()) > caps.max_side_items)
        return std::nullopt;
    return make_deduced(db, std::move(ante), std::move(cons));
}

namespace {

void check_sides(const std::vector<AssociationRule>& rules) {
    for (const auto& r : rules) {
        if (r.antecedent.empty() || r.consequent.empty())
            throw std::invalid_argument("deduce: rule sides must be non-empty");
        if (!std::is_sorted(r.antecedent.begin(), r.antecedent.end()) ||
            !std::is_sorted(r.consequent.begin(), r.consequent.end()))
            throw std::invalid_argument("deduce: rule sides must be sorted");
        if (!disjoint(r.antecedent, r.consequent))
            throw std::invalid_argument("deduce: rule sides must be disjoint");
    }
}

void sort_canonical(std::vector<AssociationRule>& rules) {
    std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
        return key_of(a) < key_of(b);
    });
}

}  // namespace

std::vector<AssociationRule> closure(const std::vector<AssociationRule>& rules,
                                     const TransactionDb& db, const DeductionCaps& caps) {
    check_sides(rules);
    std::vector<AssociationRule> all;
    std::set<RuleKey> known;
    for (const auto& r : rules)
        if (known.insert(key_of(r)).second) all.push_back(r);

    // Semi-naive rounds: a pair of rules that both predate the previous
    // round has already been tried, so each round only pairs against its
    // newcomers. Augmentation is applied to same-antecedent pairs, the form
    // the worked derivations use; pairing arbitrary rules would flood the
    // closure with merged-antecedent variants.
    std::size_t new_begin = 0;
    for (int gen = 0; gen < caps.max_generations; ++gen) {
        std::vector<AssociationRule> fresh;
        std::set<RuleKey> seen;
        auto offer = [&](std::optional<AssociationRule> r) {
            if (!r) return;
            auto k = key_of(*r);
            if (known.count(k) || seen.count(k)) return;
            seen.insert(std::move(k));
            fresh.push_back(std::move(*r));
        };

        std::size_t n = all.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = std::max(new_begin, i + 1); j < n; ++j) {
                offer(transitivity(all[i], all[j], db));
                offer(transitivity(all[j], all[i], db));
                if (all[i].antecedent == all[j].antecedent)
                    offer(augmentation(all[i], all[j], db, caps));
            }
        }
        if (caps.decomposition) {
            for (std::size_t i = new_begin; i < n; ++i) {
                const auto& a = all[i];
                if (a.consequent.size() < 2) continue;
                int sz = static_cast<int>(a.consequent.size());
                for (unsigned mask = 1; mask + 1 < (1u << sz); ++mask) {
                    Items part;
                    for (int bit = 0; bit < sz; ++bit)
                        if ((mask >> bit) & 1) part.push_back(a.consequent[bit]);
                    offer(make_deduced(db, a.antecedent, std::move(part)));
                }
            }
        }

        if (fresh.empty()) break;
        new_begin = n;
        for (auto& r : fresh) {
            known.insert(key_of(r));
            all.push_back(std::move(r));
        }
    }
    sort_canonical(all);
    return all;
}

std::vector<AssociationRule> minimize(const std::vector<AssociationRule>& rules,
                                      const TransactionDb& db, const DeductionCaps& caps) {
    check_sides(rules);
    std::vector<AssociationRule> kept = rules;
    sort_canonical(kept);

    // One-step derivability of `target` from the other kept rules.
    auto derivable = [&](const AssociationRule& target) {
        auto tk = key_of(target);
        for (const auto& a : kept) {
            if (key_of(a) == tk) continue;
            if (caps.decomposition && a.antecedent == target.antecedent &&
                target.consequent != a.consequent &&
                std::includes(a.consequent.begin(), a.consequent.end(),
                              target.consequent.begin(), target.consequent.end()))
                return true;
            for (const auto& b : kept) {
                if (key_of(b) == tk) continue;
                if (auto t = transitivity(a, b, db); t && key_of(*t) == tk) return true;
                if (a.antecedent == b.antecedent) {
                    if (auto g = augmentation(a, b, db, caps); g && key_of(*g) == tk) return true;
                }
            }
        }
        return false;
    };

    bool removed = true;
    while (removed) {
        removed = false;
        // Largest rules go first so compound forms fall before their parts.
        std::vector<std::size_t> order(kept.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            auto sa = kept[a].antecedent.size() + kept[a].consequent.size();
            auto sb = kept[b].antecedent.size() + kept[b].consequent.size();
            if (sa != sb) return sa > sb;
            return key_of(kept[a]) < key_of(kept[b]);
        });
        for (std::size_t idx : order) {
            if (derivable(kept[idx])) {
                kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(idx));
                removed = true;
                break;
            }
        }
    }
    sort_canonical(kept);
    return kept;
}

PatternReport pattern_report(const std::vector<AssociationRule>& rules, const std::string& focal) {
    PatternReport report;
    report.focal = focal;

    struct Best {
        double lift = -1.0;
        double support = 0.0;
        std::string rule;
    };
    std::map<std::string, Best> best;
    bool found = false;

    for (const auto& r : rules) {
        Items all = set_union(r.antecedent, r.consequent);
        if (!std::binary_search(all.begin(), all.end(), focal)) continue;
        found = true;
        for (const auto& item : all) {
            if (item == focal) continue;
            auto& b = best[item];
            if (r.measures.lift > b.lift) {
                b.lift = r.measures.lift;
                b.support = r.measures.support;
                b.rule = rule_to_string(r);
            }
        }
    }
    if (!found) throw std::invalid_argument("pattern_report: no rule mentions '" + focal + "'");

    for (const auto& [item, b] : best) {
        auto eq = item.find('=');
        std::string attr = eq == std::string::npos ? item : item.substr(0, eq);
        report.attributes[attr].push_back({item, b.lift, b.support, b.rule});
    }
    for (auto& [attr, entries] : report.attributes)
        std::sort(entries.begin(), entries.end(), [](const PatternEntry& a, const PatternEntry& b) {
            if (a.lift != b.lift) return a.lift > b.lift;
            return a.item < b.item;
        });
    return report;
}

std::string pattern_report_json(const PatternReport& report) {
    nlohmann::json j;
    j["focal"] = report.focal;
    j["attributes"] = nlohmann::json::object();
    for (const auto& [attr, entries] : report.attributes) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : entries)
            arr.push_back({{"item", e.item},
                           {"lift", e.lift},
                           {"support", e.support},
                           {"rule", e.rule}});
        j["attributes"][attr] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

}  // namespace csphard

// Test-only oracles, deliberately written as direct enumerations so they
// share no code path with the implementations they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csphard/dataset.hpp"
#include "csphard/generator.hpp"
#include "csphard/miner.hpp"

namespace oracles {

// Every nonempty itemset over the db universe whose transaction count meets
// ceil(min_support * |db|), found by checking all 2^u subsets.
inline std::map<std::vector<int>, std::int64_t> enumerate_frequent(
    const csphard::TransactionDb& db, double min_support) {
    auto u = static_cast<int>(db.items.size());
    auto m = static_cast<double>(db.transactions.size());
    auto need = static_cast<std::int64_t>(std::ceil(min_support * m));
    if (need < 1) need = 1;

    std::vector<std::set<int>> tr_sets;
    for (const auto& tr : db.transactions) tr_sets.emplace_back(tr.begin(), tr.end());

    std::map<std::vector<int>, std::int64_t> out;
    for (unsigned mask = 1; mask < (1u << u); ++mask) {
        std::vector<int> items;
        for (int b = 0; b < u; ++b)
            if ((mask >> b) & 1) items.push_back(b);
        std::int64_t count = 0;
        for (const auto& tr : tr_sets) {
            bool all = true;
            for (int id : items)
                if (!tr.count(id)) {
                    all = false;
                    break;
                }
            if (all) ++count;
        }
        if (count >= need) out[items] = count;
    }
    return out;
}

struct BruteMeasures {
    double support, confidence, lift, conviction;
};

// Probability-based measure computation straight from the definitions.
inline BruteMeasures brute_measures(const csphard::TransactionDb& db,
                                    const std::vector<std::string>& x,
                                    const std::vector<std::string>& y) {
    auto m = static_cast<double>(db.transactions.size());
    auto count_labels = [&](const std::vector<std::string>& labels) {
        std::int64_t c = 0;
        for (const auto& tr : db.transactions) {
            std::set<std::string> have;
            for (int id : tr) have.insert(db.items[id]);
            bool all = true;
            for (const auto& l : labels)
                if (!have.count(l)) {
                    all = false;
                    break;
                }
            if (all) ++c;
        }
        return c;
    };
    std::vector<std::string> both = x;
    both.insert(both.end(), y.begin(), y.end());

    double px = count_labels(x) / m;
    double py = count_labels(y) / m;
    double pxy = count_labels(both) / m;
    BruteMeasures r{};
    r.support = pxy;
    r.confidence = pxy / px;
    r.lift = pxy / (px * py);
    double px_not_y = px - pxy;
    r.conviction = px_not_y == 0.0 ? std::numeric_limits<double>::infinity()
                                   : px * (1.0 - py) / px_not_y;
    return r;
}

// Deterministic random transaction database: up to max_items single-letter
// items, every transaction non-empty.
inline csphard::TransactionDb random_db(csphard::Rng& rng, int max_transactions = 15,
                                        int max_items = 8) {
    csphard::TransactionDb db;
    int u = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_items - 1)));
    for (int i = 0; i < u; ++i) db.items.push_back(std::string(1, static_cast<char>('A' + i)));
    int m = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_transactions - 1)));
    for (int t = 0; t < m; ++t) {
        std::vector<int> tr;
        while (tr.empty())
            for (int i = 0; i < u; ++i)
                if (rng.next_below(2) == 1) tr.push_back(i);
        db.transactions.push_back(std::move(tr));
    }
    return db;
}

// Deterministic random generation parameters within the small-oracle scale.
inline csphard::GenParams random_params(csphard::Rng& rng, int max_n = 6, int max_d = 4) {
    csphard::GenParams p;
    p.n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_n - 1)));
    p.d = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_d - 1)));
    int pairs = p.n * (p.n - 1) / 2;
    p.e = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pairs)));
    p.nf = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p.e) + 1));
    p.t = rng.next_unit();
    p.bif_share = rng.next_below(2) == 0 ? 0.0 : rng.next_unit();
    p.seed = rng.next();
    return p;
}

}  // namespace oracles

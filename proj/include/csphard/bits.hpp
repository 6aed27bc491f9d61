#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace csphard {

// Fixed-universe set over values 0..universe-1, packed 64 per word.
// Used for constraint relation rows and for variable domains during search.
class ValueSet {
public:
    ValueSet() = default;

    ValueSet(int universe, bool full) : universe_(universe), words_((universe + 63) / 64, 0) {
        if (full && universe > 0) {
            for (auto& w : words_) w = ~std::uint64_t{0};
            int tail = universe % 64;
            if (tail != 0) words_.back() = (std::uint64_t{1} << tail) - 1;
            count_ = universe;
        }
    }

    int universe() const { return universe_; }
    int count() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool test(int v) const { return (words_[v >> 6] >> (v & 63)) & 1; }

    void insert(int v) {
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (!(words_[v >> 6] & bit)) {
            words_[v >> 6] |= bit;
            ++count_;
        }
    }

    void remove(int v) {
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (words_[v >> 6] & bit) {
            words_[v >> 6] &= ~bit;
            --count_;
        }
    }

    // Smallest member >= from, or -1 if none.
    int next_ge(int from) const {
        if (from >= universe_) return -1;
        int wi = from >> 6;
        std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (w != 0) return wi * 64 + std::countr_zero(w);
            if (++wi >= static_cast<int>(words_.size())) return -1;
            w = words_[wi];
        }
    }

    int first() const { return next_ge(0); }

    std::span<const std::uint64_t> words() const { return words_; }

    bool operator==(const ValueSet&) const = default;

private:
    int universe_ = 0;
    int count_ = 0;
    std::vector<std::uint64_t> words_;
};

// Smallest value >= from present in both `row` (a word-packed bit row) and `dom`.
// Returns -1 if the intersection above `from` is empty.
inline int next_common_ge(std::span<const std::uint64_t> row, const ValueSet& dom, int from) {
    if (from < 0) from = 0;
    if (from >= dom.universe()) return -1;
    auto dw = dom.words();
    int wi = from >> 6;
    std::uint64_t w = (row[wi] & dw[wi]) & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (w != 0) return wi * 64 + std::countr_zero(w);
        if (++wi >= static_cast<int>(dw.size())) return -1;
        w = row[wi] & dw[wi];
    }
}

}  // namespace csphard

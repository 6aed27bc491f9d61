#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csphard/bits.hpp"
#include "csphard/params.hpp"

namespace csphard {

// Extensional binary relation over 0..d-1 x 0..d-1, stored as bit rows in
// both orientations so support queries are O(words) from either side.
class Relation {
public:
    Relation() = default;
    explicit Relation(int d)
        : d_(d), wpr_((d + 63) / 64), fwd_(static_cast<std::size_t>(d) * wpr_, 0),
          rev_(static_cast<std::size_t>(d) * wpr_, 0) {}

    int domain_size() const { return d_; }
    int count() const { return count_; }

    void add(int a, int b) {
        std::uint64_t bit_b = std::uint64_t{1} << (b & 63);
        std::uint64_t* w = &fwd_[static_cast<std::size_t>(a) * wpr_ + (b >> 6)];
        if (*w & bit_b) return;
        *w |= bit_b;
        rev_[static_cast<std::size_t>(b) * wpr_ + (a >> 6)] |= std::uint64_t{1} << (a & 63);
        ++count_;
    }

    bool contains(int a, int b) const {
        return (fwd_[static_cast<std::size_t>(a) * wpr_ + (b >> 6)] >> (b & 63)) & 1;
    }

    // Allowed values of the second variable for first = a.
    std::span<const std::uint64_t> row(int a) const {
        return {fwd_.data() + static_cast<std::size_t>(a) * wpr_, static_cast<std::size_t>(wpr_)};
    }
    // Allowed values of the first variable for second = b.
    std::span<const std::uint64_t> col(int b) const {
        return {rev_.data() + static_cast<std::size_t>(b) * wpr_, static_cast<std::size_t>(wpr_)};
    }

    int row_count(int a) const;

    // All allowed pairs in (a, b) lexicographic order.
    std::vector<std::pair<int, int>> pairs() const;

    bool operator==(const Relation&) const = default;

private:
    int d_ = 0;
    int wpr_ = 0;
    int count_ = 0;
    std::vector<std::uint64_t> fwd_;
    std::vector<std::uint64_t> rev_;
};

enum class ConstraintKind { General, Functional, BiFunctional };

char kind_letter(ConstraintKind k);
ConstraintKind kind_from_letter(char c);

// Binary constraint with canonical scope i < j. `kind` records how the
// constraint was generated; structural predicates below are authoritative
// for statistics.
struct Constraint {
    int i = 0;
    int j = 0;
    ConstraintKind kind = ConstraintKind::General;
    Relation allowed;

    bool operator==(const Constraint&) const = default;
};

struct CspInstance {
    int num_vars = 0;
    int domain_size = 0;
    std::vector<Constraint> constraints;
    std::optional<GenParams> meta;

    // Constraint indices incident to each variable (both endpoints).
    std::vector<std::vector<int>> var_constraints() const;
    std::vector<int> degrees() const;
};

// Throws std::invalid_argument naming the violated invariant.
void validate(const CspInstance& inst);

// Fraction of allowed tuples over d^2. Note the convention: larger means
// looser, the opposite of forbidden-fraction generators.
double tightness(const Constraint& c, int d);

enum class FuncDirection { OnJ, OnI };

// OnJ: no first component appears with two different second components,
// i.e. every value of i admits at most one supporting value of j. The empty
// relation is vacuously functional in both directions.
bool is_functional(const Constraint& c, FuncDirection dir);

struct ConstraintStats {
    double tightness = 0.0;
    bool functional_on_j = false;
    bool functional_on_i = false;
    bool bifunctional = false;
};

ConstraintStats constraint_stats(const Constraint& c, int d);

// Instance text format, the interchange unit between the generate and solve
// CLI steps:
//   csp <n> <d> <e>
//   c <i> <j> <G|F|B> <k>
//   <a> <b>          (k lines)
void write_instance(std::ostream& os, const CspInstance& inst);
CspInstance read_instance(std::istream& is);
void write_instance_file(const std::string& path, const CspInstance& inst);
CspInstance read_instance_file(const std::string& path);
std::string instance_to_string(const CspInstance& inst);

}  // namespace csphard

#pragma once

#include <cstdint>
#include <vector>

#include "csphard/model.hpp"
#include "csphard/params.hpp"

namespace csphard {

// 64-bit LCG (Knuth's MMIX multiplier/increment). Fixed here, independent of
// the platform's std engines, so identical seeds give identical instances
// everywhere; the golden tests depend on the exact stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_;
    }

    // Uniform draw in [0, n) by rejection on the top bits (no modulo bias).
    // n <= 1 returns 0 without consuming a draw.
    std::uint64_t next_below(std::uint64_t n);

    // Uniform in [0, 1) from the top 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// Builds a random instance from p. All randomness comes from one Rng seeded
// with p.seed, consumed in a fixed order: pair selection first, then each
// sampled pair's constraint in sampled order (functional pairs first).
// Output constraints are sorted by canonical scope.
CspInstance generate(const GenParams& p);

struct IntAxis {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t step = 1;
};

struct FloatAxis {
    double start = 0.0;
    double end = 0.0;
    double step = 1.0;
};

struct SeedAxis {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t step = 1;
};

// Two-step-scan sweep description: fixed n and d, swept e/nf/t axes, a seed
// axis whose slot count multiplies instances_per_point, and the seed step
// used to derive one fresh seed per emitted instance.
struct SweepConfig {
    int n = 0;
    int d = 0;
    IntAxis e_axis;
    IntAxis nf_axis;
    FloatAxis t_axis;
    SeedAxis seed_axis;
    int instances_per_point = 1;
    double bif_share = 0.0;
};

std::vector<std::int64_t> axis_values(const IntAxis& a);
// start + k*step, end-inclusive within 1e-9, each value quantized to the
// canonical 6-significant-digit print format so CSV round-trips exactly.
std::vector<double> axis_values(const FloatAxis& a);
std::size_t seed_slots(const SeedAxis& a);

// Cartesian product iterated e-outermost, then nf, t, seed slot, instance
// index. Every emitted point gets seed = seed_axis.start + seed_axis.step *
// (global running index), so no two instances share a seed.
std::vector<GenParams> sweep_grid(const SweepConfig& cfg);

}  // namespace csphard

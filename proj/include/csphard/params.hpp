#pragma once

#include <cstdint>

namespace csphard {

// Generation parameters for one random instance: n variables with uniform
// domain 0..d-1, e binary constraints of which the first nf are functional,
// general constraints keep a fraction t of the d*d value pairs. bif_share is
// the probability that a functional constraint is built bi-functional.
struct GenParams {
    int n = 0;
    int d = 0;
    int e = 0;
    int nf = 0;
    double t = 0.0;
    double bif_share = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const GenParams&) const = default;
};

}  // namespace csphard

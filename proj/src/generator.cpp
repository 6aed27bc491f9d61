#include "csphard/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "csphard/format.hpp"

namespace csphard {

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    int bits = 64 - std::countl_zero(n - 1);
    for (;;) {
        std::uint64_t v = next() >> (64 - bits);
        if (v < n) return v;
    }
}

namespace {

void check_params(const GenParams& p) {
    if (p.n < 1 || p.d < 1) throw std::invalid_argument("generate: n and d must be >= 1");
    std::int64_t pair_count = static_cast<std::int64_t>(p.n) * (p.n - 1) / 2;
    if (p.e < 1 || p.e > pair_count)
        throw std::invalid_argument("generate: e must be in [1, n(n-1)/2]");
    if (p.nf < 0 || p.nf > p.e) throw std::invalid_argument("generate: nf must be in [0, e]");
    if (p.t < 0.0 || p.t > 1.0) throw std::invalid_argument("generate: t must be in [0, 1]");
    if (p.bif_share < 0.0 || p.bif_share > 1.0)
        throw std::invalid_argument("generate: bif_share must be in [0, 1]");
}

// Functional constraint: one allowed partner per value of i, so exactly d
// tuples. A bif_share coin upgrades it to a random permutation (bijective,
// hence functional in both directions).
Constraint make_functional(int i, int j, int d, double bif_share, Rng& rng) {
    Constraint c;
    c.i = i;
    c.j = j;
    c.allowed = Relation(d);
    double coin = rng.next_unit();
    if (coin < bif_share) {
        c.kind = ConstraintKind::BiFunctional;
        std::vector<int> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        for (int k = d - 1; k >= 1; --k) {
            int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k) + 1));
            std::swap(perm[k], perm[r]);
        }
        for (int a = 0; a < d; ++a) c.allowed.add(a, perm[a]);
    } else {
        c.kind = ConstraintKind::Functional;
        for (int a = 0; a < d; ++a)
            c.allowed.add(a, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d))));
    }
    return c;
}

// General constraint: round(t*d^2) tuples sampled without replacement
// (partial Fisher-Yates over tuple indices). round = nearest, ties away
// from zero.
Constraint make_general(int i, int j, int d, double t, Rng& rng) {
    Constraint c;
    c.i = i;
    c.j = j;
    c.kind = ConstraintKind::General;
    c.allowed = Relation(d);
    std::int64_t total = static_cast<std::int64_t>(d) * d;
    std::int64_t want = std::llround(t * static_cast<double>(total));
    std::vector<std::int32_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::int64_t k = 0; k < want; ++k) {
        std::int64_t r = k + static_cast<std::int64_t>(
                                 rng.next_below(static_cast<std::uint64_t>(total - k)));
        std::swap(idx[k], idx[r]);
        c.allowed.add(idx[k] / d, idx[k] % d);
    }
    return c;
}

}  // namespace

CspInstance generate(const GenParams& p) {
    check_params(p);
    Rng rng(p.seed);

    // Canonical pair enumeration (0,1),(0,2),...,(n-2,n-1); partial
    // Fisher-Yates picks e distinct scopes.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(p.n) * (p.n - 1) / 2);
    for (int i = 0; i < p.n; ++i)
        for (int j = i + 1; j < p.n; ++j) pairs.emplace_back(i, j);

    std::size_t m = pairs.size();
    for (int k = 0; k < p.e; ++k) {
        std::size_t r = k + rng.next_below(m - k);
        std::swap(pairs[k], pairs[r]);
    }

    CspInstance inst;
    inst.num_vars = p.n;
    inst.domain_size = p.d;
    inst.meta = p;
    inst.constraints.reserve(p.e);
    for (int k = 0; k < p.e; ++k) {
        auto [i, j] = pairs[k];
        if (k < p.nf)
            inst.constraints.push_back(make_functional(i, j, p.d, p.bif_share, rng));
        else
            inst.constraints.push_back(make_general(i, j, p.d, p.t, rng));
    }
    std::sort(inst.constraints.begin(), inst.constraints.end(),
              [](const Constraint& a, const Constraint& b) {
                  return std::pair{a.i, a.j} < std::pair{b.i, b.j};
              });
    return inst;
}

std::vector<std::int64_t> axis_values(const IntAxis& a) {
    std::vector<std::int64_t> out;
    if (a.step <= 0) throw std::invalid_argument("axis step must be > 0");
    for (std::int64_t v = a.start; v <= a.end; v += a.step) out.push_back(v);
    return out;
}

std::vector<double> axis_values(const FloatAxis& a) {
    std::vector<double> out;
    if (a.step <= 0.0) throw std::invalid_argument("axis step must be > 0");
    for (std::int64_t k = 0;; ++k) {
        double v = a.start + static_cast<double>(k) * a.step;
        if (v > a.end + 1e-9) break;
        out.push_back(parse_number(format_number(v)));
    }
    return out;
}

std::size_t seed_slots(const SeedAxis& a) {
    if (a.step == 0) throw std::invalid_argument("seed axis step must be > 0");
    if (a.end < a.start) return 0;
    return static_cast<std::size_t>((a.end - a.start) / a.step) + 1;
}

std::vector<GenParams> sweep_grid(const SweepConfig& cfg) {
    std::vector<GenParams> out;
    if (cfg.instances_per_point <= 0) return out;
    if (cfg.e_axis.start > cfg.e_axis.end || cfg.nf_axis.start > cfg.nf_axis.end ||
        cfg.t_axis.start > cfg.t_axis.end + 1e-9)
        return out;
    auto es = axis_values(cfg.e_axis);
    auto nfs = axis_values(cfg.nf_axis);
    auto ts = axis_values(cfg.t_axis);
    std::size_t slots = seed_slots(cfg.seed_axis);
    if (slots == 0) return out;

    std::uint64_t running = 0;
    for (auto e : es)
        for (auto nf : nfs)
            for (auto t : ts)
                for (std::size_t s = 0; s < slots; ++s)
                    for (int k = 0; k < cfg.instances_per_point; ++k) {
                        GenParams p;
                        p.n = cfg.n;
                        p.d = cfg.d;
                        p.e = static_cast<int>(e);
                        p.nf = static_cast<int>(nf);
                        p.t = t;
                        p.bif_share = cfg.bif_share;
                        p.seed = cfg.seed_axis.start + cfg.seed_axis.step * running;
                        ++running;
                        out.push_back(p);
                    }
    return out;
}

}  // namespace csphard

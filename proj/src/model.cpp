#include "csphard/model.hpp"

#include <bit>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace csphard {

int Relation::row_count(int a) const {
    int n = 0;
    for (auto w : row(a)) n += std::popcount(w);
    return n;
}

std::vector<std::pair<int, int>> Relation::pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(count_);
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
            if (contains(a, b)) out.emplace_back(a, b);
    return out;
}

char kind_letter(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::General: return 'G';
        case ConstraintKind::Functional: return 'F';
        case ConstraintKind::BiFunctional: return 'B';
    }
    return '?';
}

ConstraintKind kind_from_letter(char c) {
    switch (c) {
        case 'G': return ConstraintKind::General;
        case 'F': return ConstraintKind::Functional;
        case 'B': return ConstraintKind::BiFunctional;
    }
    throw std::invalid_argument(std::string("unknown constraint kind '") + c + "'");
}

std::vector<std::vector<int>> CspInstance::var_constraints() const {
    std::vector<std::vector<int>> adj(num_vars);
    for (int c = 0; c < static_cast<int>(constraints.size()); ++c) {
        adj[constraints[c].i].push_back(c);
        adj[constraints[c].j].push_back(c);
    }
    return adj;
}

std::vector<int> CspInstance::degrees() const {
    std::vector<int> deg(num_vars, 0);
    for (const auto& c : constraints) {
        ++deg[c.i];
        ++deg[c.j];
    }
    return deg;
}

void validate(const CspInstance& inst) {
    if (inst.num_vars < 1) throw std::invalid_argument("instance: n must be >= 1");
    if (inst.domain_size < 1) throw std::invalid_argument("instance: d must be >= 1");
    std::int64_t max_pairs = static_cast<std::int64_t>(inst.num_vars) * (inst.num_vars - 1) / 2;
    if (static_cast<std::int64_t>(inst.constraints.size()) > max_pairs)
        throw std::invalid_argument("instance: more constraints than variable pairs");
    std::set<std::pair<int, int>> scopes;
    for (const auto& c : inst.constraints) {
        if (c.i >= c.j) throw std::invalid_argument("constraint: scope must have i < j");
        if (c.i < 0 || c.j >= inst.num_vars)
            throw std::invalid_argument("constraint: variable index out of range");
        if (c.allowed.domain_size() != inst.domain_size)
            throw std::invalid_argument("constraint: relation domain size mismatch");
        if (!scopes.insert({c.i, c.j}).second)
            throw std::invalid_argument("instance: duplicate constraint scope");
        if (c.kind == ConstraintKind::Functional &&
            !(is_functional(c, FuncDirection::OnJ) || is_functional(c, FuncDirection::OnI)))
            throw std::invalid_argument("constraint: declared F but functional in neither direction");
        if (c.kind == ConstraintKind::BiFunctional &&
            !(is_functional(c, FuncDirection::OnJ) && is_functional(c, FuncDirection::OnI)))
            throw std::invalid_argument("constraint: declared B but not bi-functional");
    }
}

double tightness(const Constraint& c, int d) {
    return static_cast<double>(c.allowed.count()) / (static_cast<double>(d) * d);
}

bool is_functional(const Constraint& c, FuncDirection dir) {
    int d = c.allowed.domain_size();
    for (int v = 0; v < d; ++v) {
        int n = 0;
        auto words = dir == FuncDirection::OnJ ? c.allowed.row(v) : c.allowed.col(v);
        for (auto w : words) n += std::popcount(w);
        if (n > 1) return false;
    }
    return true;
}

ConstraintStats constraint_stats(const Constraint& c, int d) {
    ConstraintStats s;
    s.tightness = tightness(c, d);
    s.functional_on_j = is_functional(c, FuncDirection::OnJ);
    s.functional_on_i = is_functional(c, FuncDirection::OnI);
    s.bifunctional = s.functional_on_j && s.functional_on_i;
    return s;
}

void write_instance(std::ostream& os, const CspInstance& inst) {
    os << "csp " << inst.num_vars << ' ' << inst.domain_size << ' ' << inst.constraints.size()
       << '\n';
    for (const auto& c : inst.constraints) {
        os << "c " << c.i << ' ' << c.j << ' ' << kind_letter(c.kind) << ' ' << c.allowed.count()
           << '\n';
        for (auto [a, b] : c.allowed.pairs()) os << a << ' ' << b << '\n';
    }
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("instance parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

CspInstance read_instance(std::istream& is) {
    CspInstance inst;
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line()) parse_fail(lineno, "missing header");
    std::istringstream hdr(line);
    std::string tag;
    int e = 0;
    if (!(hdr >> tag >> inst.num_vars >> inst.domain_size >> e) || tag != "csp")
        parse_fail(lineno, "expected 'csp <n> <d> <e>'");
    if (e < 0) parse_fail(lineno, "negative constraint count");

    for (int ci = 0; ci < e; ++ci) {
        if (!next_line()) parse_fail(lineno, "missing constraint header");
        std::istringstream ch(line);
        char kind = 0;
        int i = 0, j = 0, k = 0;
        if (!(ch >> tag >> i >> j >> kind >> k) || tag != "c")
            parse_fail(lineno, "expected 'c <i> <j> <kind> <k>'");
        if (k < 0 || static_cast<std::int64_t>(k) >
                         static_cast<std::int64_t>(inst.domain_size) * inst.domain_size)
            parse_fail(lineno, "tuple count outside [0, d^2]");
        Constraint c;
        c.i = i;
        c.j = j;
        c.kind = kind_from_letter(kind);
        c.allowed = Relation(inst.domain_size);
        for (int p = 0; p < k; ++p) {
            if (!next_line()) parse_fail(lineno, "missing tuple line");
            std::istringstream ts(line);
            int a = 0, b = 0;
            if (!(ts >> a >> b)) parse_fail(lineno, "expected '<a> <b>'");
            if (a < 0 || a >= inst.domain_size || b < 0 || b >= inst.domain_size)
                parse_fail(lineno, "tuple value out of domain");
            c.allowed.add(a, b);
        }
        if (c.allowed.count() != k) parse_fail(lineno, "duplicate tuple in constraint");
        inst.constraints.push_back(std::move(c));
    }
    validate(inst);
    return inst;
}

void write_instance_file(const std::string& path, const CspInstance& inst) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_instance(os, inst);
}

CspInstance read_instance_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_instance(is);
}

std::string instance_to_string(const CspInstance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

}  // namespace csphard

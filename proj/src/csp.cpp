#include "qaoalab/csp.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "qaoalab/errors.hpp"

namespace qaoalab {

Clause::Clause(std::vector<int> vars, std::vector<std::uint8_t> satisfying_patterns)
    : vars_(std::move(vars)), patterns_(std::move(satisfying_patterns)) {
    if (vars_.empty() || vars_.size() > 3) {
        throw std::invalid_argument("clause must mention 1..3 variables, got " + std::to_string(vars_.size()));
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] < 0) throw std::invalid_argument("clause variable index is negative");
        for (std::size_t j = 0; j < i; ++j) {
            if (vars_[i] == vars_[j]) throw std::invalid_argument("clause variables must be distinct");
        }
    }
    if (patterns_.empty()) throw std::invalid_argument("clause has no satisfying pattern");
    std::sort(patterns_.begin(), patterns_.end());
    patterns_.erase(std::unique(patterns_.begin(), patterns_.end()), patterns_.end());
    const unsigned limit = 1u << vars_.size();
    for (auto p : patterns_) {
        if (p >= limit) throw std::invalid_argument("clause pattern wider than its variable list");
        truth_ |= static_cast<std::uint8_t>(1u << p);
    }
}

Clause Clause::literal(int v, int value) { return Clause({v}, {static_cast<std::uint8_t>(value ? 1 : 0)}); }

Clause Clause::disagree(int a, int b) { return Clause({a, b}, {0b01, 0b10}); }

Clause Clause::pattern2(int a, int b, int bit_a, int bit_b) {
    return Clause({a, b}, {static_cast<std::uint8_t>((bit_a ? 1 : 0) | (bit_b ? 2 : 0))});
}

Clause Clause::disjunction(const std::vector<int>& vars, const std::vector<bool>& negated) {
    if (vars.size() != negated.size()) throw std::invalid_argument("disjunction: vars/negated size mismatch");
    std::vector<int> distinct;
    for (int v : vars) {
        if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    }
    if (distinct.empty() || distinct.size() > 3) {
        throw std::invalid_argument("disjunction must mention 1..3 distinct variables");
    }
    std::vector<std::uint8_t> sat;
    for (unsigned p = 0; p < (1u << distinct.size()); ++p) {
        bool any = false;
        for (std::size_t l = 0; l < vars.size() && !any; ++l) {
            auto pos = std::find(distinct.begin(), distinct.end(), vars[l]) - distinct.begin();
            const bool value = (p >> pos) & 1u;
            any = value != negated[l];
        }
        if (any) sat.push_back(static_cast<std::uint8_t>(p));
    }
    return Clause(std::move(distinct), std::move(sat));
}

std::uint8_t Clause::pattern_of(Index z) const {
    std::uint8_t p = 0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        p |= static_cast<std::uint8_t>(bit(z, vars_[j]) << j);
    }
    return p;
}

CspInstance::CspInstance(int n, std::vector<Clause> clauses) : n_(n), clauses_(std::move(clauses)) {
    if (n_ < 1 || n_ > 63) throw std::invalid_argument("instance needs 1..63 variables, got " + std::to_string(n_));
    if (clauses_.empty()) throw std::invalid_argument("instance needs at least one clause");
    incidence_.resize(static_cast<std::size_t>(n_));
    for (std::size_t a = 0; a < clauses_.size(); ++a) {
        for (int v : clauses_[a].vars()) {
            if (v >= n_) {
                throw std::out_of_range("clause " + std::to_string(a) + " references variable " + std::to_string(v) +
                                        " but n = " + std::to_string(n_));
            }
            incidence_[static_cast<std::size_t>(v)].push_back(static_cast<int>(a));
        }
    }
}

CostHistogram::CostHistogram(int n, int m, std::vector<std::uint64_t> counts)
    : n_(n), m_(m), counts_(std::move(counts)) {
    if (counts_.size() != static_cast<std::size_t>(m_) + 1) {
        throw std::invalid_argument("histogram needs m+1 bins");
    }
    std::uint64_t total = 0;
    for (auto c : counts_) total += c;
    if (total != dimension(n_)) throw std::invalid_argument("histogram counts must sum to 2^n");
}

double CostHistogram::probability(int v) const {
    return static_cast<double>(count(v)) / static_cast<double>(dimension(n_));
}

int evaluate_clause(const Clause& clause, Index z, int n) {
    if (n < 63 && z >= dimension(n)) throw std::out_of_range("string does not fit in " + std::to_string(n) + " bits");
    for (int v : clause.vars()) {
        if (v >= n) throw std::out_of_range("clause variable " + std::to_string(v) + " outside string of length " + std::to_string(n));
    }
    return clause.satisfied_by_pattern(clause.pattern_of(z)) ? 1 : 0;
}

int cost(const CspInstance& instance, Index z) {
    if (z >= dimension(instance.n())) throw std::out_of_range("string longer than instance width");
    int c = 0;
    for (const auto& clause : instance.clauses()) c += clause.satisfied_by_pattern(clause.pattern_of(z));
    return c;
}

int local_cost(const CspInstance& instance, int v, Index z) {
    int c = 0;
    for (int a : instance.clauses_of(v)) {
        const auto& clause = instance.clauses()[static_cast<std::size_t>(a)];
        c += clause.satisfied_by_pattern(clause.pattern_of(z));
    }
    return c;
}

std::vector<int> cost_table(const CspInstance& instance, int limit) {
    if (instance.n() > limit) {
        throw LimitExceeded("exhaustive enumeration limited to n <= " + std::to_string(limit) + ", got " +
                            std::to_string(instance.n()));
    }
    const Index dim = dimension(instance.n());
    std::vector<int> table(dim, 0);
    // Clause-major: one truth-table lookup per (clause, z).
    for (const auto& clause : instance.clauses()) {
        for (Index z = 0; z < dim; ++z) table[z] += clause.satisfied_by_pattern(clause.pattern_of(z));
    }
    return table;
}

CspInstance maxcut_from_graph(int n, std::span<const std::pair<int, int>> edges) {
    std::vector<Clause> clauses;
    clauses.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
        if (a < 0 || b < 0 || a >= n || b >= n) throw std::out_of_range("edge endpoint outside graph");
        clauses.push_back(Clause::disagree(a, b));
    }
    return CspInstance(n, std::move(clauses));
}

CostHistogram brute_force_histogram(const CspInstance& instance, int limit) {
    const auto table = cost_table(instance, limit);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(instance.m()) + 1, 0);
    for (int c : table) ++counts[static_cast<std::size_t>(c)];
    return CostHistogram(instance.n(), instance.m(), std::move(counts));
}

int c_max(const CspInstance& instance, int limit) {
    const auto h = brute_force_histogram(instance, limit);
    for (int v = h.m(); v >= 0; --v) {
        if (h.count(v) > 0) return v;
    }
    return 0;
}

std::uint64_t count_satisfying(const CspInstance& instance, int limit) {
    return brute_force_histogram(instance, limit).count(instance.m());
}

CspInstance random_3sat(int n, int m, std::mt19937_64& rng) {
    if (n < 3) throw std::invalid_argument("random 3SAT needs n >= 3");
    std::uniform_int_distribution<int> var(0, n - 1);
    std::bernoulli_distribution neg(0.5);
    std::vector<Clause> clauses;
    clauses.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        std::vector<int> v(3);
        v[0] = var(rng);
        do { v[1] = var(rng); } while (v[1] == v[0]);
        do { v[2] = var(rng); } while (v[2] == v[0] || v[2] == v[1]);
        std::vector<bool> ng(3);
        for (std::size_t j = 0; j < 3; ++j) ng[j] = neg(rng);
        clauses.push_back(Clause::disjunction(v, ng));
    }
    return CspInstance(n, std::move(clauses));
}

CspInstance random_maxcut(int n, double edge_probability, std::mt19937_64& rng) {
    if (n < 2) throw std::invalid_argument("random MAX-CUT needs n >= 2");
    std::bernoulli_distribution keep(edge_probability);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (keep(rng)) edges.emplace_back(a, b);
        }
    }
    if (edges.empty()) edges.emplace_back(0, 1);
    return maxcut_from_graph(n, edges);
}

}  // namespace qaoalab

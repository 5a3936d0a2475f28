#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qaoalab/bits.hpp"

namespace qaoalab {

/// Largest n for which exhaustive enumeration over {0,1}^n is allowed.
inline constexpr int kDefaultExhaustiveLimit = 24;

/// A 1..3 variable constraint stored as an explicit truth table.
///
/// Pattern bit j is the value of vars[j]; the clause is satisfied by z when
/// the restriction of z to vars is one of the satisfying patterns.
class Clause {
  public:
    Clause(std::vector<int> vars, std::vector<std::uint8_t> satisfying_patterns);

    /// [z_v = value]
    static Clause literal(int v, int value);
    /// Satisfied iff z_a != z_b (one MAX-CUT edge).
    static Clause disagree(int a, int b);
    /// Satisfied iff (z_a, z_b) == (bit_a, bit_b).
    static Clause pattern2(int a, int b, int bit_a, int bit_b);
    /// Disjunction of literals; negated[j] means the literal is !z_{vars[j]}.
    /// Repeated variables are merged (x or !x yields the always-true clause).
    static Clause disjunction(const std::vector<int>& vars, const std::vector<bool>& negated);

    const std::vector<int>& vars() const { return vars_; }
    const std::vector<std::uint8_t>& patterns() const { return patterns_; }
    int arity() const { return static_cast<int>(vars_.size()); }
    bool always_true() const { return patterns_.size() == (std::size_t{1} << vars_.size()); }

    /// Restriction of z to the clause variables, as a pattern.
    std::uint8_t pattern_of(Index z) const;
    bool satisfied_by_pattern(std::uint8_t pattern) const { return (truth_ >> pattern) & 1u; }

    friend bool operator==(const Clause& a, const Clause& b) {
        return a.vars_ == b.vars_ && a.truth_ == b.truth_;
    }

  private:
    std::vector<int> vars_;
    std::vector<std::uint8_t> patterns_;  // sorted, unique
    std::uint8_t truth_ = 0;              // bit p set iff pattern p satisfies
};

/// n variables and an ordered clause multiset (duplicates are significant).
class CspInstance {
  public:
    CspInstance(int n, std::vector<Clause> clauses);

    int n() const { return n_; }
    int m() const { return static_cast<int>(clauses_.size()); }
    const std::vector<Clause>& clauses() const { return clauses_; }
    /// Indices of the clauses that mention variable v.
    const std::vector<int>& clauses_of(int v) const { return incidence_[static_cast<std::size_t>(v)]; }

  private:
    int n_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> incidence_;
};

/// Exact distribution of C(z) over all 2^n strings, kept as integer counts.
class CostHistogram {
  public:
    CostHistogram(int n, int m, std::vector<std::uint64_t> counts);

    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t count(int v) const { return counts_.at(static_cast<std::size_t>(v)); }
    /// p_v = count(v) / 2^n
    double probability(int v) const;

    friend bool operator==(const CostHistogram&, const CostHistogram&) = default;

  private:
    int n_;
    int m_;
    std::vector<std::uint64_t> counts_;
};

/// 1 iff z restricted to the clause variables is a satisfying pattern.
int evaluate_clause(const Clause& clause, Index z, int n);

int cost(const CspInstance& instance, Index z);

/// Sum of clause values for the clauses incident to variable v only.
int local_cost(const CspInstance& instance, int v, Index z);

/// C(z) for every z, indexed by z. Requires n <= limit.
std::vector<int> cost_table(const CspInstance& instance, int limit = kDefaultExhaustiveLimit);

CspInstance maxcut_from_graph(int n, std::span<const std::pair<int, int>> edges);

CostHistogram brute_force_histogram(const CspInstance& instance, int limit = kDefaultExhaustiveLimit);

int c_max(const CspInstance& instance, int limit = kDefaultExhaustiveLimit);
std::uint64_t count_satisfying(const CspInstance& instance, int limit = kDefaultExhaustiveLimit);

// Random instance generators (seeded, deterministic).
CspInstance random_3sat(int n, int m, std::mt19937_64& rng);
CspInstance random_maxcut(int n, double edge_probability, std::mt19937_64& rng);

}  // namespace qaoalab

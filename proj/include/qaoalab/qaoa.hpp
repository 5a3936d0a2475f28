#pragma once

#include <span>
#include <vector>

#include "qaoalab/csp.hpp"
#include "qaoalab/statevec.hpp"

namespace qaoalab {

/// The 2p QAOA angles. Stored canonically: gamma in [0, 2pi) (C is
/// integer-valued) and beta in [0, pi) (exp(-i pi B) is a global sign).
class Angles {
  public:
    Angles(std::vector<double> gammas, std::vector<double> betas);
    static Angles single(double gamma, double beta) { return Angles({gamma}, {beta}); }

    int p() const { return static_cast<int>(gammas_.size()); }
    const std::vector<double>& gammas() const { return gammas_; }
    const std::vector<double>& betas() const { return betas_; }
    /// Extended to depth p with (0, 0) layers.
    Angles padded(int p) const;

  private:
    std::vector<double> gammas_;
    std::vector<double> betas_;
};

/// Objective evaluator that caches C(z) for the instance.
class QaoaEvaluator {
  public:
    explicit QaoaEvaluator(const CspInstance& instance, int ceiling = kDefaultQubitCeiling);

    int n() const { return n_; }
    const std::vector<int>& costs() const { return costs_; }
    StateVector state(const Angles& angles) const;
    double objective(const Angles& angles) const;

  private:
    int n_;
    std::vector<int> costs_;
};

struct QaoaOptimum {
    Angles angles;
    double objective;
    /// Objective after each round (coordinate_optimize only).
    std::vector<double> history;
};

/// exp(-i beta_p B) exp(-i gamma_p C) ... exp(-i beta_1 B) exp(-i gamma_1 C) |s>
StateVector build_state(const CspInstance& instance, const Angles& angles);

double objective(const CspInstance& instance, const Angles& angles);

/// p=1 exhaustive grid: gamma_k = 2 pi k / resolution, beta_l = pi l / resolution.
/// Ties keep the lexicographically smallest (gamma, beta).
QaoaOptimum grid_search(const CspInstance& instance, int resolution, int threads = 1);

inline constexpr double kGoldenTolerance = 1e-6;

/// Cyclic one-angle-at-a-time refinement (scan + golden section). A move is
/// only taken when it improves the objective, so the history is non-decreasing.
QaoaOptimum coordinate_optimize(const CspInstance& instance, int p, const Angles& init, int rounds);

/// |amp(z)|^2 of the QAOA state.
std::vector<double> output_distribution(const CspInstance& instance, const Angles& angles);

}  // namespace qaoalab

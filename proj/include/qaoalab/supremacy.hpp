#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qaoalab/csp.hpp"
#include "qaoalab/statevec.hpp"

namespace qaoalab {

// Exact counting from matrix elements
// ------------------------------------
// e_r = <s| exp(-2 pi i r C / D) |s> = sum_v p_v exp(-2 pi i r v / D)
// is the discrete Fourier transform of the cost histogram. Sampling
// r = 0..m with D = m + 1 gives a square, invertible DFT over v in {0..m};
// with D = m the characters of v = 0 and v = m coincide.

/// <s| exp(-2 pi i r C / denominator) |s>, evaluated on a state vector.
Amplitude matrix_element(const CspInstance& instance, int r, int denominator);

struct MatrixElementSeries {
    int n;
    int m;
    int denominator;
    std::vector<Amplitude> samples;  // e_0 .. e_{R-1}
};

/// e_r for r = 0..m at denominator m + 1. Rows are independent; `threads`
/// spreads them over worker threads.
MatrixElementSeries matrix_element_series(const CspInstance& instance, int threads = 1);

inline constexpr double kRecoveryTolerance = 1e-8;

/// Inverse DFT of the series, snapped to the 2^-n lattice.
/// Throws NonRealRecovery when an imaginary part or lattice residual exceeds 1e-8.
CostHistogram recover_histogram(const MatrixElementSeries& series);

/// Number of strings satisfying every clause, via the matrix-element series.
std::uint64_t fourier_count(const CspInstance& instance, int threads = 1);

// Post-selected distributions and the multiplicative-error lemma
// ---------------------------------------------------------------
// Joint distributions over (z1, z2), z1 one bit and z2 an n-bit string, are
// indexed as z1 + 2 * z2 (z1 is qubit 0).

struct PostSelectedPair {
    double p0;
    double p1;
};

/// Distribution of z1 conditioned on z2 = 0^n.
PostSelectedPair postselect_distribution(std::span<const double> joint);

struct BoundReport {
    bool bound_holds = false;     // |p - q| <= eps q pointwise
    double max_violation = 0.0;   // max over z of |p - q| - eps q (<= 0 when the bound holds)
    double max_ratio_deviation = 0.0;  // max over q > 0 of |p/q - 1|
    PostSelectedPair p_post{};
    PostSelectedPair q_post{};
    /// (1-eps)/(1+eps) q_post <= p_post <= (1+eps)/(1-eps) q_post, both outcomes.
    bool sandwich_holds = false;
    bool yes_case = false;        // q_post(1) >= 2/3
    bool no_case = false;         // q_post(1) <= 1/3
    bool threshold_holds = true;  // YES => p_post(1) >= 0.54, NO => p_post(1) <= 0.41
    /// Fails only if the bound holds but a consequence of it does not.
    bool consistent() const { return !bound_holds || (sandwich_holds && threshold_holds); }
};

inline constexpr double kYesThreshold = 0.54;
inline constexpr double kNoThreshold = 0.41;

BoundReport multiplicative_bound_check(std::span<const double> p, std::span<const double> q, double eps = 0.1);

}  // namespace qaoalab

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qaoalab/bits.hpp"
#include "qaoalab/csp.hpp"

namespace qaoalab {

using Amplitude = std::complex<double>;
using Mat2 = std::array<std::array<Amplitude, 2>, 2>;

inline constexpr int kDefaultQubitCeiling = 24;
/// Post-selected branches with less mass than this are treated as impossible.
inline constexpr double kZeroProbability = 1e-300;

namespace gates {

Mat2 hadamard();
/// exp(-i pi/4 sigma_x): the mixer layer at beta = pi/4.
Mat2 h_tilde();
/// exp(-i beta sigma_x)
Mat2 x_rotation(double beta);
/// diag(d0, d1)
Mat2 diagonal(Amplitude d0, Amplitude d1);
Mat2 multiply(const Mat2& a, const Mat2& b);
Mat2 adjoint(const Mat2& a);

}  // namespace gates

/// Qubits to condition on, with the required outcome for each.
struct PostSelection {
    std::vector<int> qubits;
    std::vector<int> targets;

    static PostSelection all_zero(std::vector<int> qubits);
};

/// Dense 2^n amplitude vector; basis index z has qubit 0 as its least significant bit.
class StateVector {
  public:
    static StateVector uniform(int n, int ceiling = kDefaultQubitCeiling);
    static StateVector basis(int n, Index z, int ceiling = kDefaultQubitCeiling);
    /// Takes ownership of amplitudes that must already be normalized (1e-10).
    /// A single amplitude describes a zero-qubit state.
    static StateVector from_amplitudes(std::vector<Amplitude> amps, int ceiling = kDefaultQubitCeiling);

    int n() const { return n_; }
    Index size() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude amplitude(Index z) const;
    std::vector<double> probabilities() const;
    double norm_squared() const;
    /// Rescales to unit norm; returns the norm before rescaling.
    double normalize();

    void apply_single_qubit(int qubit, const Mat2& u);
    /// amp(z) *= exp(-i gamma C(z))
    void apply_cost_phase(const CspInstance& instance, double gamma);
    /// Same, with C(z) precomputed for every basis index.
    void apply_cost_phase(std::span<const int> costs, double gamma);
    /// exp(-i beta B), B = sum_i sigma_x^(i)
    void apply_mixer(double beta);
    /// Multiplies amp(z) by phases[r] where r packs z's bits on `qubits`
    /// (bit j of r is qubit qubits[j]). All phases must have unit modulus.
    void apply_diagonal(std::span<const int> qubits, std::span<const Amplitude> phases);
    /// |z> -> |z with target bit xor f(z)>, where f sees z with the target bit cleared.
    void apply_classical_xor(int target, const std::function<bool(Index)>& f);

    /// Zeroes amplitudes inconsistent with `sel`, renormalizes, and returns
    /// the probability mass that was kept. Qubit count is unchanged.
    double project(const PostSelection& sel);

    /// Tensors a fresh |+> qubit on as the new highest-index qubit.
    void append_plus_qubit();

    /// i.i.d. draws from |amp(z)|^2; a fixed seed reproduces the shot sequence.
    std::vector<Index> sample(std::size_t shots, std::uint64_t seed) const;

    /// Debug dump: "index,real,imag" rows.
    void write_csv(std::ostream& out) const;

  private:
    StateVector(int n, std::vector<Amplitude> amps) : n_(n), amps_(std::move(amps)) {}
    void check_qubit(int q) const;

    int n_ = 0;
    std::vector<Amplitude> amps_;
};

struct PostSelectResult {
    StateVector state;   // over the non-selected qubits, in their original order
    double probability;  // mass of the selected branch before renormalization
};

/// Projects onto `sel`, renormalizes, and drops the selected qubits.
/// Throws PostSelectionImpossible if the branch mass is below kZeroProbability.
PostSelectResult postselect(const StateVector& state, const PostSelection& sel);

/// <a|b>
Amplitude inner_product(const StateVector& a, const StateVector& b);

double expectation_cost(const StateVector& state, const CspInstance& instance);
double expectation_cost(const StateVector& state, std::span<const int> costs);

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace qaoalab

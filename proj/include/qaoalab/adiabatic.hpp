#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qaoalab/csp.hpp"
#include "qaoalab/statevec.hpp"

namespace qaoalab {

/// Largest n for dense 2^n x 2^n Hamiltonians.
inline constexpr int kDenseQubitLimit = 12;

/// H(s) = (1-s)(-B) + s(-C), B = sum_i sigma_x^(i).
Eigen::MatrixXd hamiltonian_dense(const CspInstance& instance, double s);

/// True iff every off-diagonal entry is <= 1e-12.
bool stoquastic_check(const Eigen::MatrixXd& matrix);

struct SpectralData {
    double ground_energy;
    double gap;                 // E_1 - E_0
    StateVector ground_state;   // entries real and nonnegative
    std::vector<double> energies;
};

SpectralData ground_state(const CspInstance& instance, double s);

/// <z|e^{-beta H(s)}|z> / tr e^{-beta H(s)}
std::vector<double> gibbs_distribution(const CspInstance& instance, double s, double beta);

/// A closed path of L slices: z, then x[0..L-2]. The ring has L transfer
/// factors, the last one closing x back onto z.
struct Worldline {
    Index z = 0;
    std::vector<Index> x;

    int slices() const { return static_cast<int>(x.size()) + 1; }
    Index slice(int k) const { return k == 0 ? z : x[static_cast<std::size_t>(k - 1)]; }
    friend bool operator==(const Worldline&, const Worldline&) = default;
};

struct PimcConfig {
    double beta = 1.0;
    int L = 2;
    double s = 0.5;
    std::int64_t sweeps = 1000;
    std::uint64_t seed = 0;
    /// Histogram every slice instead of z only. All slices share z's
    /// marginal because the ring is cyclic.
    bool record_all_slices = false;
    /// Independent chains, each running `sweeps` sweeps.
    int chains = 1;

    void validate() const;
    /// tau = beta (1 - s) / L
    double tau() const { return beta * (1.0 - s) / L; }
    /// beta s / L
    double cost_step() const { return beta * s / L; }
};

/// Smallest L >= 2 with beta*m/L <= 0.5 and beta*(1-s)/L <= 0.5.
int default_slices(const CspInstance& instance, double beta, double s);

/// log w_max, w_max = cosh(tau)^{nL} e^{beta s m}.
double log_w_max(const CspInstance& instance, const PimcConfig& config);

/// log of prod_k K(slice_k, slice_{k+1}) e^{(beta s/L) C(slice_{k+1})},
/// K = prod_i (cosh tau if bits agree else sinh tau).
double transfer_weight(const Worldline& w, const CspInstance& instance, const PimcConfig& config);

/// Index of a worldline in {0,1}^{nL}: slice k occupies bits [kn, (k+1)n).
Index pack_worldline(const Worldline& w, int n);
Worldline unpack_worldline(Index packed, int n, int L);

/// p(z, x) for every packed worldline (n L <= 22).
std::vector<double> worldline_distribution(const CspInstance& instance, const PimcConfig& config);

/// Marginal on z of the Trotterized weights via dense transfer matrices:
/// diag(T^L) / tr T^L, T = e^{tau B} e^{(beta s/L) C}.
std::vector<double> trotter_marginal(const CspInstance& instance, const PimcConfig& config);

/// e^{-t H(s)} through the eigendecomposition.
Eigen::MatrixXd slice_matrix(const CspInstance& instance, double s, double t);

/// For every z: sum over all x of prod <.|e^{-beta H/L}|.> around the ring,
/// with dense slice matrices (n (L-1) <= 20).
std::vector<double> slice_product_diagonal(const CspInstance& instance, double s, double beta, int L);

/// Metropolis on a worldline, acceptance from local ratios. A sweep is n L
/// random single-site proposals, then a column flip (bit i in every slice;
/// kernel factors unchanged) proposed for each qubit with probability 1/2.
class PimcChain {
  public:
    PimcChain(const CspInstance& instance, const PimcConfig& config, Worldline start);

    const Worldline& worldline() const { return w_; }
    /// log(w'/w) for flipping bit i of slice k.
    double log_ratio(int k, int i) const;
    /// One proposal; returns true when accepted.
    bool step(std::mt19937_64& rng);
    /// log(w'/w) for flipping bit i in all slices.
    double column_log_ratio(int i) const;
    bool column_step(int i, std::mt19937_64& rng);
    /// n L site proposals then the column proposals; returns the number accepted.
    std::int64_t sweep(std::mt19937_64& rng);
    /// Proposals made so far, site and column.
    std::int64_t proposals_made() const { return proposals_; }
    /// Moves to a new s (same beta and L), keeping the worldline.
    void retarget(double s);
    int current_cost() const { return cost(*instance_, w_.z); }

  private:
    Index& slice_ref(int k) { return k == 0 ? w_.z : w_.x[static_cast<std::size_t>(k - 1)]; }

    const CspInstance* instance_;
    PimcConfig config_;
    Worldline w_;
    int n_;
    double log_tanh_ = 0.0;
    std::int64_t proposals_ = 0;
};

/// All-zero worldline with L slices.
Worldline initial_worldline(int L);

Worldline metropolis_sweep(const Worldline& w, const CspInstance& instance, const PimcConfig& config,
                           std::mt19937_64& rng);

struct PimcResult {
    std::vector<double> marginal;      // empirical distribution over z
    std::int64_t recorded;             // samples behind `marginal`
    double acceptance_rate;
    /// Integrated autocorrelation time of C(z), in sweeps.
    double autocorrelation_time;
    double mean_cost;
};

/// Burn-in of sweeps/5, then one record per sweep. Requires n <= 24.
PimcResult pimc_sample(const CspInstance& instance, const PimcConfig& config, int threads = 1);

struct SqaStep {
    double s;
    double mean_cost;
    int best_cost;  // running maximum
    double acceptance_rate;
};

struct SqaResult {
    Index best_z;
    int best_cost;
    std::vector<SqaStep> trajectory;
};

/// PIMC along an increasing schedule of s, warm-starting each point from the
/// previous worldline. `config.s` and `config.sweeps` are ignored.
SqaResult sqa_anneal(const CspInstance& instance, const std::vector<double>& schedule, std::int64_t per_step_sweeps,
                     const PimcConfig& config);

struct RejectionResult {
    Worldline sample;
    std::int64_t attempts;
};

/// Uniform worldline proposals accepted with probability w / w_max.
/// `log_bound` overrides log w_max when given (must be an upper bound).
RejectionResult rejection_sample(const CspInstance& instance, const PimcConfig& config, std::int64_t max_attempts,
                                 std::mt19937_64& rng, double log_bound = std::numeric_limits<double>::quiet_NaN());

/// Schrodinger evolution under H(t/T) from |s>, fourth-order composition of
/// split steps, renormalized each step. Throws IntegratorInstability when the
/// per-step norm drifts by more than 1e-8.
StateVector adiabatic_evolve(const CspInstance& instance, double T, double dt);

/// Probability mass on argmax C.
double optimum_fidelity(const CspInstance& instance, const StateVector& psi);

struct AdiabaticSchedule {
    double T;
    double fidelity;
    int doublings;
};

/// Doubles T from T0 until optimum_fidelity >= target; throws
/// AttemptsExhausted past max_T.
AdiabaticSchedule find_adiabatic_time(const CspInstance& instance, double dt, double target, double T0, double max_T);

}  // namespace qaoalab

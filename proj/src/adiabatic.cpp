#include "qaoalab/adiabatic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "qaoalab/errors.hpp"

namespace qaoalab {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_dense(const CspInstance& instance) {
    if (instance.n() > kDenseQubitLimit) {
        throw LimitExceeded("dense Hamiltonian needs n <= " + std::to_string(kDenseQubitLimit) + ", got " +
                            std::to_string(instance.n()));
    }
}

void check_s(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in [0, 1]");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diagonalize(const CspInstance& instance, double s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian_dense(instance, s));
    if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
    return solver;
}

/// ln cosh / ln sinh pair for the kernel.
struct Kernel {
    double log_cosh;
    double log_sinh;

    explicit Kernel(double tau) : log_cosh(std::log(std::cosh(tau))), log_sinh(std::log(std::sinh(tau))) {}
    double log_k(Index a, Index b, int n) const {
        const int d = std::popcount(a ^ b);
        return (n - d) * log_cosh + d * log_sinh;
    }
};

/// Sokal-windowed integrated autocorrelation time.
double integrated_autocorrelation(const std::vector<int>& series) {
    const std::size_t N = series.size();
    if (N < 4) return 0.5;
    double mean = 0.0;
    for (int v : series) mean += v;
    mean /= static_cast<double>(N);
    std::vector<double> d(N);
    double var = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        d[i] = series[i] - mean;
        var += d[i] * d[i];
    }
    var /= static_cast<double>(N);
    if (var <= 0.0) return 0.5;
    double tau = 0.5;
    for (std::size_t t = 1; t < N / 2; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i + t < N; ++i) acc += d[i] * d[i + t];
        tau += acc / (static_cast<double>(N - t) * var);
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    return tau;
}

struct ChainTally {
    std::vector<std::uint64_t> counts;
    std::int64_t recorded = 0;
    std::int64_t proposals = 0;
    std::int64_t accepted = 0;
    double cost_sum = 0.0;
    std::vector<int> cost_series;
};

ChainTally run_chain(const CspInstance& instance, const PimcConfig& config, std::uint64_t seed, bool keep_series) {
    std::seed_seq seq{seed, config.seed};
    std::mt19937_64 rng(seq);
    PimcChain chain(instance, config, initial_worldline(config.L));
    ChainTally t;
    t.counts.assign(dimension(instance.n()), 0);
    const std::int64_t burn = config.sweeps / 5;
    for (std::int64_t i = 0; i < burn; ++i) chain.sweep(rng);
    if (keep_series) t.cost_series.reserve(static_cast<std::size_t>(config.sweeps - burn));
    for (std::int64_t i = burn; i < config.sweeps; ++i) {
        const std::int64_t before = chain.proposals_made();
        t.accepted += chain.sweep(rng);
        t.proposals += chain.proposals_made() - before;
        const auto& w = chain.worldline();
        const int c = cost(instance, w.z);
        t.cost_sum += c;
        if (keep_series) t.cost_series.push_back(c);
        if (config.record_all_slices) {
            for (int k = 0; k < config.L; ++k) ++t.counts[w.slice(k)];
            t.recorded += config.L;
        } else {
            ++t.counts[w.z];
            ++t.recorded;
        }
    }
    return t;
}

}  // namespace

Eigen::MatrixXd hamiltonian_dense(const CspInstance& instance, double s) {
    check_dense(instance);
    check_s(s);
    const int n = instance.n();
    const Index N = dimension(n);
    const auto costs = cost_table(instance, kDenseQubitLimit);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (Index z = 0; z < N; ++z) {
        const auto r = static_cast<Eigen::Index>(z);
        H(r, r) = -s * costs[z];
        for (int i = 0; i < n; ++i) H(r, static_cast<Eigen::Index>(flip(z, i))) = -(1.0 - s);
    }
    return H;
}

bool stoquastic_check(const Eigen::MatrixXd& matrix) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
            if (r != c && matrix(r, c) > 1e-12) return false;
        }
    }
    return true;
}

SpectralData ground_state(const CspInstance& instance, double s) {
    const auto solver = diagonalize(instance, s);
    const auto& E = solver.eigenvalues();
    Eigen::VectorXd g = solver.eigenvectors().col(0);
    if (g.sum() < 0) g = -g;
    std::vector<Amplitude> amps(static_cast<std::size_t>(g.size()));
    for (Eigen::Index z = 0; z < g.size(); ++z) amps[static_cast<std::size_t>(z)] = g(z);
    std::vector<double> energies(E.data(), E.data() + E.size());
    const double gap = E.size() > 1 ? E(1) - E(0) : 0.0;
    return {E(0), std::max(0.0, gap), StateVector::from_amplitudes(std::move(amps), kDenseQubitLimit), std::move(energies)};
}

std::vector<double> gibbs_distribution(const CspInstance& instance, double s, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    const auto solver = diagonalize(instance, s);
    const auto& E = solver.eigenvalues();
    const auto& V = solver.eigenvectors();
    std::vector<double> p(static_cast<std::size_t>(E.size()), 0.0);
    double total = 0.0;
    for (Eigen::Index k = 0; k < E.size(); ++k) {
        const double boltz = std::exp(-beta * (E(k) - E(0)));
        for (Eigen::Index z = 0; z < E.size(); ++z) p[static_cast<std::size_t>(z)] += V(z, k) * V(z, k) * boltz;
    }
    for (double x : p) total += x;
    for (double& x : p) x /= total;
    return p;
}

void PimcConfig::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (L < 2) throw std::invalid_argument("L must be >= 2");
    if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("s must lie in [0, 1)");
    if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
}

int default_slices(const CspInstance& instance, double beta, double s) {
    const double need = std::max(beta * instance.m(), beta * (1.0 - s)) / 0.5;
    return std::max(2, static_cast<int>(std::ceil(need - 1e-12)));
}

double log_w_max(const CspInstance& instance, const PimcConfig& config) {
    config.validate();
    return static_cast<double>(instance.n()) * config.L * std::log(std::cosh(config.tau())) +
           config.beta * config.s * instance.m();
}

double transfer_weight(const Worldline& w, const CspInstance& instance, const PimcConfig& config) {
    config.validate();
    if (w.slices() != config.L) throw std::invalid_argument("worldline has " + std::to_string(w.slices()) + " slices, expected L");
    const int n = instance.n();
    const Kernel kernel(config.tau());
    double logw = 0.0;
    for (int k = 0; k < config.L; ++k) {
        const Index a = w.slice(k);
        const Index b = w.slice((k + 1) % config.L);
        logw += kernel.log_k(a, b, n) + config.cost_step() * cost(instance, b);
    }
    return logw;
}

Index pack_worldline(const Worldline& w, int n) {
    Index packed = 0;
    for (int k = 0; k < w.slices(); ++k) packed |= w.slice(k) << (k * n);
    return packed;
}

Worldline unpack_worldline(Index packed, int n, int L) {
    const Index mask = dimension(n) - 1;
    Worldline w;
    w.z = packed & mask;
    for (int k = 1; k < L; ++k) w.x.push_back((packed >> (k * n)) & mask);
    return w;
}

std::vector<double> worldline_distribution(const CspInstance& instance, const PimcConfig& config) {
    config.validate();
    const int n = instance.n();
    if (n * config.L > 22) throw LimitExceeded("worldline enumeration needs n L <= 22");
    const Index total = dimension(n * config.L);
    std::vector<double> logw(total);
    double top = -std::numeric_limits<double>::infinity();
    for (Index p = 0; p < total; ++p) {
        logw[p] = transfer_weight(unpack_worldline(p, n, config.L), instance, config);
        top = std::max(top, logw[p]);
    }
    double sum = 0.0;
    for (double& x : logw) {
        x = std::exp(x - top);
        sum += x;
    }
    for (double& x : logw) x /= sum;
    return logw;
}

std::vector<double> trotter_marginal(const CspInstance& instance, const PimcConfig& config) {
    config.validate();
    check_dense(instance);
    const int n = instance.n();
    const auto N = static_cast<Eigen::Index>(dimension(n));
    const auto costs = cost_table(instance, kDenseQubitLimit);
    const double tau = config.tau();
    Eigen::MatrixXd T(N, N);
    for (Eigen::Index a = 0; a < N; ++a) {
        for (Eigen::Index b = 0; b < N; ++b) {
            const int d = std::popcount(static_cast<Index>(a ^ b));
            T(a, b) = std::pow(std::cosh(tau), n - d) * std::pow(std::sinh(tau), d) *
                      std::exp(config.cost_step() * costs[static_cast<std::size_t>(b)]);
        }
    }
    // Repeated squaring; rescaling keeps entries finite without changing ratios.
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(N, N);
    Eigen::MatrixXd base = T / T.maxCoeff();
    for (int e = config.L; e > 0; e >>= 1) {
        if (e & 1) {
            result = result * base;
            result /= result.maxCoeff();
        }
        base = base * base;
        base /= base.maxCoeff();
    }
    std::vector<double> p(static_cast<std::size_t>(N));
    const double tr = result.trace();
    for (Eigen::Index z = 0; z < N; ++z) p[static_cast<std::size_t>(z)] = result(z, z) / tr;
    return p;
}

Eigen::MatrixXd slice_matrix(const CspInstance& instance, double s, double t) {
    const auto solver = diagonalize(instance, s);
    const auto& E = solver.eigenvalues();
    const auto& V = solver.eigenvectors();
    Eigen::VectorXd d(E.size());
    for (Eigen::Index k = 0; k < E.size(); ++k) d(k) = std::exp(-t * E(k));
    return V * d.asDiagonal() * V.transpose();
}

std::vector<double> slice_product_diagonal(const CspInstance& instance, double s, double beta, int L) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    const int n = instance.n();
    if (n * (L - 1) > 20) throw LimitExceeded("slice-product enumeration needs n (L-1) <= 20");
    const auto S = slice_matrix(instance, s, beta / L);
    const Index N = dimension(n);
    const Index mask = N - 1;
    const Index paths = dimension(n * (L - 1));
    std::vector<double> diag(N, 0.0);
    for (Index z = 0; z < N; ++z) {
        double acc = 0.0;
        for (Index x = 0; x < paths; ++x) {
            double prod = 1.0;
            Index a = z;
            for (int k = 0; k < L - 1; ++k) {
                const Index b = (x >> (k * n)) & mask;
                prod *= S(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                a = b;
            }
            prod *= S(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(z));
            acc += prod;
        }
        diag[z] = acc;
    }
    return diag;
}

PimcChain::PimcChain(const CspInstance& instance, const PimcConfig& config, Worldline start)
    : instance_(&instance), config_(config), w_(std::move(start)), n_(instance.n()) {
    config_.validate();
    if (w_.slices() != config_.L) throw std::invalid_argument("start worldline must have L slices");
    retarget(config_.s);
}

void PimcChain::retarget(double s) {
    config_.s = s;
    config_.validate();
    log_tanh_ = std::log(std::tanh(config_.tau()));
}

double PimcChain::log_ratio(int k, int i) const {
    const int L = config_.L;
    const Index cur = w_.slice(k);
    const int c = bit(cur, i);
    double lr = 0.0;
    // Bonds (k-1, k) and (k, k+1): equal -> unequal multiplies by tanh tau.
    for (Index nb : {w_.slice((k + L - 1) % L), w_.slice((k + 1) % L)}) {
        lr += bit(nb, i) == c ? log_tanh_ : -log_tanh_;
    }
    if (config_.s > 0.0) {
        const int dc = local_cost(*instance_, i, flip(cur, i)) - local_cost(*instance_, i, cur);
        lr += config_.cost_step() * dc;
    }
    return lr;
}

bool PimcChain::step(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> site(0, n_ * config_.L - 1);
    const int r = site(rng);
    const int k = r / n_;
    const int i = r % n_;
    const double lr = log_ratio(k, i);
    if (lr >= 0.0 || uniform01(rng) < std::exp(lr)) {
        Index& sl = slice_ref(k);
        sl = flip(sl, i);
        return true;
    }
    return false;
}

double PimcChain::column_log_ratio(int i) const {
    if (config_.s == 0.0) return 0.0;
    int dc = 0;
    for (int k = 0; k < config_.L; ++k) {
        const Index cur = w_.slice(k);
        dc += local_cost(*instance_, i, flip(cur, i)) - local_cost(*instance_, i, cur);
    }
    return config_.cost_step() * dc;
}

bool PimcChain::column_step(int i, std::mt19937_64& rng) {
    const double lr = column_log_ratio(i);
    if (lr >= 0.0 || uniform01(rng) < std::exp(lr)) {
        for (int k = 0; k < config_.L; ++k) {
            Index& sl = slice_ref(k);
            sl = flip(sl, i);
        }
        return true;
    }
    return false;
}

std::int64_t PimcChain::sweep(std::mt19937_64& rng) {
    std::int64_t accepted = 0;
    const int proposals = n_ * config_.L;
    for (int j = 0; j < proposals; ++j) accepted += step(rng) ? 1 : 0;
    proposals_ += proposals;
    // Each column independently with probability 1/2, so the flipped set is a uniform subset.
    const std::uint64_t coins = rng();
    for (int i = 0; i < n_; ++i) {
        if ((coins >> (i % 64)) & 1U) {
            accepted += column_step(i, rng) ? 1 : 0;
            ++proposals_;
        }
    }
    return accepted;
}

Worldline initial_worldline(int L) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    return Worldline{0, std::vector<Index>(static_cast<std::size_t>(L - 1), 0)};
}

Worldline metropolis_sweep(const Worldline& w, const CspInstance& instance, const PimcConfig& config,
                           std::mt19937_64& rng) {
    PimcChain chain(instance, config, w);
    chain.sweep(rng);
    return chain.worldline();
}

PimcResult pimc_sample(const CspInstance& instance, const PimcConfig& config, int threads) {
    config.validate();
    if (instance.n() > kDefaultQubitCeiling) throw LimitExceeded("pimc_sample histograms need n <= 24");
    std::vector<ChainTally> tallies(static_cast<std::size_t>(config.chains));
    auto work = [&](int first, int stride) {
        for (int c = first; c < config.chains; c += stride) {
            tallies[static_cast<std::size_t>(c)] = run_chain(instance, config, static_cast<std::uint64_t>(c), c == 0);
        }
    };
    threads = std::clamp(threads, 1, config.chains);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    PimcResult out{std::vector<double>(dimension(instance.n()), 0.0), 0, 0.0, 0.0, 0.0};
    std::int64_t proposals = 0;
    std::int64_t accepted = 0;
    std::int64_t cost_samples = 0;
    double cost_sum = 0.0;
    for (const auto& t : tallies) {
        for (std::size_t z = 0; z < t.counts.size(); ++z) out.marginal[z] += static_cast<double>(t.counts[z]);
        out.recorded += t.recorded;
        proposals += t.proposals;
        accepted += t.accepted;
        cost_sum += t.cost_sum;
        cost_samples += config.sweeps - config.sweeps / 5;
    }
    for (double& x : out.marginal) x /= static_cast<double>(out.recorded);
    out.acceptance_rate = proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    out.autocorrelation_time = integrated_autocorrelation(tallies.front().cost_series);
    out.mean_cost = cost_sum / static_cast<double>(cost_samples);
    return out;
}

SqaResult sqa_anneal(const CspInstance& instance, const std::vector<double>& schedule, std::int64_t per_step_sweeps,
                     const PimcConfig& config) {
    if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");
    if (per_step_sweeps < 1) throw std::invalid_argument("per-step sweeps must be >= 1");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i] < schedule[i - 1]) throw std::invalid_argument("schedule must be nondecreasing");
    }
    PimcConfig cfg = config;
    cfg.s = schedule.front();
    std::mt19937_64 rng(config.seed);
    PimcChain chain(instance, cfg, initial_worldline(cfg.L));
    SqaResult out{chain.worldline().z, chain.current_cost(), {}};
    for (double s : schedule) {
        chain.retarget(s);
        const std::int64_t before = chain.proposals_made();
        std::int64_t accepted = 0;
        double cost_sum = 0.0;
        for (std::int64_t i = 0; i < per_step_sweeps; ++i) {
            accepted += chain.sweep(rng);
            const int c = chain.current_cost();
            cost_sum += c;
            if (c > out.best_cost) {
                out.best_cost = c;
                out.best_z = chain.worldline().z;
            }
        }
        out.trajectory.push_back({s, cost_sum / static_cast<double>(per_step_sweeps), out.best_cost,
                                  static_cast<double>(accepted) / static_cast<double>(chain.proposals_made() - before)});
    }
    return out;
}

RejectionResult rejection_sample(const CspInstance& instance, const PimcConfig& config, std::int64_t max_attempts,
                                 std::mt19937_64& rng, double log_bound) {
    config.validate();
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
    const double bound = std::isnan(log_bound) ? log_w_max(instance, config) : log_bound;
    const Index mask = dimension(instance.n()) - 1;
    Worldline w = initial_worldline(config.L);
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        w.z = rng() & mask;
        for (auto& x : w.x) x = rng() & mask;
        const double logw = transfer_weight(w, instance, config);
        if (logw > bound + 1e-12) throw std::logic_error("worldline weight exceeds the rejection bound");
        if (uniform01(rng) < std::exp(logw - bound)) return {w, attempt};
    }
    throw AttemptsExhausted("no worldline accepted in " + std::to_string(max_attempts) + " attempts");
}

StateVector adiabatic_evolve(const CspInstance& instance, double T, double dt) {
    check_dense(instance);
    if (!(T >= 0.0)) throw std::invalid_argument("T must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    auto psi = StateVector::uniform(instance.n());
    if (T == 0.0) return psi;
    const auto costs = cost_table(instance, kDenseQubitLimit);
    const auto steps = static_cast<std::int64_t>(std::ceil(T / dt - 1e-9));
    const double h = T / static_cast<double>(steps);

    // exp(-i H(s) h) ~ e^{i(1-s)B h/2} e^{i s C h} e^{i(1-s)B h/2}, s at the midpoint.
    auto strang = [&](double t0, double sub) {
        const double s = (t0 + 0.5 * sub) / T;
        psi.apply_mixer(-(1.0 - s) * sub / 2);
        psi.apply_cost_phase(costs, -s * sub);
        psi.apply_mixer(-(1.0 - s) * sub / 2);
    };
    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double w0 = -cbrt2 / (2.0 - cbrt2);
    for (std::int64_t j = 0; j < steps; ++j) {
        const double t = static_cast<double>(j) * h;
        strang(t, w1 * h);
        strang(t + w1 * h, w0 * h);
        strang(t + (w1 + w0) * h, w1 * h);
        const double norm = psi.normalize();
        if (std::abs(norm - 1.0) > 1e-8) {
            throw IntegratorInstability("norm drifted to " + std::to_string(norm) + " at step " + std::to_string(j));
        }
    }
    return psi;
}

double optimum_fidelity(const CspInstance& instance, const StateVector& psi) {
    if (psi.n() != instance.n()) throw std::invalid_argument("state and instance sizes differ");
    const auto costs = cost_table(instance, kDefaultQubitCeiling);
    const int best = *std::max_element(costs.begin(), costs.end());
    double mass = 0.0;
    for (Index z = 0; z < psi.size(); ++z) {
        if (costs[z] == best) mass += std::norm(psi.amplitude(z));
    }
    return mass;
}

AdiabaticSchedule find_adiabatic_time(const CspInstance& instance, double dt, double target, double T0, double max_T) {
    if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be > 0");
    AdiabaticSchedule out{T0, 0.0, 0};
    while (out.T <= max_T) {
        out.fidelity = optimum_fidelity(instance, adiabatic_evolve(instance, out.T, dt));
        if (out.fidelity >= target) return out;
        out.T *= 2.0;
        ++out.doublings;
    }
    throw AttemptsExhausted("fidelity target not reached by T = " + std::to_string(max_T));
}

}  // namespace qaoalab

#include "qaoalab/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qaoalab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce(double x, double period) {
    if (!std::isfinite(x)) throw std::invalid_argument("angle must be finite");
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

/// Golden-section maximization of f on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

Angles::Angles(std::vector<double> gammas, std::vector<double> betas)
    : gammas_(std::move(gammas)), betas_(std::move(betas)) {
    if (gammas_.empty() || gammas_.size() != betas_.size()) {
        throw std::invalid_argument("angles need equal-length gamma and beta lists with p >= 1");
    }
    for (auto& g : gammas_) g = reduce(g, kTwoPi);
    for (auto& b : betas_) b = reduce(b, std::numbers::pi);
}

Angles Angles::padded(int p) const {
    if (p < this->p()) throw std::invalid_argument("cannot pad angles to a smaller depth");
    auto g = gammas_;
    auto b = betas_;
    g.resize(static_cast<std::size_t>(p), 0.0);
    b.resize(static_cast<std::size_t>(p), 0.0);
    return Angles(std::move(g), std::move(b));
}

QaoaEvaluator::QaoaEvaluator(const CspInstance& instance, int ceiling)
    : n_(instance.n()), costs_(cost_table(instance, ceiling)) {}

StateVector QaoaEvaluator::state(const Angles& angles) const {
    auto psi = StateVector::uniform(n_);
    for (int layer = 0; layer < angles.p(); ++layer) {
        psi.apply_cost_phase(costs_, angles.gammas()[static_cast<std::size_t>(layer)]);
        psi.apply_mixer(angles.betas()[static_cast<std::size_t>(layer)]);
    }
    return psi;
}

double QaoaEvaluator::objective(const Angles& angles) const { return expectation_cost(state(angles), costs_); }

StateVector build_state(const CspInstance& instance, const Angles& angles) {
    return QaoaEvaluator(instance).state(angles);
}

double objective(const CspInstance& instance, const Angles& angles) {
    return QaoaEvaluator(instance).objective(angles);
}

QaoaOptimum grid_search(const CspInstance& instance, int resolution, int threads) {
    if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");
    threads = std::max(1, std::min(threads, resolution));
    const QaoaEvaluator eval(instance);
    const auto gamma_at = [&](int k) { return (kTwoPi * k) / resolution; };
    const auto beta_at = [&](int l) { return (std::numbers::pi * l) / resolution; };

    struct Best {
        int k = -1;
        int l = -1;
        double value = -1.0;
    };
    // Each worker scans a contiguous block of gamma rows; blocks are merged in
    // row order so the result does not depend on the thread count.
    std::vector<Best> best(static_cast<std::size_t>(threads));
    auto work = [&](int t) {
        const int k0 = resolution * t / threads;
        const int k1 = resolution * (t + 1) / threads;
        Best& b = best[static_cast<std::size_t>(t)];
        for (int k = k0; k < k1; ++k) {
            for (int l = 0; l < resolution; ++l) {
                const double v = eval.objective(Angles::single(gamma_at(k), beta_at(l)));
                if (v > b.value) b = {k, l, v};
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    Best overall;
    for (const auto& b : best) {
        if (b.k >= 0 && b.value > overall.value) overall = b;
    }
    return {Angles::single(gamma_at(overall.k), beta_at(overall.l)), overall.value, {}};
}

QaoaOptimum coordinate_optimize(const CspInstance& instance, int p, const Angles& init, int rounds) {
    if (rounds < 1) throw std::invalid_argument("coordinate_optimize needs rounds >= 1");
    if (p < 1) throw std::invalid_argument("depth p must be >= 1");
    const QaoaEvaluator eval(instance);
    const Angles start = init.padded(p);
    std::vector<double> x = start.gammas();
    x.insert(x.end(), start.betas().begin(), start.betas().end());
    const auto angles_of = [p](const std::vector<double>& v) {
        return Angles(std::vector<double>(v.begin(), v.begin() + p), std::vector<double>(v.begin() + p, v.end()));
    };
    double current = eval.objective(angles_of(x));
    std::vector<double> history;
    constexpr int kScan = 32;
    for (int round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double period = static_cast<int>(i) < p ? kTwoPi : std::numbers::pi;
            auto trial = x;
            auto f = [&](double t) {
                trial[i] = t;
                return eval.objective(angles_of(trial));
            };
            double best_t = x[i];
            double best_v = current;
            const double step = period / kScan;
            for (int s = 1; s < kScan; ++s) {
                const double t = x[i] + s * step;
                const double v = f(t);
                if (v > best_v) {
                    best_v = v;
                    best_t = t;
                }
            }
            auto [gt, gv] = golden_max(f, best_t - step, best_t + step, kGoldenTolerance);
            if (gv > best_v) {
                best_v = gv;
                best_t = gt;
            }
            if (best_v > current) {
                x[i] = best_t;
                current = best_v;
            }
        }
        history.push_back(current);
    }
    return {angles_of(x), current, std::move(history)};
}

std::vector<double> output_distribution(const CspInstance& instance, const Angles& angles) {
    return build_state(instance, angles).probabilities();
}

}  // namespace qaoalab

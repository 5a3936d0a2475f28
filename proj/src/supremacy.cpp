#include "qaoalab/supremacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "qaoalab/errors.hpp"

namespace qaoalab {
namespace {

Amplitude element_from_costs(int n, std::span<const int> costs, int r, int denominator) {
    const auto s = StateVector::uniform(n);
    auto psi = s;
    psi.apply_cost_phase(costs, 2.0 * std::numbers::pi * r / denominator);
    return inner_product(s, psi);
}

/// p_v = (1/R) sum_r e_r exp(+2 pi i r v / R), v = 0..R-1
std::vector<Amplitude> inverse_dft(const MatrixElementSeries& series) {
    const int R = static_cast<int>(series.samples.size());
    std::vector<Amplitude> p(static_cast<std::size_t>(R));
    for (int v = 0; v < R; ++v) {
        Amplitude acc{};
        for (int r = 0; r < R; ++r) {
            // r*v reduced mod R keeps the twiddle argument small.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(r) * v) % R) / R;
            acc += series.samples[static_cast<std::size_t>(r)] * std::polar(1.0, angle);
        }
        p[static_cast<std::size_t>(v)] = acc / static_cast<double>(R);
    }
    return p;
}

}  // namespace

Amplitude matrix_element(const CspInstance& instance, int r, int denominator) {
    if (denominator < 1) throw std::invalid_argument("denominator must be >= 1");
    return element_from_costs(instance.n(), cost_table(instance, kDefaultQubitCeiling), r, denominator);
}

MatrixElementSeries matrix_element_series(const CspInstance& instance, int threads) {
    const auto costs = cost_table(instance, kDefaultQubitCeiling);
    const int R = instance.m() + 1;
    MatrixElementSeries series{instance.n(), instance.m(), R, std::vector<Amplitude>(static_cast<std::size_t>(R))};
    threads = std::clamp(threads, 1, R);
    auto work = [&](int t) {
        for (int r = t; r < R; r += threads) {
            series.samples[static_cast<std::size_t>(r)] = element_from_costs(instance.n(), costs, r, R);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    return series;
}

CostHistogram recover_histogram(const MatrixElementSeries& series) {
    const int R = static_cast<int>(series.samples.size());
    if (R != series.denominator || R != series.m + 1) {
        throw std::invalid_argument("series must hold m+1 samples at denominator m+1");
    }
    const auto raw = inverse_dft(series);
    const double lattice = static_cast<double>(dimension(series.n));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(R));
    for (int v = 0; v < R; ++v) {
        const auto pv = raw[static_cast<std::size_t>(v)];
        if (std::abs(pv.imag()) > kRecoveryTolerance) {
            throw NonRealRecovery("recovered p_" + std::to_string(v) + " has imaginary part " + std::to_string(pv.imag()));
        }
        const double k = std::round(pv.real() * lattice);
        if (std::abs(pv.real() - k / lattice) > kRecoveryTolerance || k < 0) {
            throw NonRealRecovery("recovered p_" + std::to_string(v) + " = " + std::to_string(pv.real()) +
                                  " is not on the 2^-n lattice");
        }
        counts[static_cast<std::size_t>(v)] = static_cast<std::uint64_t>(k);
    }
    try {
        return CostHistogram(series.n, series.m, std::move(counts));
    } catch (const std::invalid_argument& e) {
        throw NonRealRecovery(std::string("recovered histogram inconsistent: ") + e.what());
    }
}

std::uint64_t fourier_count(const CspInstance& instance, int threads) {
    const auto series = matrix_element_series(instance, threads);
    const double scale = static_cast<double>(dimension(instance.n()));
    const double raw = inverse_dft(series)[static_cast<std::size_t>(instance.m())].real() * scale;
    if (std::abs(raw - std::round(raw)) > 1e-6 * scale) {
        throw RoundingFailure("p_m * 2^n = " + std::to_string(raw) + " is not near an integer");
    }
    return recover_histogram(series).count(instance.m());
}

PostSelectedPair postselect_distribution(std::span<const double> joint) {
    if (joint.size() < 2 || (joint.size() & (joint.size() - 1)) != 0) {
        throw std::invalid_argument("joint distribution must have 2^(n+1) entries");
    }
    double total = 0.0;
    for (double x : joint) {
        if (x < 0) throw std::invalid_argument("joint distribution has a negative entry");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("joint distribution does not sum to 1");
    const double mass = joint[0] + joint[1];
    if (mass <= 0.0) throw PostSelectionImpossible("no probability mass on z2 = 0^n");
    return {joint[0] / mass, joint[1] / mass};
}

BoundReport multiplicative_bound_check(std::span<const double> p, std::span<const double> q, double eps) {
    if (p.size() != q.size()) throw std::invalid_argument("p and q must have the same support");
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("eps must lie in (0, 1)");
    BoundReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        rep.max_violation = std::max(rep.max_violation, std::abs(p[i] - q[i]) - eps * q[i]);
        if (q[i] > 0) rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(p[i] / q[i] - 1.0));
    }
    // Absolute slack absorbs rounding in p = (1 +- eps) q at the edge of the ball.
    rep.bound_holds = rep.max_violation <= 1e-15;
    rep.p_post = postselect_distribution(p);
    rep.q_post = postselect_distribution(q);
    const double lo = (1.0 - eps) / (1.0 + eps);
    const double hi = (1.0 + eps) / (1.0 - eps);
    const double slack = 1e-12;
    auto within = [&](double pp, double qq) { return pp >= lo * qq - slack && pp <= hi * qq + slack; };
    rep.sandwich_holds = within(rep.p_post.p0, rep.q_post.p0) && within(rep.p_post.p1, rep.q_post.p1);
    rep.yes_case = rep.q_post.p1 >= 2.0 / 3.0;
    rep.no_case = rep.q_post.p1 <= 1.0 / 3.0;
    if (rep.yes_case) rep.threshold_holds = rep.p_post.p1 >= kYesThreshold;
    if (rep.no_case) rep.threshold_holds = rep.p_post.p1 <= kNoThreshold;
    return rep;
}

}  // namespace qaoalab

#include "qaoalab/statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "qaoalab/errors.hpp"

namespace qaoalab {
namespace {

constexpr double kUnitarityTolerance = 1e-12;
constexpr double kNormTolerance = 1e-10;

void check_ceiling(int n, int ceiling) {
    if (n < 0) throw std::invalid_argument("qubit count must be non-negative");
    if (n > ceiling) {
        throw LimitExceeded("state of " + std::to_string(n) + " qubits exceeds ceiling " + std::to_string(ceiling));
    }
}

}  // namespace

namespace gates {

Mat2 hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {{{r, r}, {r, -r}}};
}

Mat2 h_tilde() { return x_rotation(std::numbers::pi / 4); }

Mat2 x_rotation(double beta) {
    const Amplitude c{std::cos(beta), 0.0};
    const Amplitude s{0.0, -std::sin(beta)};
    return {{{c, s}, {s, c}}};
}

Mat2 diagonal(Amplitude d0, Amplitude d1) { return {{{d0, 0.0}, {0.0, d1}}}; }

Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    }
    return r;
}

Mat2 adjoint(const Mat2& a) {
    return {{{std::conj(a[0][0]), std::conj(a[1][0])}, {std::conj(a[0][1]), std::conj(a[1][1])}}};
}

}  // namespace gates

PostSelection PostSelection::all_zero(std::vector<int> qubits) {
    PostSelection sel;
    sel.targets.assign(qubits.size(), 0);
    sel.qubits = std::move(qubits);
    return sel;
}

StateVector StateVector::uniform(int n, int ceiling) {
    if (n < 1) throw std::invalid_argument("uniform state needs n >= 1");
    check_ceiling(n, ceiling);
    const Index dim = dimension(n);
    return StateVector(n, std::vector<Amplitude>(dim, Amplitude{1.0 / std::sqrt(static_cast<double>(dim)), 0.0}));
}

StateVector StateVector::basis(int n, Index z, int ceiling) {
    check_ceiling(n, ceiling);
    if (z >= dimension(n)) throw std::out_of_range("basis index outside state");
    std::vector<Amplitude> amps(dimension(n));
    amps[z] = 1.0;
    return StateVector(n, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps, int ceiling) {
    if (amps.empty() || (amps.size() & (amps.size() - 1)) != 0) {
        throw std::invalid_argument("amplitude count must be a power of two");
    }
    const int n = std::countr_zero(amps.size());
    check_ceiling(n, ceiling);
    double norm = 0.0;
    for (const auto& a : amps) norm += std::norm(a);
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw std::invalid_argument("amplitudes not normalized: |psi|^2 = " + std::to_string(norm));
    }
    return StateVector(n, std::move(amps));
}

Amplitude StateVector::amplitude(Index z) const {
    if (z >= amps_.size()) throw std::out_of_range("basis index outside state");
    return amps_[z];
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](const Amplitude& a) { return std::norm(a); });
    return p;
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double StateVector::normalize() {
    const double norm = std::sqrt(norm_squared());
    if (norm <= 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    for (auto& a : amps_) a /= norm;
    return norm;
}

void StateVector::check_qubit(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("qubit " + std::to_string(q) + " outside " + std::to_string(n_) + "-qubit state");
}

void StateVector::apply_single_qubit(int qubit, const Mat2& u) {
    check_qubit(qubit);
    const Mat2 prod = gates::multiply(gates::adjoint(u), u);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (std::abs(prod[i][j] - Amplitude(i == j ? 1.0 : 0.0)) > kUnitarityTolerance) {
                throw std::invalid_argument("single-qubit gate is not unitary");
            }
        }
    }
    const Index stride = Index{1} << qubit;
    const Index dim = amps_.size();
    for (Index base = 0; base < dim; base += 2 * stride) {
        for (Index off = 0; off < stride; ++off) {
            const Index i0 = base + off;
            const Index i1 = i0 + stride;
            const Amplitude a0 = amps_[i0];
            const Amplitude a1 = amps_[i1];
            amps_[i0] = u[0][0] * a0 + u[0][1] * a1;
            amps_[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

void StateVector::apply_cost_phase(const CspInstance& instance, double gamma) {
    if (instance.n() != n_) throw std::invalid_argument("instance width does not match state");
    apply_cost_phase(cost_table(instance, n_), gamma);
}

void StateVector::apply_cost_phase(std::span<const int> costs, double gamma) {
    if (costs.size() != amps_.size()) throw std::invalid_argument("cost table size does not match state");
    const int max_cost = costs.empty() ? 0 : *std::max_element(costs.begin(), costs.end());
    // Integer spectrum: one phase per distinct cost value.
    std::vector<Amplitude> phase(static_cast<std::size_t>(max_cost) + 1);
    for (std::size_t v = 0; v < phase.size(); ++v) phase[v] = std::polar(1.0, -gamma * static_cast<double>(v));
    for (Index z = 0; z < amps_.size(); ++z) amps_[z] *= phase[static_cast<std::size_t>(costs[z])];
}

void StateVector::apply_mixer(double beta) {
    const Mat2 rx = gates::x_rotation(beta);
    for (int q = 0; q < n_; ++q) apply_single_qubit(q, rx);
}

void StateVector::apply_diagonal(std::span<const int> qubits, std::span<const Amplitude> phases) {
    if (phases.size() != (std::size_t{1} << qubits.size())) {
        throw std::invalid_argument("diagonal needs 2^k phases for k qubits");
    }
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        check_qubit(qubits[j]);
        for (std::size_t i = 0; i < j; ++i) {
            if (qubits[i] == qubits[j]) throw std::invalid_argument("diagonal qubits must be distinct");
        }
    }
    for (const auto& ph : phases) {
        if (std::abs(std::abs(ph) - 1.0) > kUnitarityTolerance) throw std::invalid_argument("diagonal phase is not unit modulus");
    }
    for (Index z = 0; z < amps_.size(); ++z) {
        std::size_t r = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j) r |= static_cast<std::size_t>(bit(z, qubits[j])) << j;
        amps_[z] *= phases[r];
    }
}

void StateVector::apply_classical_xor(int target, const std::function<bool(Index)>& f) {
    check_qubit(target);
    const Index mask = Index{1} << target;
    for (Index z = 0; z < amps_.size(); ++z) {
        if (z & mask) continue;
        if (f(z)) std::swap(amps_[z], amps_[z | mask]);
    }
}

double StateVector::project(const PostSelection& sel) {
    if (sel.qubits.size() != sel.targets.size()) throw std::invalid_argument("post-selection qubits/targets size mismatch");
    Index mask = 0;
    Index want = 0;
    for (std::size_t j = 0; j < sel.qubits.size(); ++j) {
        check_qubit(sel.qubits[j]);
        const Index b = Index{1} << sel.qubits[j];
        if (mask & b) throw std::invalid_argument("post-selection qubits must be distinct");
        mask |= b;
        if (sel.targets[j] != 0 && sel.targets[j] != 1) throw std::invalid_argument("post-selection target must be 0 or 1");
        if (sel.targets[j]) want |= b;
    }
    double kept = 0.0;
    for (Index z = 0; z < amps_.size(); ++z) {
        if ((z & mask) == want) kept += std::norm(amps_[z]);
    }
    if (kept < kZeroProbability) {
        throw PostSelectionImpossible("post-selected branch has probability " + std::to_string(kept));
    }
    const double scale = 1.0 / std::sqrt(kept);
    for (Index z = 0; z < amps_.size(); ++z) amps_[z] = (z & mask) == want ? amps_[z] * scale : Amplitude{};
    return kept;
}

void StateVector::append_plus_qubit() {
    check_ceiling(n_ + 1, 63);
    const double r = 1.0 / std::numbers::sqrt2;
    const Index dim = amps_.size();
    amps_.resize(2 * dim);
    for (Index z = 0; z < dim; ++z) {
        amps_[z] *= r;
        amps_[z + dim] = amps_[z];
    }
    ++n_;
}

std::vector<Index> StateVector::sample(std::size_t shots, std::uint64_t seed) const {
    if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
    std::vector<double> cdf(amps_.size());
    double acc = 0.0;
    for (Index z = 0; z < amps_.size(); ++z) {
        acc += std::norm(amps_[z]);
        cdf[z] = acc;
    }
    std::mt19937_64 rng(seed);
    std::vector<Index> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        // 53-bit uniform in [0, 1), independent of the standard library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out.push_back(static_cast<Index>(it - cdf.begin()));
    }
    return out;
}

void StateVector::write_csv(std::ostream& out) const {
    out << "index,real,imag\n";
    out.precision(17);
    for (Index z = 0; z < amps_.size(); ++z) out << z << ',' << amps_[z].real() << ',' << amps_[z].imag() << '\n';
}

PostSelectResult postselect(const StateVector& state, const PostSelection& sel) {
    StateVector projected = state;
    const double probability = projected.project(sel);
    Index mask = 0;
    Index want = 0;
    for (std::size_t j = 0; j < sel.qubits.size(); ++j) {
        mask |= Index{1} << sel.qubits[j];
        if (sel.targets[j]) want |= Index{1} << sel.qubits[j];
    }
    std::vector<int> keep;
    for (int q = 0; q < state.n(); ++q) {
        if (!(mask >> q & 1u)) keep.push_back(q);
    }
    std::vector<Amplitude> reduced(dimension(static_cast<int>(keep.size())));
    for (Index r = 0; r < reduced.size(); ++r) {
        Index z = want;
        for (std::size_t j = 0; j < keep.size(); ++j) z |= static_cast<Index>(bit(r, static_cast<int>(j))) << keep[j];
        reduced[r] = projected.amplitude(z);
    }
    return {StateVector::from_amplitudes(std::move(reduced), 63), probability};
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
    if (a.n() != b.n()) throw std::invalid_argument("inner product of states with different qubit counts");
    Amplitude s{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t z = 0; z < x.size(); ++z) s += std::conj(x[z]) * y[z];
    return s;
}

double expectation_cost(const StateVector& state, const CspInstance& instance) {
    if (instance.n() != state.n()) throw std::invalid_argument("instance width does not match state");
    return expectation_cost(state, cost_table(instance, state.n()));
}

double expectation_cost(const StateVector& state, std::span<const int> costs) {
    if (costs.size() != state.size()) throw std::invalid_argument("cost table size does not match state");
    double e = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) e += std::norm(amps[z]) * costs[z];
    return e;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("total variation of distributions with different support");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace qaoalab

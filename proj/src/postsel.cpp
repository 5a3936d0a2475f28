#include "qaoalab/postsel.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qaoalab/errors.hpp"

namespace qaoalab {
namespace {

constexpr int kMaxOracleBits = kDefaultQubitCeiling - 2;  // padding bit + flag qubit

ThetaPair normalized(double c, double s) {
    const double r = std::hypot(c, s);
    if (r == 0.0) throw DegeneratePair("both pair coefficients vanish");
    return {c / r, s / r};
}

}  // namespace

MarkedOracle::MarkedOracle(int k, std::vector<Index> marked) : k_(k) {
    if (k < 1 || k > kMaxOracleBits) throw std::invalid_argument("oracle width must be 1.." + std::to_string(kMaxOracleBits));
    auto table = std::make_shared<std::vector<bool>>(dimension(k), false);
    for (Index z : marked) {
        if (z >= dimension(k)) throw std::out_of_range("marked item outside {0,1}^k");
        (*table)[z] = true;
    }
    f_ = [table](Index z) { return static_cast<bool>((*table)[z]); };
}

MarkedOracle::MarkedOracle(int k, std::function<bool(Index)> f) : k_(k), f_(std::move(f)) {
    if (k < 1 || k > kMaxOracleBits) throw std::invalid_argument("oracle width must be 1.." + std::to_string(kMaxOracleBits));
}

std::vector<Index> MarkedOracle::marked() const {
    std::vector<Index> out;
    for (Index z = 0; z < domain_size(); ++z) {
        if (f_(z)) out.push_back(z);
    }
    return out;
}

MarkedOracle read_oracle(std::istream& in) {
    std::string line;
    int line_no = 0;
    int k = -1;
    std::vector<Index> marked;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (k < 0) {
            if (tok != "oracle" || !(ls >> k) || k < 1) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": expected header 'oracle <k>'");
            }
            continue;
        }
        if (static_cast<int>(tok.size()) != k) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": marked item '" + tok + "' must have " +
                                        std::to_string(k) + " bits");
        }
        marked.push_back(parse_bitstring(tok));
    }
    if (k < 0) throw std::invalid_argument("missing 'oracle <k>' header");
    return MarkedOracle(k, std::move(marked));
}

MarkedOracle read_oracle_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path.string());
    return read_oracle(in);
}

std::vector<double> grover_one_call(const MarkedOracle& oracle) {
    const int k = oracle.k();
    auto psi = StateVector::basis(k + 1, 0);
    for (int q = 0; q < k; ++q) psi.apply_single_qubit(q, gates::hadamard());
    psi.apply_classical_xor(k, [&](Index z) { return oracle(z); });
    auto [reduced, probability] = postselect(psi, PostSelection{{k}, {1}});
    return reduced.probabilities();
}

ThetaPair phase_overlap_state(const MarkedOracle& oracle) {
    const int k = oracle.k();
    const Index reg_mask = dimension(k) - 1;
    auto psi = StateVector::uniform(k + 1);  // |s>|+>
    std::vector<int> all(static_cast<std::size_t>(k + 1));
    for (int q = 0; q <= k; ++q) all[static_cast<std::size_t>(q)] = q;
    std::vector<Amplitude> phases(dimension(k + 1));
    for (Index z = 0; z < phases.size(); ++z) {
        phases[z] = (bit(z, k) && oracle(z & reg_mask)) ? -1.0 : 1.0;
    }
    psi.apply_diagonal(all, phases);
    // Projecting the register onto |s> = H^k |0^k>.
    for (int q = 0; q < k; ++q) psi.apply_single_qubit(q, gates::hadamard());
    all.pop_back();
    auto [flag, probability] = postselect(psi, PostSelection::all_zero(all));
    flag.apply_single_qubit(0, gates::hadamard());
    const Amplitude a0 = flag.amplitude(0);
    const Amplitude a1 = flag.amplitude(1);
    if (std::abs(a0.imag()) > 1e-12 || std::abs(a1.imag()) > 1e-12 || a0.real() < -1e-12 || a1.real() < -1e-12) {
        throw std::logic_error("phase-overlap state is not a nonnegative real pair");
    }
    return normalized(std::max(0.0, a0.real()), std::max(0.0, a1.real()));
}

ThetaPair square_on_statevector(const ThetaPair& pair) {
    const auto p = normalized(pair.c, pair.s);
    auto psi = StateVector::from_amplitudes({p.c * p.c, p.s * p.c, p.c * p.s, p.s * p.s});
    psi.apply_classical_xor(1, [](Index z) { return bit(z, 0) == 1; });
    auto [out, probability] = postselect(psi, PostSelection{{1}, {0}});
    return {out.amplitude(0).real(), out.amplitude(1).real()};
}

ThetaPair amplify(const ThetaPair& pair, int k_steps) {
    if (k_steps < 0) throw std::invalid_argument("amplification steps must be >= 0");
    if (pair.c < 0 || pair.s < 0) throw std::invalid_argument("pair coefficients must be nonnegative");
    const auto p = normalized(pair.c, pair.s);
    if (k_steps == 0) return p;

    const auto direct = square_on_statevector(p);
    const auto analytic = normalized(p.c * p.c, p.s * p.s);
    if (std::abs(direct.c - analytic.c) > 1e-10 || std::abs(direct.s - analytic.s) > 1e-10) {
        throw std::logic_error("state-vector squaring step disagrees with the analytic pair update");
    }

    // log(s'/c') = 2^k log(s/c); 2^k may overflow to inf, which saturates cleanly.
    const double log_ratio = std::log(p.s) - std::log(p.c);
    if (log_ratio == 0.0) return p;
    const double scaled = std::ldexp(log_ratio, k_steps);
    const double ratio = std::exp(-std::abs(scaled));  // minority / majority, in [0, 1]
    const double major = 1.0 / std::sqrt(1.0 + ratio * ratio);
    return scaled < 0 ? ThetaPair{major, ratio * major} : ThetaPair{ratio * major, major};
}

ThresholdOutcome threshold_test(const MarkedOracle& oracle, Index threshold) {
    const Index N = oracle.domain_size();
    if (threshold >= N) throw std::invalid_argument("threshold must satisfy 0 <= T < N");
    const int k = oracle.k();
    const Index extra = N - threshold;
    // Upper half of the padded domain carries N - T synthetic marked items.
    const MarkedOracle padded(k + 1, [&oracle, k, extra](Index z) {
        const Index low = z & (dimension(k) - 1);
        return bit(z, k) ? low < extra : oracle(low);
    });
    const int steps = (k + 1) + 4;  // ceil(log2 N') + 4
    const auto amplified = amplify(phase_overlap_state(padded), steps);
    ThresholdOutcome out{Threshold::LessOrEqual, Threshold::LessOrEqual, amplified, steps};
    if (std::abs(amplified.c - amplified.s) <= kBalanceTolerance) {
        out.raw = Threshold::EqualBoundary;
    } else if (amplified.s > amplified.c) {
        out.raw = Threshold::Greater;
        out.decision = Threshold::Greater;
    }
    return out;
}

Index count_marked(const MarkedOracle& oracle, int* tests_used) {
    Index lo = 0;
    Index hi = oracle.domain_size();
    int tests = 0;
    // Smallest T with M <= T.
    while (lo < hi) {
        const Index mid = lo + (hi - lo) / 2;
        ++tests;
        if (threshold_test(oracle, mid).decision == Threshold::LessOrEqual) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if (tests_used) *tests_used = tests;
    return lo;
}

}  // namespace qaoalab

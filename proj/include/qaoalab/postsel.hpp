#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "qaoalab/bits.hpp"
#include "qaoalab/statevec.hpp"

namespace qaoalab {

/// Membership oracle f over {0,1}^k. Protocol code only calls f(); the
/// marked set itself is reachable for test oracles through marked().
class MarkedOracle {
  public:
    MarkedOracle(int k, std::vector<Index> marked);
    /// Oracle defined by a predicate (e.g. a synthetic padded oracle).
    MarkedOracle(int k, std::function<bool(Index)> f);

    int k() const { return k_; }
    Index domain_size() const { return dimension(k_); }
    bool operator()(Index z) const { return f_(z); }
    std::vector<Index> marked() const;

  private:
    int k_;
    std::function<bool(Index)> f_;
};

/// "oracle <k>" header, then one marked k-bit string per line ('#' comments).
MarkedOracle read_oracle(std::istream& in);
MarkedOracle read_oracle_file(const std::filesystem::path& path);

/// cos(theta)|0> + sin(theta)|1>
struct ThetaPair {
    double c;
    double s;
};

/// Post-select the f(z) flag register to 1: uniform distribution over the marked set.
std::vector<double> grover_one_call(const MarkedOracle& oracle);

/// |s>|+>, phase (-1)^(f (x) |1><1|), post-select the first register on |s>,
/// Hadamard the flag: tan(theta) = M / (N - M).
ThetaPair phase_overlap_state(const MarkedOracle& oracle);

/// One squaring step on two copies of the pair, run on a state vector:
/// CNOT then post-select the target on 0 (= projecting onto span{|00>,|11>}
/// followed by CNOT and discarding the copy).
ThetaPair square_on_statevector(const ThetaPair& pair);

/// Normalized (c^(2^k), s^(2^k)), tracked in log-magnitude.
ThetaPair amplify(const ThetaPair& pair, int k_steps);

enum class Threshold { Greater, LessOrEqual, EqualBoundary };

struct ThresholdOutcome {
    Threshold raw;        // as detected on the amplified padded pair
    Threshold decision;   // EqualBoundary mapped to LessOrEqual
    ThetaPair amplified;
    int steps;
};

inline constexpr double kBalanceTolerance = 1e-6;

/// Decides M > T vs M <= T by padding the domain to 2N with N - T synthetic
/// marked items, so the question becomes M' > N'/2.
ThresholdOutcome threshold_test(const MarkedOracle& oracle, Index threshold);

/// Binary search over T in [0, N] using threshold_test.
Index count_marked(const MarkedOracle& oracle, int* tests_used = nullptr);

}  // namespace qaoalab

#pragma once

#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "qaoalab/csp.hpp"
#include "qaoalab/statevec.hpp"

namespace qaoalab {

// Compilation of {H, exp(i pi/8 Z), controlled-phase} circuits into
// post-selected p=1 QAOA form
//
//     Htilde^{(x)N} exp(-i pi/4 C) H^{(x)N} |0^N>, then post-select,
//
// where every internal Hadamard is replaced by an auxiliary-qubit gadget.

enum class GateKind { H, PhaseT, CPhase };

struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;

    static Gate h(int q) { return {GateKind::H, q, -1}; }
    /// exp(i pi/8 sigma_z)
    static Gate t(int q) { return {GateKind::PhaseT, q, -1}; }
    /// exp(-i pi/4 (I - Z1)(I - Z2)) = diag(1, 1, 1, -1)
    static Gate cphase(int a, int b) { return {GateKind::CPhase, a, b}; }

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Input state is |0^n>. `postselect` lists logical qubits conditioned on 0
/// at the end (PostBQP-style inputs); usually empty.
struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
    std::vector<int> postselect;

    void validate() const;
};

// Circuit text format:
//   circuit <n>
//   h <q> | t <q> | cp <q1> <q2>     (one gate per line, time order)
//   post <q> 0                       (optional, after all gates)
Circuit read_circuit(std::istream& in);
Circuit read_circuit_file(const std::filesystem::path& path);
void write_circuit(std::ostream& out, const Circuit& circuit);

Circuit random_circuit(int n, int gate_count, std::mt19937_64& rng);

/// Gate-by-gate state (post-selected and renormalized when the circuit has post lines).
StateVector simulate_circuit_state(const Circuit& circuit);
/// |amp|^2 of simulate_circuit_state.
std::vector<double> simulate_circuit(const Circuit& circuit);

inline constexpr double kCompiledGamma = std::numbers::pi / 4;

struct GateClauses {
    std::vector<Clause> clauses;
    Amplitude phase;  // gate = phase * exp(-i pi/4 sum clauses)
};

/// PhaseT(q) -> [z_q = 1] once, phase e^{i pi/8}; CPhase -> [11 on (q1, q2)] x4.
GateClauses gate_to_clauses(const Gate& gate);

/// exp(-i pi/4 (6 |01><01| + 2 |11><11|)) over the ordered pair (aux, j):
/// diag(1, i, 1, -i) with aux as the high-order factor.
std::vector<Clause> gadget_clauses(int aux, int j);

struct CompiledQaoa {
    int n_logical;
    int n_total;  // logical + auxiliary
    CspInstance cost;
    PostSelection postselect;      // gadget qubits and user post-selections, all to 0
    std::vector<int> output_map;   // logical qubit -> physical qubit holding it at the end
    Amplitude global_phase;        // original = global_phase * compiled (after post-selection)
    int aux_count;
};

CompiledQaoa compile(const Circuit& circuit);

enum class Schedule {
    /// Literal three-layer form on all n_total qubits.
    Layered,
    /// Same operator with commuting factors reordered: auxiliaries enter when
    /// first touched and gadget qubits are measured right after their last
    /// clause, so at most n_logical + 1 qubits are live.
    Streaming,
};

/// Post-selected normalized state over the logical qubits (user-post-selected
/// qubits read 0).
StateVector compiled_output_state(const CompiledQaoa& compiled, Schedule schedule = Schedule::Streaming);
std::vector<double> simulate_compiled(const CompiledQaoa& compiled, Schedule schedule = Schedule::Streaming);

struct EquivalenceReport {
    double max_pointwise_deviation;
    double total_variation;
    /// max |psi_orig - global_phase * psi_compiled|
    double amplitude_deviation;
    /// Same after fitting the single best phase instead of the tracked one.
    double amplitude_deviation_free_phase;
    double tolerance;
    bool passed;
};

EquivalenceReport verify_equivalence(const Circuit& circuit, const CompiledQaoa& compiled, double tolerance,
                                     Schedule schedule = Schedule::Streaming);

/// JSON sidecar: n_total, postselect, output_map, global_phase.
std::string compiled_sidecar_json(const CompiledQaoa& compiled);

}  // namespace qaoalab

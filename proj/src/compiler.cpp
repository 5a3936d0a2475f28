#include "qaoalab/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qaoalab/errors.hpp"

namespace qaoalab {
namespace {

const Amplitude kI{0.0, 1.0};

Amplitude unit(double angle) { return std::polar(1.0, angle); }

/// Phases of exp(-i pi/4 [clause]) on the clause's own variables.
std::vector<Amplitude> clause_phases(const Clause& clause) {
    std::vector<Amplitude> ph(std::size_t{1} << clause.arity(), 1.0);
    for (std::size_t r = 0; r < ph.size(); ++r) {
        if (clause.satisfied_by_pattern(static_cast<std::uint8_t>(r))) ph[r] = unit(-kCompiledGamma);
    }
    return ph;
}

/// Re-indexes a state whose qubit i is physical slot_phys[i] onto the logical
/// order given by output_map.
StateVector to_logical(const StateVector& psi, const std::vector<int>& slot_phys, const std::vector<int>& output_map) {
    const int n = static_cast<int>(output_map.size());
    std::vector<int> logical_of_slot(slot_phys.size(), -1);
    for (std::size_t s = 0; s < slot_phys.size(); ++s) {
        for (int q = 0; q < n; ++q) {
            if (output_map[static_cast<std::size_t>(q)] == slot_phys[s]) logical_of_slot[s] = q;
        }
        if (logical_of_slot[s] < 0) throw std::logic_error("live qubit is not an output qubit");
    }
    std::vector<Amplitude> out(dimension(n));
    for (Index z = 0; z < psi.size(); ++z) {
        Index y = 0;
        for (std::size_t s = 0; s < slot_phys.size(); ++s) {
            y |= static_cast<Index>(bit(z, static_cast<int>(s))) << logical_of_slot[s];
        }
        out[y] = psi.amplitude(z);
    }
    return StateVector::from_amplitudes(std::move(out), 63);
}

/// Builder for the compiled clause list; tracks where each logical wire lives.
class Compilation {
  public:
    explicit Compilation(int n) : n_total_(n), phys_(static_cast<std::size_t>(n)), started_(static_cast<std::size_t>(n), false),
          pending_(static_cast<std::size_t>(n), false) {
        for (int q = 0; q < n; ++q) phys_[static_cast<std::size_t>(q)] = q;
    }

    /// Internal Hadamards wait until the wire is next touched, so an adjacent
    /// H.H pair cancels instead of costing two gadgets.
    void hadamard(int q) {
        if (!started_[static_cast<std::size_t>(q)]) {
            started_[static_cast<std::size_t>(q)] = true;  // absorbed into the initial H layer
            return;
        }
        pending_[static_cast<std::size_t>(q)] = !pending_[static_cast<std::size_t>(q)];
    }

    void diagonal(const Gate& g) {
        begin(g.q0);
        if (g.kind == GateKind::CPhase) begin(g.q1);
        Gate physical = g;
        physical.q0 = phys_[static_cast<std::size_t>(g.q0)];
        if (g.kind == GateKind::CPhase) physical.q1 = phys_[static_cast<std::size_t>(g.q1)];
        auto gc = gate_to_clauses(physical);
        for (auto& c : gc.clauses) clauses_.push_back(std::move(c));
        phase_ *= gc.phase;
    }

    /// exp(i pi/4 sigma_z) = e^{i pi/4} exp(-i pi/4 * 2 [z=1])
    void s_plus(int q) {
        begin(q);
        const int p = phys_[static_cast<std::size_t>(q)];
        clauses_.push_back(Clause::literal(p, 1));
        clauses_.push_back(Clause::literal(p, 1));
        phase_ *= unit(std::numbers::pi / 4);
    }

    /// Htilde^dagger = H exp(i pi/4 sigma_z) H, so the final Htilde layer cancels it.
    void close(int q) {
        hadamard(q);
        s_plus(q);
        hadamard(q);
    }

    CompiledQaoa finish(int n, const std::vector<int>& user_post) {
        for (int q = 0; q < n; ++q) flush(q);
        PostSelection sel = PostSelection::all_zero(gadget_qubits_);
        for (int q : user_post) {
            sel.qubits.push_back(phys_[static_cast<std::size_t>(q)]);
            sel.targets.push_back(0);
        }
        return CompiledQaoa{n,
                            n_total_,
                            CspInstance(n_total_, std::move(clauses_)),
                            std::move(sel),
                            phys_,
                            phase_,
                            n_total_ - n};
    }

  private:
    /// A wire first hit by a diagonal gets H.H in front: one H joins the
    /// initial layer, the other is internal.
    void begin(int q) {
        if (!started_[static_cast<std::size_t>(q)]) {
            started_[static_cast<std::size_t>(q)] = true;
            hadamard(q);
        }
        flush(q);
    }

    void flush(int q) {
        if (!pending_[static_cast<std::size_t>(q)]) return;
        pending_[static_cast<std::size_t>(q)] = false;
        const int j = phys_[static_cast<std::size_t>(q)];
        const int aux = n_total_++;
        for (auto& c : gadget_clauses(aux, j)) clauses_.push_back(std::move(c));
        gadget_qubits_.push_back(j);
        phys_[static_cast<std::size_t>(q)] = aux;
    }

    int n_total_;
    std::vector<int> phys_;
    std::vector<bool> started_;
    std::vector<bool> pending_;
    std::vector<Clause> clauses_;
    std::vector<int> gadget_qubits_;
    Amplitude phase_{1.0, 0.0};
};

}  // namespace

void Circuit::validate() const {
    if (n < 1) throw std::invalid_argument("circuit needs n >= 1");
    auto check = [this](int q) {
        if (q < 0 || q >= n) throw std::out_of_range("gate qubit " + std::to_string(q) + " outside circuit of " + std::to_string(n));
    };
    for (const auto& g : gates) {
        check(g.q0);
        if (g.kind == GateKind::CPhase) {
            check(g.q1);
            if (g.q0 == g.q1) throw std::invalid_argument("controlled-phase needs two distinct qubits");
        }
    }
    for (std::size_t i = 0; i < postselect.size(); ++i) {
        check(postselect[i]);
        for (std::size_t j = 0; j < i; ++j) {
            if (postselect[i] == postselect[j]) throw std::invalid_argument("qubit post-selected twice");
        }
    }
}

Circuit read_circuit(std::istream& in) {
    Circuit c;
    std::string line;
    int line_no = 0;
    bool header = false;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) continue;
        if (!header) {
            if (op != "circuit" || !(ls >> c.n) || c.n < 1) fail("expected header 'circuit <n>'");
            header = true;
            continue;
        }
        int a = 0;
        int b = 0;
        if (op == "h" || op == "t") {
            if (!c.postselect.empty()) fail("gate after post-selection lines");
            if (!(ls >> a)) fail("missing qubit index");
            c.gates.push_back(op == "h" ? Gate::h(a) : Gate::t(a));
        } else if (op == "cp") {
            if (!c.postselect.empty()) fail("gate after post-selection lines");
            if (!(ls >> a >> b)) fail("cp needs two qubit indices");
            c.gates.push_back(Gate::cphase(a, b));
        } else if (op == "post") {
            if (!(ls >> a >> b) || b != 0) fail("expected 'post <q> 0'");
            c.postselect.push_back(a);
        } else {
            fail("unknown gate '" + op + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing text '" + extra + "'");
    }
    if (!header) throw std::invalid_argument("missing 'circuit <n>' header");
    c.validate();
    return c;
}

Circuit read_circuit_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path.string());
    return read_circuit(in);
}

void write_circuit(std::ostream& out, const Circuit& circuit) {
    out << "circuit " << circuit.n << '\n';
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::H: out << "h " << g.q0 << '\n'; break;
            case GateKind::PhaseT: out << "t " << g.q0 << '\n'; break;
            case GateKind::CPhase: out << "cp " << g.q0 << ' ' << g.q1 << '\n'; break;
        }
    }
    for (int q : circuit.postselect) out << "post " << q << " 0\n";
}

Circuit random_circuit(int n, int gate_count, std::mt19937_64& rng) {
    Circuit c;
    c.n = n;
    std::uniform_int_distribution<int> kind(n >= 2 ? 0 : 0, n >= 2 ? 2 : 1);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    for (int i = 0; i < gate_count; ++i) {
        switch (kind(rng)) {
            case 0: c.gates.push_back(Gate::h(qubit(rng))); break;
            case 1: c.gates.push_back(Gate::t(qubit(rng))); break;
            default: {
                const int a = qubit(rng);
                int b = qubit(rng);
                while (b == a) b = qubit(rng);
                c.gates.push_back(Gate::cphase(a, b));
            }
        }
    }
    c.validate();
    return c;
}

StateVector simulate_circuit_state(const Circuit& circuit) {
    circuit.validate();
    auto psi = StateVector::basis(circuit.n, 0);
    const Mat2 h = gates::hadamard();
    const Mat2 t = gates::diagonal(unit(std::numbers::pi / 8), unit(-std::numbers::pi / 8));
    const std::vector<Amplitude> cz{1.0, 1.0, 1.0, -1.0};
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::H: psi.apply_single_qubit(g.q0, h); break;
            case GateKind::PhaseT: psi.apply_single_qubit(g.q0, t); break;
            case GateKind::CPhase: {
                const int qs[2] = {g.q0, g.q1};
                psi.apply_diagonal(qs, cz);
                break;
            }
        }
    }
    if (!circuit.postselect.empty()) psi.project(PostSelection::all_zero(circuit.postselect));
    return psi;
}

std::vector<double> simulate_circuit(const Circuit& circuit) { return simulate_circuit_state(circuit).probabilities(); }

GateClauses gate_to_clauses(const Gate& gate) {
    switch (gate.kind) {
        case GateKind::PhaseT:
            return {{Clause::literal(gate.q0, 1)}, unit(std::numbers::pi / 8)};
        case GateKind::CPhase: {
            const auto c = Clause::pattern2(gate.q0, gate.q1, 1, 1);
            return {{c, c, c, c}, 1.0};
        }
        case GateKind::H:
            break;
    }
    throw std::invalid_argument("Hadamard has no clause form");
}

std::vector<Clause> gadget_clauses(int aux, int j) {
    if (aux == j) throw std::invalid_argument("gadget needs distinct auxiliary and target qubits");
    std::vector<Clause> out;
    const auto p01 = Clause::pattern2(aux, j, 0, 1);
    const auto p11 = Clause::pattern2(aux, j, 1, 1);
    out.insert(out.end(), 6, p01);
    out.insert(out.end(), 2, p11);
    return out;
}

CompiledQaoa compile(const Circuit& circuit) {
    circuit.validate();
    Compilation build(circuit.n);
    for (const auto& g : circuit.gates) {
        if (g.kind == GateKind::H) {
            build.hadamard(g.q0);
        } else {
            build.diagonal(g);
        }
    }
    for (int q = 0; q < circuit.n; ++q) build.close(q);
    return build.finish(circuit.n, circuit.postselect);
}

StateVector compiled_output_state(const CompiledQaoa& compiled, Schedule schedule) {
    const auto& outputs = compiled.output_map;
    std::vector<bool> is_output(static_cast<std::size_t>(compiled.n_total), false);
    for (int p : outputs) is_output[static_cast<std::size_t>(p)] = true;
    std::vector<int> gadget;
    std::vector<int> user;
    for (int p : compiled.postselect.qubits) (is_output[static_cast<std::size_t>(p)] ? user : gadget).push_back(p);
    const Mat2 ht = gates::h_tilde();

    if (schedule == Schedule::Layered) {
        auto psi = StateVector::uniform(compiled.n_total);
        psi.apply_cost_phase(compiled.cost, kCompiledGamma);
        for (int q = 0; q < compiled.n_total; ++q) psi.apply_single_qubit(q, ht);
        auto reduced = postselect(psi, PostSelection::all_zero(gadget)).state;
        std::vector<int> slots;
        for (int p = 0; p < compiled.n_total; ++p) {
            if (is_output[static_cast<std::size_t>(p)]) slots.push_back(p);
        }
        auto out = to_logical(reduced, slots, outputs);
        std::vector<int> user_logical;
        for (int q = 0; q < compiled.n_logical; ++q) {
            if (std::find(user.begin(), user.end(), outputs[static_cast<std::size_t>(q)]) != user.end()) user_logical.push_back(q);
        }
        if (!user_logical.empty()) out.project(PostSelection::all_zero(user_logical));
        return out;
    }

    // Streaming schedule.
    const auto& clauses = compiled.cost.clauses();
    std::vector<int> last_use(static_cast<std::size_t>(compiled.n_total), -1);
    for (std::size_t a = 0; a < clauses.size(); ++a) {
        for (int v : clauses[a].vars()) last_use[static_cast<std::size_t>(v)] = static_cast<int>(a);
    }
    std::vector<bool> is_gadget(static_cast<std::size_t>(compiled.n_total), false);
    for (int p : gadget) is_gadget[static_cast<std::size_t>(p)] = true;

    auto psi = StateVector::from_amplitudes({1.0}, 63);
    std::vector<int> slot_phys;
    auto slot_of = [&](int p) {
        auto it = std::find(slot_phys.begin(), slot_phys.end(), p);
        return it == slot_phys.end() ? -1 : static_cast<int>(it - slot_phys.begin());
    };
    auto bring_in = [&](int p) {
        if (slot_of(p) >= 0) return;
        if (psi.n() + 1 > kDefaultQubitCeiling) throw LimitExceeded("too many live qubits in streaming schedule");
        psi.append_plus_qubit();
        slot_phys.push_back(p);
    };
    auto measure_out = [&](int p) {
        const int s = slot_of(p);
        psi.apply_single_qubit(s, ht);
        psi = postselect(psi, PostSelection{{s}, {0}}).state;
        slot_phys.erase(slot_phys.begin() + s);
    };

    for (std::size_t a = 0; a < clauses.size(); ++a) {
        const auto& clause = clauses[a];
        std::vector<int> slots;
        for (int v : clause.vars()) {
            bring_in(v);
            slots.push_back(slot_of(v));
        }
        psi.apply_diagonal(slots, clause_phases(clause));
        for (int v : clause.vars()) {
            if (is_gadget[static_cast<std::size_t>(v)] && last_use[static_cast<std::size_t>(v)] == static_cast<int>(a)) {
                measure_out(v);
            }
        }
    }
    for (int p = 0; p < compiled.n_total; ++p) {
        if (last_use[static_cast<std::size_t>(p)] >= 0) continue;
        bring_in(p);
        if (is_gadget[static_cast<std::size_t>(p)]) measure_out(p);
    }
    for (std::size_t s = 0; s < slot_phys.size(); ++s) psi.apply_single_qubit(static_cast<int>(s), ht);
    auto out = to_logical(psi, slot_phys, outputs);
    std::vector<int> user_logical;
    for (int q = 0; q < compiled.n_logical; ++q) {
        if (std::find(user.begin(), user.end(), outputs[static_cast<std::size_t>(q)]) != user.end()) user_logical.push_back(q);
    }
    if (!user_logical.empty()) out.project(PostSelection::all_zero(user_logical));
    return out;
}

std::vector<double> simulate_compiled(const CompiledQaoa& compiled, Schedule schedule) {
    return compiled_output_state(compiled, schedule).probabilities();
}

EquivalenceReport verify_equivalence(const Circuit& circuit, const CompiledQaoa& compiled, double tolerance,
                                     Schedule schedule) {
    const auto orig = simulate_circuit_state(circuit);
    const auto comp = compiled_output_state(compiled, schedule);
    if (orig.n() != comp.n()) throw std::invalid_argument("compiled output width differs from the circuit");
    EquivalenceReport rep{0.0, 0.0, 0.0, 0.0, tolerance, false};
    const auto p = orig.probabilities();
    const auto q = comp.probabilities();
    for (std::size_t z = 0; z < p.size(); ++z) rep.max_pointwise_deviation = std::max(rep.max_pointwise_deviation, std::abs(p[z] - q[z]));
    rep.total_variation = total_variation(p, q);
    const Amplitude overlap = inner_product(comp, orig);
    const Amplitude fitted = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Amplitude{1.0};
    for (Index z = 0; z < orig.size(); ++z) {
        rep.amplitude_deviation = std::max(rep.amplitude_deviation, std::abs(orig.amplitude(z) - compiled.global_phase * comp.amplitude(z)));
        rep.amplitude_deviation_free_phase = std::max(rep.amplitude_deviation_free_phase, std::abs(orig.amplitude(z) - fitted * comp.amplitude(z)));
    }
    rep.passed = rep.total_variation <= tolerance && rep.max_pointwise_deviation <= tolerance &&
                 rep.amplitude_deviation <= tolerance;
    return rep;
}

std::string compiled_sidecar_json(const CompiledQaoa& compiled) {
    nlohmann::json j;
    j["n_logical"] = compiled.n_logical;
    j["n_total"] = compiled.n_total;
    j["aux_count"] = compiled.aux_count;
    j["gamma"] = kCompiledGamma;
    j["postselect"] = compiled.postselect.qubits;
    j["output_map"] = compiled.output_map;
    j["global_phase"] = {{"re", compiled.global_phase.real()}, {"im", compiled.global_phase.imag()}};
    return j.dump(2);
}

}  // namespace qaoalab

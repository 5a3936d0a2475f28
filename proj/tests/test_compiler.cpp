#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "qaoalab/compiler.hpp"
#include "qaoalab/errors.hpp"

using namespace qaoalab;
using cd = std::complex<double>;

namespace {

Circuit parse(const std::string& text) {
    std::istringstream in(text);
    return read_circuit(in);
}

/// Diagonal of exp(-i pi/4 sum clauses) over `vars` (first listed = low bit).
std::vector<cd> clause_diagonal(const std::vector<Clause>& clauses, std::vector<int> vars) {
    std::vector<cd> d(std::size_t{1} << vars.size());
    for (Index r = 0; r < d.size(); ++r) {
        Index z = 0;
        for (std::size_t i = 0; i < vars.size(); ++i) z |= static_cast<Index>(bit(r, static_cast<int>(i))) << vars[i];
        int count = 0;
        for (const auto& c : clauses) count += evaluate_clause(c, z, 8);
        d[r] = std::polar(1.0, -std::numbers::pi / 4 * count);
    }
    return d;
}

}  // namespace

TEST(compiler, simulate_examples) {
    const auto hh = simulate_circuit(parse("circuit 1\nh 0\nh 0\n"));
    EXPECT_NEAR(hh[0], 1.0, 1e-12);
    const auto h = simulate_circuit(parse("circuit 1\nh 0\n"));
    EXPECT_NEAR(h[0], 0.5, 1e-12);
    EXPECT_NEAR(h[1], 0.5, 1e-12);
    // H T H: |<0|H T H|0>|^2 = cos^2(pi/8)
    const auto hth = simulate_circuit(parse("circuit 1\nh 0\nt 0\nh 0\n"));
    EXPECT_NEAR(hth[0], std::pow(std::cos(std::numbers::pi / 8), 2), 1e-12);
    // H H CP H H on two qubits acts as the identity on |00>.
    const auto cz = simulate_circuit_state(parse("circuit 2\nh 0\nh 1\ncp 0 1\nh 0\nh 1\n"));
    EXPECT_NEAR(std::abs(cz.amplitude(0)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(cz.amplitude(3)), 0.5, 1e-12);
}

TEST(compiler, gate_clauses_reproduce_gates) {
    const auto t = gate_to_clauses(Gate::t(0));
    const auto dt = clause_diagonal(t.clauses, {0});
    EXPECT_NEAR(std::abs(t.phase * dt[0] - std::polar(1.0, std::numbers::pi / 8)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(t.phase * dt[1] - std::polar(1.0, -std::numbers::pi / 8)), 0.0, 1e-12);

    const auto cp = gate_to_clauses(Gate::cphase(0, 1));
    EXPECT_EQ(cp.clauses.size(), 4u);
    const auto dc = clause_diagonal(cp.clauses, {0, 1});
    const cd expected[] = {1.0, 1.0, 1.0, -1.0};
    for (int r = 0; r < 4; ++r) EXPECT_NEAR(std::abs(cp.phase * dc[static_cast<std::size_t>(r)] - expected[r]), 0.0, 1e-12);

    EXPECT_THROW(gate_to_clauses(Gate::h(0)), std::invalid_argument);
}

TEST(compiler, gadget_diagonal) {
    const auto g = gadget_clauses(1, 0);
    EXPECT_EQ(g.size(), 8u);
    // Index r = j + 2 aux.
    const auto d = clause_diagonal(g, {0, 1});
    const cd expected[] = {1.0, cd(0, 1), 1.0, cd(0, -1)};
    for (int r = 0; r < 4; ++r) EXPECT_NEAR(std::abs(d[static_cast<std::size_t>(r)] - expected[r]), 0.0, 1e-12);
    // Squared: diag(1, -1, 1, -1) = Z on j.
    auto twice = g;
    twice.insert(twice.end(), g.begin(), g.end());
    const auto d2 = clause_diagonal(twice, {0, 1});
    const cd z_on_j[] = {1.0, -1.0, 1.0, -1.0};
    for (int r = 0; r < 4; ++r) EXPECT_NEAR(std::abs(d2[static_cast<std::size_t>(r)] - z_on_j[r]), 0.0, 1e-12);
    EXPECT_THROW(gadget_clauses(2, 2), std::invalid_argument);
}

TEST(compiler, gadget_local_correctness) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto alpha = oracles::random_state(1 + trial % 4, rng);
        EXPECT_LE(oracles::gadget_deviation(alpha, true), 1e-12);
    }
}

TEST(compiler, gadget_reversed_order_fails) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto alpha = oracles::random_state(1 + trial % 3, rng);
        EXPECT_GT(oracles::gadget_deviation(alpha, false), 1e-3);
    }
}

TEST(compiler, gadget_branch_has_mass) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto psi = oracles::random_state(2, rng);
        psi.append_plus_qubit();
        const int pair[] = {0, 2};
        const cd table[] = {1.0, cd(0, 1), 1.0, cd(0, -1)};
        psi.apply_diagonal(pair, table);
        psi.apply_single_qubit(0, gates::h_tilde());
        EXPECT_NEAR(postselect(psi, PostSelection{{0}, {0}}).probability, 0.5, 1e-12);
    }
}

TEST(compiler, compile_single_internal_h) {
    const auto c = compile(parse("circuit 1\nh 0\nt 0\nh 0\n"));
    EXPECT_EQ(c.n_total, 2);
    EXPECT_EQ(c.aux_count, 1);
    EXPECT_EQ(c.postselect.qubits, (std::vector<int>{0}));
    EXPECT_EQ(c.output_map, (std::vector<int>{1}));
}

TEST(compiler, compile_h_layer_then_diagonals) {
    // Each wire still needs the closing H . S' . H, whose last H becomes a gadget.
    const auto circuit = parse("circuit 3\nh 0\nh 1\nh 2\ncp 0 1\nt 2\ncp 1 2\n");
    const auto c = compile(circuit);
    EXPECT_EQ(c.aux_count, oracles::expected_aux_count(circuit));
    EXPECT_EQ(c.n_total, 9);
    EXPECT_TRUE(verify_equivalence(circuit, c, 1e-10).passed);
}

TEST(compiler, aux_count_matches_oracle) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const auto circuit = random_circuit(1 + trial % 4, 2 + trial % 9, rng);
        const auto c = compile(circuit);
        EXPECT_EQ(c.aux_count, oracles::expected_aux_count(circuit));
        EXPECT_EQ(c.n_total, circuit.n + c.aux_count);
        EXPECT_EQ(static_cast<int>(c.postselect.qubits.size()), c.aux_count);
    }
}

TEST(compiler, structural_invariants) {
    std::mt19937_64 rng(5);
    const auto circuit = random_circuit(4, 30, rng);
    const auto c = compile(circuit);
    EXPECT_EQ(c.cost.n(), c.n_total);
    for (const auto& cl : c.cost.clauses()) EXPECT_LE(cl.arity(), 2);
    std::vector<bool> seen(static_cast<std::size_t>(c.n_total), false);
    for (int p : c.output_map) {
        EXPECT_FALSE(seen[static_cast<std::size_t>(p)]);
        seen[static_cast<std::size_t>(p)] = true;
    }
    for (int p : c.postselect.qubits) {
        EXPECT_FALSE(seen[static_cast<std::size_t>(p)]);
        seen[static_cast<std::size_t>(p)] = true;
    }
    for (bool s : seen) EXPECT_TRUE(s);
    for (int t : c.postselect.targets) EXPECT_EQ(t, 0);
    EXPECT_NEAR(std::abs(c.global_phase), 1.0, 1e-12);
}

TEST(compiler, random_circuits_verify) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto circuit = random_circuit(1 + trial % 4, 1 + trial % 12, rng);
        const auto c = compile(circuit);
        if (c.n_total <= 16) {
            const auto layered = verify_equivalence(circuit, c, 1e-10, Schedule::Layered);
            EXPECT_TRUE(layered.passed) << layered.amplitude_deviation;
        }
        const auto streaming = verify_equivalence(circuit, c, 1e-10, Schedule::Streaming);
        EXPECT_TRUE(streaming.passed) << streaming.amplitude_deviation;
        EXPECT_LE(streaming.amplitude_deviation_free_phase, streaming.amplitude_deviation + 1e-12);
    }
}

TEST(compiler, streaming_equals_layered) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = compile(random_circuit(3, 8, rng));
        if (c.n_total > 16) continue;
        const auto a = compiled_output_state(c, Schedule::Layered);
        const auto b = compiled_output_state(c, Schedule::Streaming);
        for (Index z = 0; z < a.size(); ++z) EXPECT_NEAR(std::abs(a.amplitude(z) - b.amplitude(z)), 0.0, 1e-12);
    }
}

TEST(compiler, corrupted_clause_is_caught) {
    const auto circuit = parse("circuit 2\nh 0\nh 1\nt 0\ncp 0 1\nh 0\nt 1\nh 1\n");
    auto c = compile(circuit);
    ASSERT_TRUE(verify_equivalence(circuit, c, 1e-10).passed);
    auto clauses = c.cost.clauses();
    clauses.push_back(Clause::literal(c.output_map[0], 1));
    c.cost = CspInstance(c.n_total, clauses);
    EXPECT_FALSE(verify_equivalence(circuit, c, 1e-10).passed);
}

TEST(compiler, user_postselection) {
    const auto circuit = parse("circuit 2\nh 0\nh 1\ncp 0 1\nt 1\nh 0\npost 0 0\n");
    EXPECT_EQ(circuit.postselect, (std::vector<int>{0}));
    const auto c = compile(circuit);
    EXPECT_EQ(static_cast<int>(c.postselect.qubits.size()), c.aux_count + 1);
    const auto rep = verify_equivalence(circuit, c, 1e-10);
    EXPECT_TRUE(rep.passed) << rep.amplitude_deviation;
    const auto p = simulate_circuit(circuit);
    EXPECT_NEAR(p[1] + p[3], 0.0, 1e-12);
}

TEST(compiler, circuit_io) {
    std::mt19937_64 rng(8);
    auto circuit = random_circuit(3, 15, rng);
    circuit.postselect = {2};
    std::stringstream buf;
    write_circuit(buf, circuit);
    const auto again = read_circuit(buf);
    EXPECT_EQ(again.n, circuit.n);
    EXPECT_EQ(again.gates, circuit.gates);
    EXPECT_EQ(again.postselect, circuit.postselect);

    auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("circuit 2\nh 0\nx 1\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("circuit 2\npost 0 0\nh 1\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("circuit 2\npost 0 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("circuit 2\ncp 0\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("h 0\n").find("line 1"), std::string::npos);
    EXPECT_THROW(parse("circuit 2\ncp 1 1\n"), std::invalid_argument);
    EXPECT_THROW(parse("circuit 2\nt 2\n"), std::out_of_range);
}

TEST(compiler, sidecar_json) {
    const auto c = compile(parse("circuit 1\nh 0\nt 0\nh 0\n"));
    const auto j = nlohmann::json::parse(compiled_sidecar_json(c));
    EXPECT_EQ(j.at("n_total").get<int>(), 2);
    EXPECT_EQ(j.at("output_map").get<std::vector<int>>(), (std::vector<int>{1}));
}

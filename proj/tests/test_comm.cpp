#include <doctest.h>

#include <cmath>
#include <random>

#include "csaforge/comm.hpp"
#include "csaforge/resources.hpp"
#include "csaforge/sim.hpp"

using namespace csaforge;

namespace {

std::pair<Amplitude, Amplitude> random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Amplitude a{d(rng), d(rng)}, b{d(rng), d(rng)};
    double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

// The gate set is discrete, so arbitrary source states are injected by
// linearity: run the circuit on both basis values with identical outcomes
// and combine the final states.
struct ChannelRun {
    SimState st0, st1;
};

ChannelRun run_on_basis(const Circuit& c, QubitId source, const Outcomes& o) {
    return {run(c, {{source, 0}}, o), run(c, {{source, 1}}, o)};
}

SimState combine(const ChannelRun& r, Amplitude a, Amplitude b) {
    SimState out = r.st0;
    for (auto& [k, amp] : out.amplitudes) amp *= a;
    for (auto& [k, amp] : r.st1.amplitudes) out.amplitudes[k] += b * amp;
    for (auto it = out.amplitudes.begin(); it != out.amplitudes.end();) {
        if (std::abs(it->second) < 1e-14)
            it = out.amplitudes.erase(it);
        else
            ++it;
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> all_outcomes(std::uint32_t bits) {
    std::vector<std::vector<std::uint8_t>> out;
    for (std::uint32_t v = 0; v < (1u << bits); ++v) {
        std::vector<std::uint8_t> o(bits);
        for (std::uint32_t i = 0; i < bits; ++i) o[i] = (v >> i) & 1;
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace

TEST_CASE("Bell measurement: outcomes and resources") {
    BellMeasureBuild bm = build_bell_measure();
    ResourceReport r = count_resources(bm.circuit);
    CHECK(r.size == 4);
    CHECK(r.width == 2);
    CHECK(r.depth <= 4);  // concurrent reads admit depth 3

    // |00>: the parity outcome k is always 0, j is free.
    for (auto& o : all_outcomes(2)) {
        bool possible = true;
        try {
            run(bm.circuit, {}, Outcomes::forced(o));
        } catch (const ImpossibleOutcome&) {
            possible = false;
        }
        if (o[bm.k_slot] == 1)
            CHECK_FALSE(possible);
        else
            CHECK(possible);
    }
    // |11> also has even parity after the CNOT, so k stays 0.
    SimState st = run(bm.circuit, {{bm.q1, 1}, {bm.q2, 1}}, Outcomes::seeded(3));
    CHECK(st.record.at(bm.k_slot) == 0);
    // |10> has odd parity: k = 1 always.
    SimState st2 = run(bm.circuit, {{bm.q1, 1}}, Outcomes::seeded(3));
    CHECK(st2.record.at(bm.k_slot) == 1);

    CHECK_THROWS_AS(build_bell_measure({0, 0}, {2, 0}), AdjacencyError);
}

TEST_CASE("teleport chain: resources within the table row and constant depth") {
    std::int64_t d3 = count_resources(build_teleport(3).circuit).depth;
    for (std::size_t n : {3u, 5u, 7u, 9u}) {
        TeleportBuild t = build_teleport(n);
        ResourceReport r = count_resources(t.circuit);
        CHECK(r.depth <= 7);
        CHECK(r.size <= 3 * static_cast<std::int64_t>(n) + 4);
        CHECK(r.width <= static_cast<std::int64_t>(n) + 1);
        CHECK(r.depth == d3);
    }
    CHECK_THROWS_AS(build_teleport(4), UnsupportedLength);
    CHECK_THROWS_AS(build_teleport(1), UnsupportedLength);
}

TEST_CASE("teleport chain: identity channel on basis and superposed inputs") {
    TeleportBuild t = build_teleport(5);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        SimState st = run(t.circuit, {{t.source, 1}}, Outcomes::seeded(seed));
        CHECK(st.classical_bit(t.dest) == 1);
    }
    std::mt19937_64 rng(11);
    auto [a, b] = random_state(rng);
    TeleportBuild t7 = build_teleport(7);
    int branches = 0;
    for (auto& o : all_outcomes(t7.circuit.record_size)) {
        ChannelRun cr;
        try {
            cr = run_on_basis(t7.circuit, t7.source, Outcomes::forced(o));
        } catch (const ImpossibleOutcome&) {
            continue;
        }
        ++branches;
        SimState st = combine(cr, a, b);
        CHECK(fidelity(st, {t7.dest}, {a, b}) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(branches == 64);
}

TEST_CASE("fanout: resources within the table row") {
    std::int64_t d2 = count_resources(build_fanout(2).circuit).depth;
    for (std::size_t n = 2; n <= 9; ++n) {
        FanoutBuild f = build_fanout(n);
        ResourceReport r = count_resources(f.circuit);
        CHECK(r.depth <= 9);
        CHECK(r.size <= 10 * static_cast<std::int64_t>(n) - 9);
        CHECK(r.width <= 3 * static_cast<std::int64_t>(n) - 1);
        CHECK(r.depth <= d2 + 1);  // constant in n
    }
    CHECK_THROWS_AS(build_fanout(1), UnsupportedLength);
}

TEST_CASE("fanout: corrections merge to at most one X and one Z per copy") {
    FanoutBuild f = build_fanout(4);
    QubitId last = f.copies.back();
    CHECK(f.plan.targets.at(last).x.bits.size() == 3);  // cumulative parity
    CHECK(f.plan.targets.at(last).z.is_never());
    for (std::size_t i = 0; i + 1 < f.copies.size(); ++i) {
        CHECK(f.plan.targets.at(f.copies[i]).x.bits.size() == i + 1);
        CHECK(f.plan.targets.at(f.copies[i]).z.bits.size() == 1);
    }
    Circuit merged = merge_corrections(f.circuit);
    CHECK(count_resources(merged).size == count_resources(f.circuit).size);
}

TEST_CASE("fanout: copies agree with the source on basis inputs") {
    FanoutBuild f = build_fanout(5);
    for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
        SimState st0 = run(f.circuit, {{f.source, 0}}, Outcomes::seeded(seed));
        for (QubitId q : f.copies) CHECK(st0.classical_bit(q) == 0);
        SimState st1 = run(f.circuit, {{f.source, 1}}, Outcomes::seeded(seed));
        for (QubitId q : f.copies) CHECK(st1.classical_bit(q) == 1);
    }
}

TEST_CASE("fanout: produces the entangled extension of the source state, all branches") {
    FanoutBuild f = build_fanout(3);
    Amplitude a{3.0 / 5, 0}, b{4.0 / 5, 0};
    int branches = 0;
    for (auto& o : all_outcomes(f.circuit.record_size)) {
        ChannelRun cr;
        try {
            cr = run_on_basis(f.circuit, f.source, Outcomes::forced(o));
        } catch (const ImpossibleOutcome&) {
            continue;
        }
        ++branches;
        SimState st = combine(cr, a, b);
        std::vector<Amplitude> ref(8);
        ref[0] = a;
        ref[7] = b;
        CHECK(fidelity(st, f.copies, ref) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(branches == 16);
}

TEST_CASE("unfanout: resources within the table row") {
    for (std::size_t n = 2; n <= 9; ++n) {
        UnfanoutBuild u = build_unfanout(n);
        ResourceReport r = count_resources(u.circuit);
        CHECK(r.depth <= 6);
        CHECK(r.size <= 3 * static_cast<std::int64_t>(n) + 2);
        CHECK(r.width == static_cast<std::int64_t>(n));
    }
    CHECK_THROWS_AS(build_unfanout(1), UnsupportedLength);
}

TEST_CASE("unfanout: disentangles the register back to one qubit, all branches") {
    Amplitude a{3.0 / 5, 0}, b{4.0 / 5, 0};
    for (std::size_t n : {2u, 3u, 4u, 5u, 6u, 7u}) {
        UnfanoutBuild u = build_unfanout(n);
        int branches = 0;
        for (auto& o : all_outcomes(u.circuit.record_size)) {
            SimState st0, st1;
            try {
                std::vector<std::pair<QubitId, int>> ones;
                for (QubitId q : u.inputs) ones.push_back({q, 1});
                st0 = run(u.circuit, {}, Outcomes::forced(o));
                st1 = run(u.circuit, ones, Outcomes::forced(o));
            } catch (const ImpossibleOutcome&) {
                continue;
            }
            ++branches;
            SimState st = combine(ChannelRun{std::move(st0), std::move(st1)}, a, b);
            CHECK(fidelity(st, {u.target}, {a, b}) == doctest::Approx(1.0).epsilon(1e-9));
            for (QubitId q : u.inputs)
                if (q != u.target) CHECK_NOTHROW(st.classical_bit(q));
        }
        CHECK(branches == (1 << (n - 1)));
    }
}

TEST_CASE("fanout then unfanout is the identity channel") {
    for (std::size_t n : {3u, 4u}) {
        FanoutBuild f = build_fanout(n);
        UnfanoutBuild u = build_unfanout(n);

        // Splice: rebuild both circuits into one, mapping the unfanout's
        // inputs onto the fanout's copies and shifting its record slots.
        CircuitBuilder b;
        ModuleId m = b.add_module("chain");
        std::vector<QubitId> fmap;
        for (auto& qi : f.circuit.qubits) fmap.push_back(b.add_qubit(m, qi.coord));
        std::vector<QubitId> umap(u.circuit.qubits.size(), 0);
        for (std::size_t i = 0; i < u.inputs.size(); ++i) umap[u.inputs[i]] = fmap[f.copies[i]];

        std::uint32_t slot = 0;
        auto splice = [&](const Circuit& src, const std::vector<QubitId>& map,
                          std::uint32_t slot_shift) {
            for (const Layer& l : src.layers) {
                std::vector<Gate> gates;
                for (Gate g : l.gates) {
                    g.q0 = map[g.q0];
                    if (g.arity() == 2) g.q1 = map[g.q1];
                    if (g.slot) g.slot = slot++;
                    for (auto& bit : g.cond.bits) bit += slot_shift;
                    gates.push_back(g);
                }
                b.append_layer(std::move(gates));
            }
        };
        splice(f.circuit, fmap, 0);
        splice(u.circuit, umap, f.circuit.record_size);
        Circuit chain = b.take();
        QubitId target = umap[u.target];

        std::mt19937_64 rng(5);
        auto [a, beta] = random_state(rng);
        for (std::uint64_t seed : {4ull, 8ull, 15ull}) {
            ChannelRun cr = run_on_basis(chain, fmap[f.source], Outcomes::seeded(seed));
            SimState st = combine(cr, a, beta);
            CHECK(fidelity(st, {target}, {a, beta}) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("merge_corrections folds runs and drops cancelled gates") {
    CircuitBuilder b;
    ModuleId m = b.add_module("m");
    QubitId q0 = b.add_qubit(m, {0, 0});
    QubitId q1 = b.add_qubit(m, {1, 0});
    b.append_layer({CircuitBuilder::g1(GateKind::H, q0), CircuitBuilder::g1(GateKind::H, q1)});
    std::uint32_t s0 = 0, s1 = 0;
    b.append_layer({b.measure(q0, &s0), b.measure(q1, &s1)});
    QubitId q2 = b.add_qubit(m, {2, 0});
    b.append_layer({CircuitBuilder::g1(GateKind::X, q2, ParityExpr::on_bit(s0))});
    b.append_layer({CircuitBuilder::g1(GateKind::X, q2, ParityExpr::on_bit(s1))});
    Circuit merged = merge_corrections(b.peek());
    CHECK(count_resources(merged).size == 5);  // two X gates became one
    bool found = false;
    for (auto& l : merged.layers)
        for (auto& g : l.gates)
            if (g.kind == GateKind::X && g.q0 == q2) {
                found = true;
                CHECK(g.cond == ParityExpr::on_parity({s0, s1}));
            }
    CHECK(found);

    // X^k X^k cancels entirely.
    CircuitBuilder b2;
    ModuleId m2 = b2.add_module("m");
    QubitId p = b2.add_qubit(m2, {0, 0});
    QubitId t = b2.add_qubit(m2, {1, 0});
    std::uint32_t s = 0;
    b2.append_layer({CircuitBuilder::g1(GateKind::H, p)});
    b2.append_layer({b2.measure(p, &s)});
    b2.append_layer({CircuitBuilder::g1(GateKind::X, t, ParityExpr::on_bit(s))});
    b2.append_layer({CircuitBuilder::g1(GateKind::X, t, ParityExpr::on_bit(s))});
    CHECK(count_resources(merge_corrections(b2.peek())).size == 2);

    // A circuit without Pauli runs is unchanged.
    CircuitBuilder b3;
    ModuleId m3 = b3.add_module("m");
    QubitId a3 = b3.add_qubit(m3, {0, 0});
    QubitId c3 = b3.add_qubit(m3, {1, 0});
    b3.append_layer({CircuitBuilder::cnot(a3, c3)});
    b3.append_layer({CircuitBuilder::g1(GateKind::T, a3)});
    CHECK(count_resources(merge_corrections(b3.peek())) == count_resources(b3.peek()));
}

#include <doctest.h>

#include <array>
#include <complex>
#include <vector>

#include "csaforge/arith.hpp"
#include "csaforge/oracle.hpp"
#include "csaforge/resources.hpp"
#include "csaforge/sim.hpp"

using namespace csaforge;

namespace {

// Dense 8x8 matrix oracle for three-qubit unitaries: applies the circuit to
// each basis column and compares against the Toffoli permutation.
using Mat = std::array<std::array<std::complex<double>, 8>, 8>;

Mat circuit_unitary(const Circuit& c, QubitId q0, QubitId q1, QubitId q2) {
    Mat m{};
    for (int col = 0; col < 8; ++col) {
        std::vector<std::pair<QubitId, int>> init = {
            {q0, (col >> 0) & 1}, {q1, (col >> 1) & 1}, {q2, (col >> 2) & 1}};
        SimState st = run(c, init, Outcomes::seeded(0));
        for (auto& [k, a] : st.amplitudes) {
            int row = (k.get(q0) ? 1 : 0) | (k.get(q1) ? 2 : 0) | (k.get(q2) ? 4 : 0);
            m[row][col] += a;
        }
    }
    return m;
}

std::uint64_t sim_layer_sum(const CsaLayerBuild& layer, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
    std::vector<std::pair<QubitId, int>> init;
    for (std::size_t i = 0; i < layer.a.size(); ++i) {
        init.push_back({layer.a[i], static_cast<int>((a >> i) & 1)});
        init.push_back({layer.b[i], static_cast<int>((b >> i) & 1)});
        init.push_back({layer.c[i], static_cast<int>((c >> i) & 1)});
    }
    SimState st = run(layer.circuit, init, Outcomes::seeded(1));
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < layer.u.size(); ++i)
        sum += static_cast<std::uint64_t>(st.classical_bit(layer.u[i])) << i;
    for (std::size_t i = 0; i < layer.v.size(); ++i)
        sum += static_cast<std::uint64_t>(st.classical_bit(layer.v[i])) << (i + 1);
    return sum;
}

}  // namespace

TEST_CASE("Toffoli block: exact resources and unitary") {
    ToffoliBuild t = build_toffoli();
    ResourceReport r = count_resources(t.circuit);
    CHECK(r.depth == 8);
    CHECK(r.size == 15);
    CHECK(r.width == 3);

    // Truth table spot check.
    SimState st = run(t.circuit, {{t.c1, 1}, {t.c2, 1}}, Outcomes::seeded(0));
    CHECK(st.classical_bit(t.target) == 1);

    // Full unitary against the permutation oracle.
    Mat m = circuit_unitary(t.circuit, t.c1, t.c2, t.target);
    for (int col = 0; col < 8; ++col) {
        int want = col;
        if ((col & 3) == 3) want = col ^ 4;
        for (int row = 0; row < 8; ++row) {
            double expect = (row == want) ? 1.0 : 0.0;
            CHECK(std::abs(m[row][col] - expect) < 1e-9);
        }
    }
}

TEST_CASE("single-bit carry-save cell: resources and exhaustive truth table") {
    SingleBitCsaBuild cell = build_single_bit_csa();
    ResourceReport r = count_resources(cell.circuit);
    CHECK(r.depth == 33);
    CHECK(r.size == 55);
    CHECK(r.width == 5);

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                SimState st =
                    run(cell.circuit, {{cell.a, a}, {cell.b, b}, {cell.c, c}}, Outcomes::seeded(0));
                CsaBits want = oracle_csa_bit(a, b, c);
                CHECK(st.classical_bit(cell.u) == want.u);
                CHECK(st.classical_bit(cell.v) == want.v);
                // The a line ends cleared; b and c are preserved.
                CHECK(st.classical_bit(cell.a) == 0);
                CHECK(st.classical_bit(cell.b) == b);
                CHECK(st.classical_bit(cell.c) == c);
            }
}

TEST_CASE("2-2 adder: half-adder truth table within 3-2 resources") {
    TwoTwoBuild t = build_two_two_adder();
    ResourceReport r = count_resources(t.circuit);
    CHECK(r.depth <= 33);
    CHECK(r.size <= 55);
    CHECK(r.width <= 5);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            SimState st = run(t.circuit, {{t.a, a}, {t.b, b}}, Outcomes::seeded(0));
            CHECK(st.classical_bit(t.u) == (a ^ b));
            CHECK(st.classical_bit(t.v) == (a & b));
        }
}

TEST_CASE("carry-save layer: parallel composition and random sums") {
    CsaLayerBuild layer = build_csa_layer(4);
    ResourceReport r = count_resources(layer.circuit);
    CHECK(r.depth == 33);
    CHECK(r.size == 220);
    CHECK(r.width == 20);

    CsaLayerBuild one = build_csa_layer(1);
    CHECK(count_resources(one.circuit) == count_resources(build_single_bit_csa().circuit));

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> d(0, 15);
    for (int k = 0; k < 50; ++k) {
        std::uint64_t a = d(rng), b = d(rng), c = d(rng);
        CHECK(sim_layer_sum(layer, a, b, c) == a + b + c);
    }
}

TEST_CASE("modular adder tile: structure and resource bounds for n=2..6") {
    std::int64_t depth_at_2 = 0;
    for (std::size_t n = 2; n <= 6; ++n) {
        std::uint64_t m = (std::uint64_t{1} << n) - 1;
        ModularAdderBuild tile = build_modular_adder(n, m);
        check_wellformed(tile.circuit);
        ResourceReport r = count_resources(tile.circuit);
        CAPTURE(n);
        CHECK(r.depth <= 374);
        CHECK(r.size <= 551 * static_cast<std::int64_t>(n) + 757);
        CHECK(r.width <= 33 * static_cast<std::int64_t>(n) + 47);
        CHECK(r.module_width == 1);
        CHECK(r.depth_size_width_consistent());
        if (n == 2)
            depth_at_2 = r.depth;
        else
            CHECK(r.depth == depth_at_2);  // depth constant in n
    }
    CHECK_THROWS_AS(build_modular_adder(2, 4), ModulusError);
    CHECK_THROWS_AS(build_modular_adder(2, 7), ModulusError);
}

TEST_CASE("modular adder tile: depth also constant across moduli at n=3,4") {
    std::int64_t d = count_resources(build_modular_adder(3, 5).circuit).depth;
    CHECK(count_resources(build_modular_adder(3, 7).circuit).depth == d);
    for (std::uint64_t m : {9ull, 11ull, 13ull, 15ull}) {
        std::int64_t dm = count_resources(build_modular_adder(4, m).circuit).depth;
        CHECK(dm <= 374);
        CHECK(dm >= d - 6);
        CHECK(dm <= d + 6);
    }
}

TEST_CASE("modular adder tile: simulated bits match the classical replay") {
    ModularAdderBuild tile = build_modular_adder(2, 3);

    SUBCASE("all-zero input") {
        CarrySaveNumber got = simulate_modular_adder(tile, 0, 0, 0, 1);
        CHECK(decode_csa(got) == 0);
    }

    SUBCASE("worked example 5+6+3 mod 3") {
        CarrySaveNumber got = simulate_modular_adder(tile, 5, 6, 3, 1);
        CHECK(decode_csa(got) % 3 == 2);
        CHECK(got == oracle_modular_adder(5, 6, 3, 2, 3));
    }

    SUBCASE("random vectors, three seeds, bit-exact") {
        TestVectorSet vs = make_adder_vectors(2, 3, 60, 99);
        for (auto& v : vs.vectors) {
            CarrySaveNumber want = oracle_modular_adder(v.inputs[0], v.inputs[1], v.inputs[2], 2, 3);
            for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
                CarrySaveNumber got =
                    simulate_modular_adder(tile, v.inputs[0], v.inputs[1], v.inputs[2], seed);
                CHECK(got == want);
                CHECK(decode_csa(got) % 3 == v.expected);
            }
        }
    }
}

TEST_CASE("modular adder tile: n=3 simulation agrees with the replay for both moduli") {
    for (std::uint64_t m : {5ull, 7ull}) {
        ModularAdderBuild tile = build_modular_adder(3, m);
        TestVectorSet vs = make_adder_vectors(3, m, 25, 7);
        for (auto& v : vs.vectors) {
            CarrySaveNumber got =
                simulate_modular_adder(tile, v.inputs[0], v.inputs[1], v.inputs[2], 5);
            CHECK(got == oracle_modular_adder(v.inputs[0], v.inputs[1], v.inputs[2], 3, m));
        }
    }
}

TEST_CASE("modular adder tile: forced-outcome branches give the same output bits") {
    ModularAdderBuild tile = build_modular_adder(2, 3);
    CarrySaveNumber want = oracle_modular_adder(13, 6, 9, 2, 3);
    int tried = 0;
    // Scan a slice of outcome space; impossible branches are skipped.
    for (std::uint64_t pattern = 0; pattern < 4096 && tried < 24; pattern += 173) {
        std::vector<std::uint8_t> forced(tile.circuit.record_size);
        for (std::size_t i = 0; i < forced.size(); ++i) forced[i] = (pattern >> (i % 12)) & 1;
        std::vector<std::pair<QubitId, int>> init;
        for (std::size_t i = 0; i < tile.in_a.size(); ++i) {
            init.push_back({tile.in_a[i], static_cast<int>((13u >> i) & 1)});
            init.push_back({tile.in_b[i], static_cast<int>((6u >> i) & 1)});
            init.push_back({tile.in_c[i], static_cast<int>((9u >> i) & 1)});
        }
        SimState st;
        try {
            st = run(tile.circuit, init, Outcomes::forced(forced));
        } catch (const ImpossibleOutcome&) {
            continue;
        }
        ++tried;
        CarrySaveNumber got;
        for (std::size_t i = 0; i < tile.out_u.size(); ++i)
            got.set_u_bit(i, static_cast<std::uint8_t>(st.classical_bit(tile.out_u[i])));
        for (auto& [pos, q] : tile.out_v)
            got.set_v_bit(pos, static_cast<std::uint8_t>(st.classical_bit(q)));
        CHECK(got == want);
    }
    CHECK(tried > 0);
}

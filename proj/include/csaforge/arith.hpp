#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csaforge/carry_save.hpp"
#include "csaforge/circuit.hpp"

namespace csaforge {

// Depth-efficient Clifford+T Toffoli on three mutually adjacent qubits.
struct ToffoliBuild {
    Circuit circuit;
    QubitId c1 = 0, c2 = 0, target = 0;
};
ToffoliBuild build_toffoli();

// Single bit-position carry-save cell: consumes a, preserves b and c, and
// leaves the sum bit u and the carry bit v on the two ancillae.
struct SingleBitCsaBuild {
    Circuit circuit;
    QubitId a = 0, b = 0, c = 0, u = 0, v = 0;
};
SingleBitCsaBuild build_single_bit_csa();

// Half-adder variant re-encoding two bits of one significance.
struct TwoTwoBuild {
    Circuit circuit;
    QubitId a = 0, b = 0, u = 0, v = 0;
};
TwoTwoBuild build_two_two_adder();

// n' parallel single-bit cells: one non-modular carry-save addition layer.
struct CsaLayerBuild {
    Circuit circuit;
    std::vector<QubitId> a, b, c;  // inputs per position
    std::vector<QubitId> u;        // sum bits, positions 0..n'-1
    std::vector<QubitId> v;        // carry bits, positions 1..n' (v[i] has significance i+1)
};
CsaLayerBuild build_csa_layer(std::size_t n_prime);

// The CSA tile: one module computing (a+b+c) mod m in carry-save form for an
// n-bit odd modulus and (n+2)-bit inputs. Four cell layers; the three
// truncated overflow bits control residue additions distributed over fanout
// rails; rail ancillae are disentangled and reused. Depth is a fixed window
// schedule, independent of n.
struct ModularAdderBuild {
    Circuit circuit;
    std::size_t n = 0;
    std::uint64_t m = 0;
    std::vector<QubitId> in_a, in_b, in_c;               // bit i of each input register
    std::vector<QubitId> out_u;                          // u''' bits 0..n+1
    std::vector<std::pair<std::size_t, QubitId>> out_v;  // (bit position, qubit), positions in 1..n+1
};
ModularAdderBuild build_modular_adder(std::size_t n, std::uint64_t m);

// Runs the tile on basis inputs and decodes the output pair.
CarrySaveNumber simulate_modular_adder(const ModularAdderBuild& tile, std::uint64_t a,
                                       std::uint64_t b, std::uint64_t c, std::uint64_t seed);

}  // namespace csaforge

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "csaforge/circuit.hpp"

namespace csaforge {

// Pending Pauli frame for a set of target qubits: at most one X and one Z
// correction each, conditioned on parities of measurement outcomes.
struct CorrectionPlan {
    struct Entry {
        ParityExpr x = ParityExpr::never();
        ParityExpr z = ParityExpr::never();
    };
    std::map<QubitId, Entry> targets;
};

struct BellMeasureBuild {
    Circuit circuit;
    QubitId q1 = 0, q2 = 0;
    std::uint32_t j_slot = 0, k_slot = 0;
};

struct TeleportBuild {
    Circuit circuit;
    QubitId source = 0, dest = 0;
    CorrectionPlan plan;
};

struct FanoutBuild {
    Circuit circuit;
    QubitId source = 0;
    std::vector<QubitId> copies;  // l_1 .. l_n
    CorrectionPlan plan;
};

struct UnfanoutBuild {
    Circuit circuit;
    std::vector<QubitId> inputs;  // entangled copies, target is the last
    QubitId target = 0;
};

// Measurement in the Bell basis: CNOT, H, then both qubits measured.
// Record slots are (j, k) in that order. The qubits must be adjacent.
BellMeasureBuild build_bell_measure(Coord a = {0, 0}, Coord b = {1, 0});

// Constant-depth single-qubit move over a line of n qubits (n odd, >= 3):
// the source plus (n-1)/2 Bell pairs, linked by interleaved Bell
// measurements, with the X/Z corrections parity-merged onto the last qubit.
TeleportBuild build_teleport(std::size_t n);

// Constant-depth fanout of one qubit to n entangled copies via chained
// 3-qubit cat segments. The source is consumed by the Bell' measurement.
FanoutBuild build_fanout(std::size_t n);

// Constant-depth unfanout of an n-qubit entangled register down to its last
// qubit: a Hadamard round, two interleaved CNOT rounds, measurement of all
// but the target, and a parity-conditioned Z.
UnfanoutBuild build_unfanout(std::size_t n);

// Folds runs of conditioned X (resp. Z) gates acting on one qubit into a
// single parity-conditioned gate; unitary semantics are unchanged. Gates
// whose merged condition can never fire are dropped.
Circuit merge_corrections(const Circuit& c);

}  // namespace csaforge

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <variant>
#include <vector>

#include "csaforge/circuit.hpp"

namespace csaforge {

struct ImpossibleOutcome : ModelError {
    using ModelError::ModelError;
};
struct NotSeparable : ModelError {
    using ModelError::ModelError;
};
struct SparsityExceeded : ModelError {
    using ModelError::ModelError;
};

using Amplitude = std::complex<double>;

// Basis key over the circuit's qubits, packed into 64-bit words.
struct BasisKey {
    std::vector<std::uint64_t> words;

    static BasisKey zeros(std::size_t nbits) {
        BasisKey k;
        k.words.assign((nbits + 63) / 64, 0);
        return k;
    }
    bool get(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v) {
        std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v)
            words[i >> 6] |= mask;
        else
            words[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    bool operator==(const BasisKey&) const = default;
};

struct BasisKeyHash {
    std::size_t operator()(const BasisKey& k) const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto w : k.words) {
            h ^= w;
            h *= 0x100000001b3ull;
            h ^= h >> 29;
        }
        return h;
    }
};

using AmplitudeMap = std::unordered_map<BasisKey, Amplitude, BasisKeyHash>;

// Either a PRNG seed or the full vector of forced measurement outcomes,
// indexed by record slot. Forcing a zero-amplitude branch raises
// ImpossibleOutcome.
struct Outcomes {
    std::variant<std::uint64_t, std::vector<std::uint8_t>> source = std::uint64_t{0};

    static Outcomes seeded(std::uint64_t seed) { return {seed}; }
    static Outcomes forced(std::vector<std::uint8_t> bits) { return {std::move(bits)}; }
    bool is_forced() const { return std::holds_alternative<std::vector<std::uint8_t>>(source); }
};

struct SimOptions {
    std::size_t sparsity_cap = std::size_t{1} << 16;
    double norm_tolerance = 1e-9;
};

struct SimState {
    AmplitudeMap amplitudes;
    std::vector<std::uint8_t> record;
    std::size_t num_qubits = 0;

    double norm() const;
    // Measured value of qubit q if it is classical (same bit in every basis
    // state with nonzero amplitude); throws otherwise.
    int classical_bit(QubitId q) const;
    bool qubit_is_classical(QubitId q) const;
};

// Runs the circuit from a classical basis assignment (qubits not listed
// start in |0>). Layers apply in order; measurements collapse and
// renormalize; conditioned gates consult the record; teleports move the
// source bit into the destination and reset the source.
SimState run(const Circuit& c, const std::vector<std::pair<QubitId, int>>& initial,
             const Outcomes& outcomes, const SimOptions& opt = {});

// |<ref|psi_subset>|^2, defined only when the remaining qubits are
// unentangled from `subset` (Schmidt rank 1 across the cut).
double fidelity(const SimState& s, const std::vector<QubitId>& subset,
                const std::vector<Amplitude>& reference);

// Reduced amplitudes on `subset`, requiring Schmidt rank 1 across the cut.
std::vector<Amplitude> reduced_state(const SimState& s, const std::vector<QubitId>& subset);

}  // namespace csaforge

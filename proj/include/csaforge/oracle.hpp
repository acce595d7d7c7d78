#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csaforge/carry_save.hpp"

namespace csaforge {

// Classical reference arithmetic. Everything here is pure and independent of
// the circuit builders; tests compare builder simulations against it.

struct CsaBits {
    std::uint8_t u = 0;  // parity
    std::uint8_t v = 0;  // majority, one significance higher
};

CsaBits oracle_csa_bit(std::uint8_t a, std::uint8_t b, std::uint8_t c);
CsaBits oracle_two_two_bit(std::uint8_t a, std::uint8_t b);

// Layer-by-layer classical replay of the four-layer modular addition:
// non-modular carry-save layer on (n+2)-bit inputs, truncation of the three
// overflow bits, then three residue-add layers. Output is the exact bit
// pattern the tile computes on basis inputs.
struct ModularAdderTrace {
    CarrySaveNumber after_layer1;  // before truncation
    std::uint8_t t_v{};            // truncated v_{n+1}
    std::uint8_t t_u{};            // truncated u_{n+1}
    std::uint8_t t_v2{};           // truncated v_{n+2}
    CarrySaveNumber after_layer2;
    CarrySaveNumber after_layer3;  // includes u''_{n+1} := v'_{n+1}
    CarrySaveNumber out;           // u''' (n+2 bits), v''' (bits 1..n+1)
};

ModularAdderTrace oracle_modular_adder_trace(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                             std::size_t n, std::uint64_t m);
CarrySaveNumber oracle_modular_adder(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                     std::size_t n, std::uint64_t m);

std::uint64_t oracle_modmul(std::uint64_t x, std::uint64_t y, std::uint64_t m);
std::uint64_t oracle_modexp(std::uint64_t a, std::uint64_t x, std::uint64_t m);

// Deterministic test-vector generation: all-zero, all-max and modulus
// boundary corners first, then a seeded random fill up to the budget.
struct TestVector {
    std::vector<std::uint64_t> inputs;
    std::uint64_t expected = 0;
};

struct TestVectorSet {
    std::string name;
    std::size_t n = 0;
    std::uint64_t m = 0;
    std::vector<TestVector> vectors;
};

TestVectorSet make_adder_vectors(std::size_t n, std::uint64_t m, std::size_t budget,
                                 std::uint64_t seed = 1);
TestVectorSet make_multiplier_vectors(std::size_t n, std::uint64_t m);  // exhaustive over [0,2^n)^2
TestVectorSet make_modexp_vectors(std::uint64_t a, std::uint64_t m, std::size_t t);

}  // namespace csaforge

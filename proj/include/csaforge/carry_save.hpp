#pragma once

#include <cstdint>
#include <vector>

#include "csaforge/circuit.hpp"

namespace csaforge {

// Carry-save encoded integer: value = sum 2^i u_i + sum 2^i v_i, where v_0
// does not exist by convention. The encoding is not unique.
struct CarrySaveNumber {
    std::vector<std::uint8_t> u;  // bits 0 .. u.size()-1
    std::vector<std::uint8_t> v;  // bits 1 .. v.size(); v[i] has significance 2^(i+1)

    std::uint8_t u_bit(std::size_t i) const { return i < u.size() ? u[i] : 0; }
    std::uint8_t v_bit(std::size_t i) const {  // significance 2^i, i >= 1
        return (i >= 1 && i - 1 < v.size()) ? v[i - 1] : 0;
    }
    void set_u_bit(std::size_t i, std::uint8_t b);
    void set_v_bit(std::size_t i, std::uint8_t b);  // i >= 1

    bool operator==(const CarrySaveNumber&) const = default;
};

// Canonical encoding u = x, v = 0.
CarrySaveNumber encode_csa(std::uint64_t x, std::size_t width);
std::uint64_t decode_csa(const CarrySaveNumber& c);

// The three precomputed residues added back by the modular reduction layers:
// r1 and r2 for the two truncated bits of significance 2^(n+1), r3 for the
// bit of significance 2^(n+2).
struct ResidueTable {
    std::size_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t r1 = 0;
    std::uint64_t r2 = 0;
    std::uint64_t r3 = 0;

    static ResidueTable make(std::size_t n, std::uint64_t m);
};

}  // namespace csaforge

#include "csaforge/oracle.hpp"

#include <random>

namespace csaforge {

CsaBits oracle_csa_bit(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
    CsaBits out;
    out.u = a ^ b ^ c;
    out.v = static_cast<std::uint8_t>((a & b) | (b & c) | (a & c));
    return out;
}

CsaBits oracle_two_two_bit(std::uint8_t a, std::uint8_t b) {
    return {static_cast<std::uint8_t>(a ^ b), static_cast<std::uint8_t>(a & b)};
}

namespace {

// One reduction layer. Cell structure is static: a wire exists per u bit,
// per v bit, and per 1-bit of the residue mask; the control only chooses the
// value carried on the residue wires. Three wires of one significance meet a
// 3-2 cell, two a 2-2 cell, a single wire passes through.
CarrySaveNumber reduce_layer(const CarrySaveNumber& in, std::uint64_t residue_mask,
                             std::uint8_t control, std::size_t positions) {
    CarrySaveNumber out;
    for (std::size_t i = 0; i < positions; ++i) {
        std::uint8_t bits[3];
        int nbits = 0;
        if (i < in.u.size()) bits[nbits++] = in.u[i];
        if (i >= 1 && i - 1 < in.v.size()) bits[nbits++] = in.v[i - 1];
        if ((residue_mask >> i) & 1) bits[nbits++] = static_cast<std::uint8_t>(control & 1);
        switch (nbits) {
            case 0: break;
            case 1: out.set_u_bit(i, bits[0]); break;
            case 2: {
                CsaBits r = oracle_two_two_bit(bits[0], bits[1]);
                out.set_u_bit(i, r.u);
                out.set_v_bit(i + 1, r.v);
                break;
            }
            default: {
                CsaBits r = oracle_csa_bit(bits[0], bits[1], bits[2]);
                out.set_u_bit(i, r.u);
                out.set_v_bit(i + 1, r.v);
                break;
            }
        }
    }
    return out;
}

}  // namespace

ModularAdderTrace oracle_modular_adder_trace(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                             std::size_t n, std::uint64_t m) {
    ResidueTable rt = ResidueTable::make(n, m);
    std::uint64_t cap = std::uint64_t{1} << (n + 2);
    if (a >= cap || b >= cap || c >= cap) throw DomainError("inputs exceed n+2 bits");

    ModularAdderTrace tr;
    // Layer 1: non-modular carry-save addition over n+2 bit positions.
    for (std::size_t i = 0; i < n + 2; ++i) {
        CsaBits r = oracle_csa_bit((a >> i) & 1, (b >> i) & 1, (c >> i) & 1);
        tr.after_layer1.set_u_bit(i, r.u);
        tr.after_layer1.set_v_bit(i + 1, r.v);
    }
    tr.t_u = tr.after_layer1.u_bit(n + 1);
    tr.t_v = tr.after_layer1.v_bit(n + 1);
    tr.t_v2 = tr.after_layer1.v_bit(n + 2);

    // Truncate the three overflow bits; keep u_(0..n) and v_(1..n).
    CarrySaveNumber kept;
    kept.u.assign(n + 1, 0);
    kept.v.assign(n - 1 + 1, 0);
    for (std::size_t i = 0; i <= n; ++i) kept.u[i] = tr.after_layer1.u_bit(i);
    for (std::size_t i = 1; i <= n; ++i) kept.v[i - 1] = tr.after_layer1.v_bit(i);

    // Layers 2-4: add back the residues controlled on the truncated bits.
    tr.after_layer2 = reduce_layer(kept, rt.r1, tr.t_v, n + 1);
    tr.after_layer3 = reduce_layer(tr.after_layer2, rt.r2, tr.t_u, n + 1);
    // The v'_{n+1} carry skips layer 3 and re-enters as u''_{n+1}.
    std::uint8_t skipped = tr.after_layer2.v_bit(n + 1);
    tr.after_layer3.set_u_bit(n + 1, skipped);

    CarrySaveNumber l4_in = tr.after_layer3;
    // Layer 4 cells run at positions 0..n; the top position holds only
    // u''_{n+1} and v''_{n+1}, whose AND is provably zero, so a bare XOR
    // closes the sum with no overflow bit.
    CarrySaveNumber l4_low = l4_in;
    l4_low.u.resize(n + 1);
    tr.out = reduce_layer(l4_low, rt.r3, tr.t_v2, n + 1);
    std::uint8_t top_u = l4_in.u_bit(n + 1);
    std::uint8_t top_v = l4_in.v_bit(n + 1);
    if (top_u & top_v) throw ModelError("impossible carry at the top position");
    tr.out.set_u_bit(n + 1, top_u ^ top_v);
    if (tr.out.v.size() > n + 1) throw ModelError("unexpected overflow bit in output");
    return tr;
}

CarrySaveNumber oracle_modular_adder(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                     std::size_t n, std::uint64_t m) {
    return oracle_modular_adder_trace(a, b, c, n, m).out;
}

std::uint64_t oracle_modmul(std::uint64_t x, std::uint64_t y, std::uint64_t m) {
    if (m < 2) throw DomainError("modulus must be at least 2");
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * y) % m);
}

std::uint64_t oracle_modexp(std::uint64_t a, std::uint64_t x, std::uint64_t m) {
    if (m < 2) throw DomainError("modulus must be at least 2");
    std::uint64_t r = 1 % m;
    std::uint64_t base = a % m;
    while (x) {
        if (x & 1) r = oracle_modmul(r, base, m);
        base = oracle_modmul(base, base, m);
        x >>= 1;
    }
    return r;
}

TestVectorSet make_adder_vectors(std::size_t n, std::uint64_t m, std::size_t budget,
                                 std::uint64_t seed) {
    TestVectorSet set;
    set.name = "adder";
    set.n = n;
    set.m = m;
    std::uint64_t max = (std::uint64_t{1} << (n + 2)) - 1;
    std::vector<std::vector<std::uint64_t>> corners = {
        {0, 0, 0}, {max, max, max}, {m - 1, m - 1, m - 1}, {m, m, m}, {max, 0, 0}, {0, max, 1},
    };
    if (budget < corners.size()) throw DomainError("budget below corner-case count");
    for (auto& in : corners) set.vectors.push_back({in, (in[0] + in[1] + in[2]) % m});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> d(0, max);
    while (set.vectors.size() < budget) {
        std::vector<std::uint64_t> in = {d(rng), d(rng), d(rng)};
        set.vectors.push_back({in, (in[0] + in[1] + in[2]) % m});
    }
    return set;
}

TestVectorSet make_multiplier_vectors(std::size_t n, std::uint64_t m) {
    TestVectorSet set;
    set.name = "multiplier";
    set.n = n;
    set.m = m;
    std::uint64_t hi = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < hi; ++x)
        for (std::uint64_t y = 0; y < hi; ++y)
            set.vectors.push_back({{x, y}, oracle_modmul(x, y, m)});
    return set;
}

TestVectorSet make_modexp_vectors(std::uint64_t a, std::uint64_t m, std::size_t t) {
    TestVectorSet set;
    set.name = "modexp";
    set.m = m;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << t); ++p)
        set.vectors.push_back({{p}, oracle_modexp(a, p, m)});
    return set;
}

}  // namespace csaforge

#include "csaforge/carry_save.hpp"

namespace csaforge {

void CarrySaveNumber::set_u_bit(std::size_t i, std::uint8_t b) {
    if (i >= u.size()) u.resize(i + 1, 0);
    u[i] = b;
}

void CarrySaveNumber::set_v_bit(std::size_t i, std::uint8_t b) {
    if (i < 1) throw DomainError("v_0 does not exist");
    if (i - 1 >= v.size()) v.resize(i, 0);
    v[i - 1] = b;
}

CarrySaveNumber encode_csa(std::uint64_t x, std::size_t width) {
    if (width < 64 && x >= (std::uint64_t{1} << width)) throw DomainError("value out of range");
    CarrySaveNumber c;
    c.u.resize(width, 0);
    for (std::size_t i = 0; i < width; ++i) c.u[i] = (x >> i) & 1;
    return c;
}

std::uint64_t decode_csa(const CarrySaveNumber& c) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < c.u.size(); ++i) x += std::uint64_t{c.u[i]} << i;
    for (std::size_t i = 0; i < c.v.size(); ++i) x += std::uint64_t{c.v[i]} << (i + 1);
    return x;
}

ResidueTable ResidueTable::make(std::size_t n, std::uint64_t m) {
    if (n < 2) throw DomainError("modulus bit-length must be at least 2");
    if (m % 2 == 0 || m < 3) throw ModulusError("modulus must be odd and at least 3");
    std::uint64_t lo = std::uint64_t{1} << (n - 1), hi = std::uint64_t{1} << n;
    if (m < lo || m >= hi) throw ModulusError("modulus does not have the stated bit-length");
    ResidueTable t;
    t.n = n;
    t.m = m;
    t.r1 = (std::uint64_t{1} << (n + 1)) % m;
    t.r2 = t.r1;
    t.r3 = (std::uint64_t{1} << (n + 2)) % m;
    return t;
}

}  // namespace csaforge

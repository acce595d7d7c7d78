#pragma once

#include <cstdint>
#include <iosfwd>

#include "csaforge/circuit.hpp"

namespace csaforge {

// The six circuit/module metrics. For a flat circuit:
//   depth          number of elementary (intra) timesteps
//   size           number of gates applied in intra timesteps
//   width          number of qubits ever acted on by any gate
//   module_depth   longest run of consecutive teleport timesteps
//   module_size    total qubits teleported between modules
//   module_width   number of distinct modules acted on
struct ResourceReport {
    std::int64_t depth = 0;
    std::int64_t size = 0;
    std::int64_t width = 0;
    std::int64_t module_depth = 0;
    std::int64_t module_size = 0;
    std::int64_t module_width = 0;

    bool operator==(const ResourceReport&) const = default;

    // D <= S <= D*W holds for every concrete circuit.
    bool depth_size_width_consistent() const {
        return depth <= size && size <= depth * width;
    }
};

std::ostream& operator<<(std::ostream& os, const ResourceReport& r);

ResourceReport count_resources(const Circuit& c);

}  // namespace csaforge

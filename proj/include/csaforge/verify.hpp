#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csaforge/resources.hpp"

namespace csaforge {

// Architectural rules: planar-grid adjacency for two-qubit gates (Chebyshev
// distance 1), a degree cap on distinct interaction partners, and a linear
// per-module qubit budget c*n.
struct ArchitectureRules {
    int max_degree = 6;
    double module_linear_c = 40.0;
};

struct Violation {
    std::string rule;  // "adjacency" | "degree" | "timestep" | "teleport" | "module-size" | "width"
    std::optional<std::size_t> layer;
    std::optional<std::size_t> gate;
    std::string detail;
};

struct ViolationReport {
    std::vector<Violation> violations;
    bool empty() const { return violations.empty(); }
};

// Checks (a) every intra-module two-qubit gate acts on adjacent coordinates,
// (b) each qubit's set of distinct two-qubit partners stays within the
// degree cap, (c) timestep homogeneity, (d) teleports cross modules.
// Violations are data, not failures.
ViolationReport verify_architecture(const Circuit& c, const ArchitectureRules& rules = {});

struct ModuleReport {
    ViolationReport violations;
    ResourceReport resources;
    std::vector<std::pair<ModuleId, std::int64_t>> module_sizes;  // touched qubits per module
};

// Checks each module's touched-qubit count against c*n and the total width
// against c*n*module_width.
ModuleReport verify_modules(const Circuit& c, std::size_t n, const ArchitectureRules& rules = {});

}  // namespace csaforge

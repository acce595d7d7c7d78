#include "csaforge/verify.hpp"

#include <map>
#include <set>
#include <sstream>

namespace csaforge {

ViolationReport verify_architecture(const Circuit& c, const ArchitectureRules& rules) {
    ViolationReport rep;
    std::map<QubitId, std::set<QubitId>> partners;

    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        const Layer& l = c.layers[li];
        for (std::size_t gi = 0; gi < l.gates.size(); ++gi) {
            const Gate& g = l.gates[gi];
            bool tele = g.kind == GateKind::Teleport;
            if (tele != (l.kind == LayerKind::Teleport)) {
                rep.violations.push_back({"timestep", li, gi, "mixed gate kinds in one timestep"});
            }
            if (g.arity() != 2) continue;
            const QubitInfo& a = c.qubits[g.q0];
            const QubitInfo& b = c.qubits[g.q1];
            if (tele) {
                if (a.module == b.module)
                    rep.violations.push_back({"teleport", li, gi, "teleport within one module"});
                continue;
            }
            if (a.module != b.module) {
                rep.violations.push_back(
                    {"adjacency", li, gi, "elementary two-qubit gate crosses modules"});
                continue;
            }
            if (chebyshev(a.coord, b.coord) > 1) {
                std::ostringstream os;
                os << "gate between (" << a.coord.x << "," << a.coord.y << ") and (" << b.coord.x
                   << "," << b.coord.y << ")";
                rep.violations.push_back({"adjacency", li, gi, os.str()});
            }
            partners[g.q0].insert(g.q1);
            partners[g.q1].insert(g.q0);
        }
    }
    for (auto& [q, ps] : partners) {
        if (static_cast<int>(ps.size()) > rules.max_degree) {
            std::ostringstream os;
            os << "qubit " << q << " has " << ps.size() << " distinct partners";
            rep.violations.push_back({"degree", std::nullopt, std::nullopt, os.str()});
        }
    }
    return rep;
}

ModuleReport verify_modules(const Circuit& c, std::size_t n, const ArchitectureRules& rules) {
    ModuleReport rep;
    rep.resources = count_resources(c);
    std::map<ModuleId, std::set<QubitId>> touched;
    for (const Layer& l : c.layers)
        for (const Gate& g : l.gates)
            for (int i = 0; i < g.arity(); ++i) {
                QubitId q = i == 0 ? g.q0 : g.q1;
                touched[c.qubits[q].module].insert(q);
            }
    double cap = rules.module_linear_c * static_cast<double>(n);
    for (auto& [mod, qs] : touched) {
        rep.module_sizes.push_back({mod, static_cast<std::int64_t>(qs.size())});
        if (static_cast<double>(qs.size()) > cap) {
            std::ostringstream os;
            os << "module " << mod << " touches " << qs.size() << " qubits, budget " << cap;
            rep.violations.violations.push_back({"module-size", std::nullopt, std::nullopt, os.str()});
        }
    }
    double width_cap = cap * static_cast<double>(rep.resources.module_width);
    if (static_cast<double>(rep.resources.width) > width_cap) {
        std::ostringstream os;
        os << "width " << rep.resources.width << " exceeds c*n*module_width " << width_cap;
        rep.violations.violations.push_back({"width", std::nullopt, std::nullopt, os.str()});
    }
    return rep;
}

}  // namespace csaforge

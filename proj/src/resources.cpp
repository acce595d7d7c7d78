#include "csaforge/resources.hpp"

#include <ostream>
#include <set>

namespace csaforge {

std::ostream& operator<<(std::ostream& os, const ResourceReport& r) {
    return os << "D=" << r.depth << " S=" << r.size << " W=" << r.width << " Dbar=" << r.module_depth
              << " Sbar=" << r.module_size << " Wbar=" << r.module_width;
}

ResourceReport count_resources(const Circuit& c) {
    ResourceReport r;
    std::set<QubitId> touched;
    std::set<ModuleId> modules;
    std::int64_t run = 0;
    for (const Layer& l : c.layers) {
        if (l.kind == LayerKind::Intra) {
            ++r.depth;
            r.size += static_cast<std::int64_t>(l.gates.size());
            run = 0;
        } else {
            ++run;
            r.module_depth = std::max(r.module_depth, run);
            r.module_size += static_cast<std::int64_t>(l.gates.size());
        }
        for (const Gate& g : l.gates)
            for (int i = 0; i < g.arity(); ++i) {
                QubitId q = i == 0 ? g.q0 : g.q1;
                touched.insert(q);
                modules.insert(c.qubits[q].module);
            }
    }
    r.width = static_cast<std::int64_t>(touched.size());
    r.module_width = static_cast<std::int64_t>(modules.size());
    return r;
}

}  // namespace csaforge

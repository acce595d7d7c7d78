#include "csaforge/hier.hpp"

#include <algorithm>

namespace csaforge {

HierPtr make_leaf(std::string name, Circuit c) {
    auto h = std::make_shared<HierCircuit>();
    h->name = std::move(name);
    h->body = std::move(c);
    return h;
}

HierPtr compose(std::string name, std::vector<HierStage> stages, bool reuse_width,
                bool reuse_modules) {
    if (stages.empty()) throw DomainError("compose needs at least one stage");
    for (const auto& s : stages)
        if (s.children.empty()) throw DomainError("compose: empty stage");
    auto h = std::make_shared<HierCircuit>();
    h->name = std::move(name);
    h->body = std::move(stages);
    h->reuse_width = reuse_width;
    h->reuse_modules = reuse_modules;
    return h;
}

HierPtr make_opaque(std::string name, HierPtr inner) {
    auto h = std::make_shared<HierCircuit>();
    h->name = std::move(name);
    h->body = std::vector<HierStage>{HierStage{{HierChild{std::move(inner), 1}}, 0, 0, false}};
    h->module_opaque = true;
    return h;
}

ResourceReport count_resources(const HierCircuit& h) {
    if (h.is_leaf()) return count_resources(h.leaf());

    ResourceReport r;
    std::int64_t width_sum = 0, width_max = 0;
    std::int64_t mods_sum = 0, mods_max = 0;
    for (const HierStage& s : h.stages()) {
        std::int64_t stage_depth = 0, stage_width = 0, stage_mods = 0;
        for (const HierChild& ch : s.children) {
            ResourceReport cr = count_resources(*ch.block);
            stage_depth = std::max(stage_depth, cr.depth);
            r.size += ch.multiplicity * cr.size;
            stage_width += ch.multiplicity * cr.width;
            if (ch.block->module_opaque) {
                stage_mods += ch.multiplicity;  // one node of this module graph
            } else {
                stage_mods += ch.multiplicity * cr.module_width;
                r.module_size += ch.multiplicity * cr.module_size;
                r.module_depth = std::max(r.module_depth, cr.module_depth);
            }
        }
        r.depth += stage_depth;
        r.module_size += s.teleport_qubits_after;
        r.module_depth = std::max<std::int64_t>(r.module_depth, s.teleport_rounds_after);
        if (!s.inplace) {
            // An in-place stage revisits qubits and modules counted before.
            width_sum += stage_width;
            mods_sum += stage_mods;
        }
        width_max = std::max(width_max, stage_width);
        mods_max = std::max(mods_max, stage_mods);
    }
    r.width = h.reuse_width ? width_max : width_sum;
    r.module_width = h.reuse_modules ? mods_max : mods_sum;
    if (h.module_opaque) {
        r.module_width = std::max<std::int64_t>(r.module_width, 1);
    }
    return r;
}

std::int64_t stage_count(const HierCircuit& h) {
    if (h.is_leaf()) return 0;
    return static_cast<std::int64_t>(h.stages().size());
}

std::int64_t leaf_instance_count(const HierCircuit& h) {
    if (h.is_leaf()) return 1;
    std::int64_t n = 0;
    for (const HierStage& s : h.stages())
        for (const HierChild& ch : s.children) n += ch.multiplicity * leaf_instance_count(*ch.block);
    return n;
}

}  // namespace csaforge

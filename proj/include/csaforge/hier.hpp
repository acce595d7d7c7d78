#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "csaforge/resources.hpp"

namespace csaforge {

// Hierarchical circuit: a tree of named blocks. A leaf wraps a concrete
// circuit; a node is an ordered list of stages, each stage a multiset of
// child blocks running concurrently. Resources roll up without flattening,
// which is what makes the large block trees tractable.
struct HierCircuit;
using HierPtr = std::shared_ptr<const HierCircuit>;

struct HierChild {
    HierPtr block;
    std::int64_t multiplicity = 1;
};

struct HierStage {
    std::vector<HierChild> children;
    // Qubits teleported from this stage into the next, and how many
    // consecutive teleport timesteps that transfer occupies.
    std::int64_t teleport_qubits_after = 0;
    int teleport_rounds_after = 0;
    // An in-place stage (an uncompute pass) acts on qubits already counted
    // by earlier stages and contributes no new width.
    bool inplace = false;
};

struct HierCircuit {
    std::string name;
    std::variant<Circuit, std::vector<HierStage>> body;

    // Later stages may reuse qubits/modules freed by earlier ones; the
    // corresponding metric then takes the stage maximum instead of the sum.
    bool reuse_width = false;
    bool reuse_modules = false;

    // Opaque blocks count as a single node of the surrounding module graph;
    // their internal teleport traffic is not visible at this level.
    bool module_opaque = false;

    bool is_leaf() const { return std::holds_alternative<Circuit>(body); }
    const Circuit& leaf() const { return std::get<Circuit>(body); }
    const std::vector<HierStage>& stages() const { return std::get<std::vector<HierStage>>(body); }
};

HierPtr make_leaf(std::string name, Circuit c);
HierPtr compose(std::string name, std::vector<HierStage> stages, bool reuse_width = false,
                bool reuse_modules = false);
HierPtr make_opaque(std::string name, HierPtr inner);

ResourceReport count_resources(const HierCircuit& h);
inline ResourceReport count_resources(const HierPtr& h) { return count_resources(*h); }

// Number of stages of a node (0 for a leaf).
std::int64_t stage_count(const HierCircuit& h);

// Total leaf-circuit instances in the tree, multiplicities included.
std::int64_t leaf_instance_count(const HierCircuit& h);

}  // namespace csaforge

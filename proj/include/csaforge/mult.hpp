#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "csaforge/arith.hpp"
#include "csaforge/hier.hpp"

namespace csaforge {

// Placement plan for the products feeding the addition tree. A pair of CSE
// bits with combined weight at least 2^n becomes a z-site holding the n-bit
// modular residue controlled on that product; lighter pairs are plain bits
// grouped into n-bit numbers by ascending significance.
struct PartialProductPlan {
    enum class Variant { Serial, Parallel };

    std::size_t n = 0;
    std::uint64_t m = 0;
    Variant variant = Variant::Parallel;
    std::int64_t t_prime = 0;  // closed-form count 2n^2+16n+11 (parallel) / n (serial)

    std::vector<std::size_t> x_sig, y_sig;  // significance of each CSE bit

    struct ZSite {
        int module_slot = 0;  // destination module index (tile or packed z module)
        int xi = 0, yj = 0;   // controlling bit pair
        std::uint64_t residue = 0;
    };
    std::vector<ZSite> z_sites;

    struct SingleGroup {
        std::vector<std::pair<int, int>> members;  // (xi, yj)
        std::vector<std::size_t> sigs;             // weight of each member
    };
    std::vector<SingleGroup> single_groups;

    std::optional<std::uint64_t> base_a;        // serial only
    std::vector<std::uint64_t> serial_residues; // 2^i a mod m, serial only

    std::int64_t number_count() const {
        return static_cast<std::int64_t>(z_sites.size() + single_groups.size());
    }
};

PartialProductPlan plan_partial_products(std::size_t n, std::uint64_t m,
                                         PartialProductPlan::Variant variant,
                                         std::optional<std::uint64_t> a = std::nullopt);

// Gate-level partial-product creation for the parallel plan. The routing
// lattice is split into vertical strip modules; bit lines spread by
// nearest-neighbor copies inside a strip and teleport across strips; the
// fill ancillae are measured back out before the product Toffolis reuse
// their sites.
struct PpcBuild {
    Circuit circuit;
    std::vector<QubitId> in_x, in_y;
    std::map<std::pair<int, int>, QubitId> products;  // (xi, yj) -> product qubit
    // For standalone builds each z-site's register (bit significance, qubit).
    std::vector<std::vector<std::pair<std::size_t, QubitId>>> z_registers;
};
PpcBuild build_partial_products(const PartialProductPlan& plan, bool standalone_z_sites = true);

// Greedy addition-tree schedule: numbers are identified by index, tiles
// consume three per stage, leftovers carry forward.
struct MmaSchedule {
    struct TileSlot {
        std::array<int, 3> inputs{};
        int out_u = 0, out_v = 0;
    };
    struct Stage {
        std::vector<TileSlot> tiles;
        std::vector<int> carried;
    };
    std::vector<Stage> stages;
    int input_count = 0;
    int number_count = 0;  // inputs plus all tile outputs
    std::array<int, 2> final_numbers{};
};
MmaSchedule schedule_mma(int t_prime);

struct MmaTreeBuild {
    HierPtr hier;
    MmaSchedule schedule;
    std::int64_t stage_count = 0;
    std::int64_t tile_count = 0;
};
MmaTreeBuild build_mma_tree(std::int64_t t_prime, std::size_t n, std::uint64_t m);

// The modular multiplier: partial products, interleave teleports, the tile
// tree, and the mirrored uncompute pass. The flat circuit is materialized
// only at desk scale (n <= 3); the hierarchical roll-up is always available.
struct MultiplierBuild {
    PartialProductPlan plan;
    MmaSchedule schedule;
    HierPtr hier;
    std::optional<Circuit> flat;
    std::int64_t mma_stage_count = 0;
    std::int64_t tile_count = 0;
};
MultiplierBuild build_modular_multiplier(std::size_t n, std::uint64_t m,
                                         PartialProductPlan::Variant variant,
                                         std::optional<std::uint64_t> a = std::nullopt,
                                         bool with_flat = false);

// Classical replay of the same plan and tree on carry-save inputs.
CarrySaveNumber semantic_multiply(const CarrySaveNumber& x, const CarrySaveNumber& y,
                                  std::size_t n, std::uint64_t m);

}  // namespace csaforge

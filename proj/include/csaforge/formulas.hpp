#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csaforge/resources.hpp"

namespace csaforge {

// Central registry of the closed-form resource bounds. Scalar formulas
// (partial-product count, repetition count, tree height) use the same entry
// point with a scalar result.
enum class FormulaId {
    Bell,
    Teleport,
    Fanout,
    Unfanout,
    Toffoli,
    SingleBitCsa,
    ModularAdder,
    Ppc,
    Mm,
    Qcla,
    Modexp,
    TPrime,
    KsvT,
    MmaHeight,
};

const char* to_string(FormulaId id);
std::optional<FormulaId> formula_id_from_string(const std::string& s);
const std::vector<FormulaId>& all_formula_ids();

// Real-valued six-metric bound; metrics the source does not define are absent.
struct FormulaReport {
    std::optional<double> depth, size, width;
    std::optional<double> module_depth, module_size, module_width;
    std::optional<double> scalar;  // for TPrime / KsvT / MmaHeight
};

// Evaluates the bound at n (for MmaHeight the argument is t'). Logarithms
// are real-valued; ceilings apply only where the source uses them.
FormulaReport eval_formula(FormulaId id, std::int64_t n);

struct BoundCheck {
    std::string metric;
    std::int64_t constructed = 0;
    double bound = 0;
    bool pass = false;
    double slack = 0;  // bound - constructed
};

// Per-metric comparison of a constructed report against the formula bound;
// only metrics present in the formula are compared.
std::vector<BoundCheck> check_bounds(const ResourceReport& constructed, FormulaId id,
                                     std::int64_t n);
bool all_pass(const std::vector<BoundCheck>& checks);

}  // namespace csaforge

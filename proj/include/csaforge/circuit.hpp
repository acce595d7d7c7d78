#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csaforge {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConcurrencyViolation : ModelError {
    using ModelError::ModelError;
};
struct TimestepKindViolation : ModelError {
    using ModelError::ModelError;
};
struct AdjacencyError : ModelError {
    using ModelError::ModelError;
};
struct ModulusError : ModelError {
    using ModelError::ModelError;
};
struct UnsupportedLength : ModelError {
    using ModelError::ModelError;
};
struct DomainError : ModelError {
    using ModelError::ModelError;
};

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

enum class GateKind : std::uint8_t { X, Z, H, T, Tdg, CNOT, MeasureZ, Teleport };

inline bool is_two_qubit(GateKind k) { return k == GateKind::CNOT || k == GateKind::Teleport; }
inline bool is_unitary(GateKind k) { return k != GateKind::MeasureZ && k != GateKind::Teleport; }

const char* to_string(GateKind k);
std::optional<GateKind> gate_kind_from_string(const std::string& s);

// Classical parity condition over measurement-record bits. A gate fires when
// XOR of the referenced record bits, plus the constant, equals 1. The empty
// set with constant 1 is the unconditional gate.
struct ParityExpr {
    std::vector<std::uint32_t> bits;  // sorted, unique record slots
    std::uint8_t constant = 1;

    static ParityExpr always() { return {}; }
    static ParityExpr never() { return {{}, 0}; }
    static ParityExpr on_bit(std::uint32_t b) { return {{b}, 0}; }
    static ParityExpr on_parity(std::vector<std::uint32_t> bs);

    bool is_always() const { return bits.empty() && constant == 1; }
    bool is_never() const { return bits.empty() && constant == 0; }
    bool is_trivial() const { return bits.empty(); }

    // Composition of two conditioned Paulis of the same kind: X^a X^b = X^(a xor b).
    ParityExpr xor_with(const ParityExpr& other) const;

    bool eval(const std::vector<std::uint8_t>& record) const;
    bool operator==(const ParityExpr& other) const = default;
};

struct Coord {
    int x = 0;
    int y = 0;
    bool operator==(const Coord&) const = default;
    auto operator<=>(const Coord&) const = default;
};

inline int chebyshev(Coord a, Coord b) {
    int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

using QubitId = std::uint32_t;
using ModuleId = std::uint32_t;

struct QubitInfo {
    ModuleId module = 0;
    std::uint32_t index = 0;  // unique within its module
    Coord coord;
};

struct ModuleInfo {
    ModuleId id = 0;
    std::string name;
};

struct Gate {
    GateKind kind = GateKind::X;
    QubitId q0 = 0;
    QubitId q1 = 0;  // valid when two-qubit
    ParityExpr cond = ParityExpr::always();
    std::optional<std::uint32_t> slot;  // record slot, MeasureZ only

    std::uint8_t arity() const { return is_two_qubit(kind) ? 2 : 1; }
};

enum class LayerKind : std::uint8_t { Intra, Teleport };

struct Layer {
    LayerKind kind = LayerKind::Intra;
    std::vector<Gate> gates;
};

// A layered circuit over located qubits. Layers are in time order; supports
// within one layer are disjoint; a layer holds either gates from the
// elementary set or teleports, never both.
struct Circuit {
    std::vector<ModuleInfo> modules;
    std::vector<QubitInfo> qubits;
    std::vector<Layer> layers;
    std::uint32_t record_size = 0;

    std::size_t width() const { return qubits.size(); }
    const QubitInfo& qubit(QubitId q) const { return qubits.at(q); }
};

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

class CircuitBuilder {
public:
    ModuleId add_module(std::string name);

    // Allocates a qubit at an unoccupied coordinate of the module.
    QubitId add_qubit(ModuleId m, Coord c);
    bool occupied(ModuleId m, Coord c) const;
    std::optional<QubitId> qubit_at(ModuleId m, Coord c) const;

    // Gate constructors. Measurement allocates the next record slot.
    static Gate g1(GateKind k, QubitId q, ParityExpr cond = ParityExpr::always());
    static Gate cnot(QubitId control, QubitId target, ParityExpr cond = ParityExpr::always());
    Gate measure(QubitId q, std::uint32_t* slot_out = nullptr);
    static Gate teleport(QubitId from, QubitId to);

    // Appends one concurrent timestep. Throws ConcurrencyViolation on
    // overlapping supports and TimestepKindViolation on mixed kinds.
    void append_layer(std::vector<Gate> gates);

    // Convenience: each vector element becomes its own layer.
    void append_layers(std::vector<std::vector<Gate>> layers);

    std::uint32_t next_slot() const { return next_slot_; }
    const Circuit& peek() const { return c_; }
    Circuit take();

private:
    Circuit c_;
    std::uint32_t next_slot_ = 0;
    std::map<std::pair<ModuleId, std::uint32_t>, QubitId> by_index_;
    std::map<std::pair<ModuleId, Coord>, QubitId> by_coord_;
    std::vector<std::uint32_t> next_index_;
};

// Functional form: returns a copy of `c` with one more layer.
Circuit append_layer(Circuit c, std::vector<Gate> gates);

// Validates every structural invariant (support disjointness, kind
// homogeneity, teleport modules, coordinate uniqueness, slot ordering).
// Throws on the first violation.
void check_wellformed(const Circuit& c);

}  // namespace csaforge

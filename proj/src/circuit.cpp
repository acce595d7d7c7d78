#include "csaforge/circuit.hpp"

#include <algorithm>
#include <set>

namespace csaforge {

const char* to_string(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "Tdg";
        case GateKind::CNOT: return "CNOT";
        case GateKind::MeasureZ: return "MeasureZ";
        case GateKind::Teleport: return "Teleport";
    }
    return "?";
}

std::optional<GateKind> gate_kind_from_string(const std::string& s) {
    static const std::map<std::string, GateKind> table = {
        {"X", GateKind::X},       {"Z", GateKind::Z},
        {"H", GateKind::H},       {"T", GateKind::T},
        {"Tdg", GateKind::Tdg},   {"CNOT", GateKind::CNOT},
        {"MeasureZ", GateKind::MeasureZ}, {"Teleport", GateKind::Teleport},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

ParityExpr ParityExpr::on_parity(std::vector<std::uint32_t> bs) {
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    return {std::move(bs), 0};
}

ParityExpr ParityExpr::xor_with(const ParityExpr& other) const {
    ParityExpr out;
    out.constant = constant ^ other.constant;
    std::set_symmetric_difference(bits.begin(), bits.end(), other.bits.begin(), other.bits.end(),
                                  std::back_inserter(out.bits));
    return out;
}

bool ParityExpr::eval(const std::vector<std::uint8_t>& record) const {
    std::uint8_t v = constant;
    for (auto b : bits) {
        if (b >= record.size()) throw DomainError("condition references unmeasured record bit");
        v ^= record[b];
    }
    return v != 0;
}

ModuleId CircuitBuilder::add_module(std::string name) {
    ModuleId id = static_cast<ModuleId>(c_.modules.size());
    c_.modules.push_back({id, std::move(name)});
    next_index_.push_back(0);
    return id;
}

QubitId CircuitBuilder::add_qubit(ModuleId m, Coord coord) {
    if (m >= c_.modules.size()) throw DomainError("unknown module");
    if (by_coord_.count({m, coord})) throw DomainError("coordinate already occupied in module");
    QubitId q = static_cast<QubitId>(c_.qubits.size());
    std::uint32_t idx = next_index_[m]++;
    c_.qubits.push_back({m, idx, coord});
    by_index_[{m, idx}] = q;
    by_coord_[{m, coord}] = q;
    return q;
}

bool CircuitBuilder::occupied(ModuleId m, Coord c) const { return by_coord_.count({m, c}) != 0; }

std::optional<QubitId> CircuitBuilder::qubit_at(ModuleId m, Coord c) const {
    auto it = by_coord_.find({m, c});
    if (it == by_coord_.end()) return std::nullopt;
    return it->second;
}

Gate CircuitBuilder::g1(GateKind k, QubitId q, ParityExpr cond) {
    if (is_two_qubit(k) || k == GateKind::MeasureZ) throw DomainError("g1 expects a single-qubit unitary");
    return Gate{k, q, 0, std::move(cond), std::nullopt};
}

Gate CircuitBuilder::cnot(QubitId control, QubitId target, ParityExpr cond) {
    if (control == target) throw DomainError("CNOT needs two distinct qubits");
    return Gate{GateKind::CNOT, control, target, std::move(cond), std::nullopt};
}

Gate CircuitBuilder::measure(QubitId q, std::uint32_t* slot_out) {
    Gate g{GateKind::MeasureZ, q, 0, ParityExpr::always(), next_slot_++};
    if (slot_out) *slot_out = *g.slot;
    return g;
}

Gate CircuitBuilder::teleport(QubitId from, QubitId to) {
    if (from == to) throw DomainError("teleport needs two distinct qubits");
    return Gate{GateKind::Teleport, from, to, ParityExpr::always(), std::nullopt};
}

void CircuitBuilder::append_layer(std::vector<Gate> gates) {
    if (gates.empty()) throw DomainError("empty layer");
    bool any_teleport = false, any_intra = false;
    std::set<QubitId> support;
    for (const Gate& g : gates) {
        (g.kind == GateKind::Teleport ? any_teleport : any_intra) = true;
        for (int i = 0; i < g.arity(); ++i) {
            QubitId q = i == 0 ? g.q0 : g.q1;
            if (q >= c_.qubits.size()) throw DomainError("gate references unknown qubit");
            if (!support.insert(q).second)
                throw ConcurrencyViolation("overlapping gate supports in one timestep");
        }
        if (g.kind == GateKind::Teleport && c_.qubits[g.q0].module == c_.qubits[g.q1].module)
            throw TimestepKindViolation("teleport must cross modules");
        if (g.kind == GateKind::MeasureZ && !g.slot) throw DomainError("measurement without record slot");
        if (g.kind != GateKind::MeasureZ && g.slot) throw DomainError("record slot on a non-measurement");
    }
    if (any_teleport && any_intra)
        throw TimestepKindViolation("teleport and elementary gates share a timestep");
    Layer layer;
    layer.kind = any_teleport ? LayerKind::Teleport : LayerKind::Intra;
    layer.gates = std::move(gates);
    c_.layers.push_back(std::move(layer));
    c_.record_size = next_slot_;
}

void CircuitBuilder::append_layers(std::vector<std::vector<Gate>> layers) {
    for (auto& l : layers) append_layer(std::move(l));
}

Circuit CircuitBuilder::take() {
    c_.record_size = next_slot_;
    return std::move(c_);
}

Circuit append_layer(Circuit c, std::vector<Gate> gates) {
    CircuitBuilder b;
    // Rehydrate the builder around the existing circuit.
    for (auto& m : c.modules) b.add_module(m.name);
    for (auto& q : c.qubits) b.add_qubit(q.module, q.coord);
    std::uint32_t max_slot = 0;
    for (auto& l : c.layers)
        for (auto& g : l.gates)
            if (g.slot) max_slot = std::max(max_slot, *g.slot + 1);
    for (auto& g : gates)
        if (g.kind == GateKind::MeasureZ && !g.slot) g.slot = max_slot++;
    Circuit out = std::move(c);
    // Validate via a throwaway builder sharing the qubit table.
    CircuitBuilder check;
    for (auto& m : out.modules) check.add_module(m.name);
    for (auto& q : out.qubits) check.add_qubit(q.module, q.coord);
    check.append_layer(gates);
    out.layers.push_back(check.peek().layers.back());
    out.record_size = std::max(out.record_size, max_slot);
    return out;
}

void check_wellformed(const Circuit& c) {
    std::set<std::pair<ModuleId, std::uint32_t>> seen_index;
    std::set<std::pair<ModuleId, Coord>> seen_coord;
    for (const auto& q : c.qubits) {
        if (q.module >= c.modules.size()) throw DomainError("qubit in unknown module");
        if (!seen_index.insert({q.module, q.index}).second)
            throw DomainError("duplicate (module, index)");
        if (!seen_coord.insert({q.module, q.coord}).second)
            throw DomainError("duplicate coordinate within module");
    }
    std::uint32_t measured = 0;
    for (std::size_t li = 0; li < c.layers.size(); ++li) {
        const Layer& l = c.layers[li];
        if (l.gates.empty()) throw DomainError("empty layer");
        std::set<QubitId> support;
        std::uint32_t measured_here = 0;
        for (const Gate& g : l.gates) {
            bool tele = g.kind == GateKind::Teleport;
            if (tele != (l.kind == LayerKind::Teleport))
                throw TimestepKindViolation("layer kind does not match gate kinds");
            for (int i = 0; i < g.arity(); ++i) {
                QubitId q = i == 0 ? g.q0 : g.q1;
                if (q >= c.qubits.size()) throw DomainError("gate references unknown qubit");
                if (!support.insert(q).second) throw ConcurrencyViolation("overlapping supports");
            }
            if (tele && c.qubits[g.q0].module == c.qubits[g.q1].module)
                throw TimestepKindViolation("teleport within one module");
            // Conditions may only consult bits measured in earlier timesteps.
            for (auto b : g.cond.bits)
                if (b >= measured) throw DomainError("condition references a future measurement");
            if (g.kind == GateKind::MeasureZ) {
                if (!g.slot) throw DomainError("measurement without slot");
                ++measured_here;
            }
        }
        measured += measured_here;
    }
    if (measured != c.record_size) throw DomainError("record size does not match measurement count");
}

}  // namespace csaforge

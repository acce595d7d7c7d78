#pragma once

#include <vector>

#include "csaforge/circuit.hpp"

namespace csaforge::detail {

// Gathers gates at window-local timesteps so independent cells, movers and
// rails share layers; flushed in time order. Library-internal.
class WindowEmitter {
public:
    explicit WindowEmitter(CircuitBuilder& b) : b_(b) {}

    void at(std::size_t t, Gate g) {
        if (win_.size() <= t) win_.resize(t + 1);
        win_[t].push_back(std::move(g));
    }

    void swap_at(std::size_t t, QubitId p, QubitId q) {
        at(t, CircuitBuilder::cnot(p, q));
        at(t + 1, CircuitBuilder::cnot(q, p));
        at(t + 2, CircuitBuilder::cnot(p, q));
    }

    // Depth-efficient Clifford+T decomposition; the three qubits must be
    // mutually adjacent. Eight timesteps, fifteen gates.
    void toffoli_at(std::size_t t, QubitId c1, QubitId c2, QubitId tg) {
        using B = CircuitBuilder;
        at(t + 0, B::g1(GateKind::Tdg, c1));
        at(t + 0, B::g1(GateKind::Tdg, c2));
        at(t + 0, B::g1(GateKind::H, tg));
        at(t + 1, B::cnot(tg, c1));
        at(t + 2, B::g1(GateKind::T, c1));
        at(t + 2, B::cnot(c2, tg));
        at(t + 3, B::cnot(c2, c1));
        at(t + 3, B::g1(GateKind::T, tg));
        at(t + 4, B::g1(GateKind::Tdg, c1));
        at(t + 4, B::cnot(c2, tg));
        at(t + 5, B::cnot(tg, c1));
        at(t + 6, B::g1(GateKind::T, c1));
        at(t + 6, B::g1(GateKind::Tdg, tg));
        at(t + 7, B::cnot(c2, c1));
        at(t + 7, B::g1(GateKind::H, tg));
    }

    // One carry-save cell: 33 timesteps, 55 gates. Consumes qa (ends |0>),
    // preserves qb and qc; the sum bit lands on w1, the carry on w5.
    void cell_at(std::size_t t, QubitId qa, QubitId qb, QubitId qc, QubitId w1, QubitId w5) {
        using B = CircuitBuilder;
        toffoli_at(t, qb, qc, w5);
        at(t + 8, B::cnot(qc, qb));
        toffoli_at(t + 9, qa, qb, w1);
        at(t + 17, B::cnot(w5, w1));
        at(t + 17, B::cnot(qb, qa));
        at(t + 18, B::cnot(qc, qb));
        toffoli_at(t + 19, qb, qc, w5);
        swap_at(t + 27, w1, w5);
        swap_at(t + 30, w1, qa);
    }

    void flush() {
        for (auto& l : win_)
            if (!l.empty()) b_.append_layer(std::move(l));
        win_.clear();
    }

private:
    CircuitBuilder& b_;
    std::vector<std::vector<Gate>> win_;
};

}  // namespace csaforge::detail

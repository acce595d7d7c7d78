#include "csaforge/comm.hpp"

#include <algorithm>

namespace csaforge {

namespace {

Gate cond_x(QubitId q, ParityExpr e) { return CircuitBuilder::g1(GateKind::X, q, std::move(e)); }
Gate cond_z(QubitId q, ParityExpr e) { return CircuitBuilder::g1(GateKind::Z, q, std::move(e)); }

// Emits the plan as one X layer and one Z layer, skipping never-firing entries.
void emit_plan(CircuitBuilder& b, const CorrectionPlan& plan) {
    std::vector<Gate> xs, zs;
    for (const auto& [q, e] : plan.targets) {
        if (!e.x.is_never()) xs.push_back(cond_x(q, e.x));
        if (!e.z.is_never()) zs.push_back(cond_z(q, e.z));
    }
    if (!xs.empty()) b.append_layer(std::move(xs));
    if (!zs.empty()) b.append_layer(std::move(zs));
}

}  // namespace

BellMeasureBuild build_bell_measure(Coord a, Coord b) {
    if (chebyshev(a, b) > 1) throw AdjacencyError("Bell measurement needs adjacent qubits");
    BellMeasureBuild out;
    CircuitBuilder bld;
    ModuleId m = bld.add_module("bell");
    out.q1 = bld.add_qubit(m, a);
    out.q2 = bld.add_qubit(m, b);
    bld.append_layer({CircuitBuilder::cnot(out.q1, out.q2)});
    bld.append_layer({CircuitBuilder::g1(GateKind::H, out.q1)});
    bld.append_layer({bld.measure(out.q1, &out.j_slot), bld.measure(out.q2, &out.k_slot)});
    out.circuit = bld.take();
    return out;
}

TeleportBuild build_teleport(std::size_t n) {
    if (n < 3 || n % 2 == 0) throw UnsupportedLength("teleport chain length must be odd and >= 3");
    TeleportBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("teleport");
    std::vector<QubitId> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = b.add_qubit(m, {static_cast<int>(i), 0});
    out.source = q[0];
    out.dest = q[n - 1];

    std::vector<Gate> h_layer, pair_layer, bell_cnot, bell_h, meas;
    std::vector<std::uint32_t> j_bits, k_bits;
    for (std::size_t i = 1; i + 1 < n; i += 2) {
        h_layer.push_back(CircuitBuilder::g1(GateKind::H, q[i]));
        pair_layer.push_back(CircuitBuilder::cnot(q[i], q[i + 1]));
    }
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        bell_cnot.push_back(CircuitBuilder::cnot(q[i], q[i + 1]));
        bell_h.push_back(CircuitBuilder::g1(GateKind::H, q[i]));
    }
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        std::uint32_t j = 0, k = 0;
        meas.push_back(b.measure(q[i], &j));
        meas.push_back(b.measure(q[i + 1], &k));
        j_bits.push_back(j);
        k_bits.push_back(k);
    }
    b.append_layer(std::move(h_layer));
    b.append_layer(std::move(pair_layer));
    b.append_layer(std::move(bell_cnot));
    b.append_layer(std::move(bell_h));
    b.append_layer(std::move(meas));
    out.plan.targets[out.dest].x = ParityExpr::on_parity(k_bits);
    out.plan.targets[out.dest].z = ParityExpr::on_parity(j_bits);
    emit_plan(b, out.plan);
    out.circuit = b.take();
    return out;
}

FanoutBuild build_fanout(std::size_t n) {
    if (n < 2) throw UnsupportedLength("fanout needs at least 2 copies");
    FanoutBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("fanout");
    // Line order: source, h, l1, then (x_i, y_i, l_{i+1}) segments, last
    // copy attached directly to the one before it.
    int x = 0;
    auto next = [&] { return b.add_qubit(m, {x++, 0}); };
    QubitId src = next();
    QubitId h = next();
    std::vector<QubitId> l(n), xs(n >= 2 ? n - 2 : 0), ys(n >= 2 ? n - 2 : 0);
    l[0] = next();
    for (std::size_t i = 0; i + 2 < n; ++i) {
        xs[i] = next();
        ys[i] = next();
        l[i + 1] = next();
    }
    l[n - 1] = next();
    out.source = src;
    out.copies = l;

    std::vector<Gate> hs{CircuitBuilder::g1(GateKind::H, h)};
    std::vector<Gate> pairs{CircuitBuilder::cnot(h, l[0])};
    std::vector<Gate> links;
    std::vector<Gate> bell_cnot{CircuitBuilder::cnot(src, h)};
    std::vector<Gate> bell_h{CircuitBuilder::g1(GateKind::H, src)};
    for (std::size_t i = 0; i + 2 < n; ++i) {
        hs.push_back(CircuitBuilder::g1(GateKind::H, ys[i]));
        pairs.push_back(CircuitBuilder::cnot(ys[i], l[i + 1]));
        links.push_back(CircuitBuilder::cnot(l[i], xs[i]));
        bell_cnot.push_back(CircuitBuilder::cnot(xs[i], ys[i]));
        bell_h.push_back(CircuitBuilder::g1(GateKind::H, xs[i]));
    }
    links.push_back(CircuitBuilder::cnot(l[n - 2], l[n - 1]));

    std::vector<Gate> meas;
    std::vector<std::uint32_t> j_bits(n - 1), k_bits(n - 1);
    meas.push_back(b.measure(src, &j_bits[0]));
    meas.push_back(b.measure(h, &k_bits[0]));
    for (std::size_t i = 0; i + 2 < n; ++i) {
        meas.push_back(b.measure(xs[i], &j_bits[i + 1]));
        meas.push_back(b.measure(ys[i], &k_bits[i + 1]));
    }

    b.append_layer(std::move(hs));
    b.append_layer(std::move(pairs));
    b.append_layer(std::move(links));
    b.append_layer(std::move(bell_cnot));
    b.append_layer(std::move(bell_h));
    b.append_layer(std::move(meas));

    // Cascading corrections, parity-merged: copy i takes X on k_1..k_i
    // (the last copy shares the cascade of the one before it) and Z on j_i.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t hi = std::min(i + 1, n - 1);
        std::vector<std::uint32_t> ks(k_bits.begin(), k_bits.begin() + hi);
        out.plan.targets[l[i]].x = ParityExpr::on_parity(std::move(ks));
        if (i + 1 < n) out.plan.targets[l[i]].z = ParityExpr::on_bit(j_bits[i]);
    }
    emit_plan(b, out.plan);
    out.circuit = b.take();
    return out;
}

UnfanoutBuild build_unfanout(std::size_t n) {
    if (n < 2) throw UnsupportedLength("unfanout needs at least 2 qubits");
    UnfanoutBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("unfanout");
    std::vector<QubitId> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = b.add_qubit(m, {static_cast<int>(i), 0});
    out.inputs = q;
    out.target = q[n - 1];

    std::vector<Gate> hs;
    for (std::size_t i = 0; i < n; ++i) hs.push_back(CircuitBuilder::g1(GateKind::H, q[i]));
    b.append_layer(std::move(hs));
    std::vector<Gate> a, c;
    for (std::size_t i = 0; i + 1 < n; i += 2) a.push_back(CircuitBuilder::cnot(q[i], q[i + 1]));
    for (std::size_t i = 1; i + 1 < n; i += 2) c.push_back(CircuitBuilder::cnot(q[i], q[i + 1]));
    b.append_layer(std::move(a));
    if (!c.empty()) b.append_layer(std::move(c));

    std::vector<Gate> meas;
    std::vector<std::uint32_t> j(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) meas.push_back(b.measure(q[i], &j[i]));
    b.append_layer(std::move(meas));
    b.append_layer({CircuitBuilder::g1(GateKind::H, out.target)});

    // The residual phase is the parity of the "even" outcomes j_2, j_4, ...
    // up to position n-2 (1-based), which excludes the next-to-last qubit
    // when n is odd.
    std::vector<std::uint32_t> parity;
    for (std::size_t pos = 2; pos + 2 <= n; pos += 2) parity.push_back(j[pos - 1]);
    if (!parity.empty())
        b.append_layer({cond_z(out.target, ParityExpr::on_parity(std::move(parity)))});
    out.circuit = b.take();
    return out;
}

Circuit merge_corrections(const Circuit& c) {
    struct Pending {
        std::size_t layer;  // index into `out`
        std::size_t pos;    // gate index within that layer
        GateKind kind;
    };
    std::vector<Layer> out;
    std::vector<std::uint32_t> measured_before;  // slots measured before each output layer
    std::map<QubitId, Pending> open;
    std::uint32_t measured = 0;

    for (const Layer& layer : c.layers) {
        out.push_back(Layer{layer.kind, {}});
        measured_before.push_back(measured);
        for (const Gate& g : layer.gates) {
            bool pauli = (g.kind == GateKind::X || g.kind == GateKind::Z) && g.arity() == 1;
            if (!pauli) {
                for (int i = 0; i < g.arity(); ++i) open.erase(i == 0 ? g.q0 : g.q1);
                if (g.kind == GateKind::MeasureZ) ++measured;
                out.back().gates.push_back(g);
                continue;
            }
            auto it = open.find(g.q0);
            if (it != open.end() && it->second.kind == g.kind) {
                // X^a followed by X^b is X^(a xor b); merging is only legal
                // when the earlier slot already has every referenced bit.
                std::uint32_t avail = measured_before[it->second.layer];
                bool movable = std::all_of(g.cond.bits.begin(), g.cond.bits.end(),
                                           [&](std::uint32_t bit) { return bit < avail; });
                if (movable) {
                    Gate& prev = out[it->second.layer].gates[it->second.pos];
                    prev.cond = prev.cond.xor_with(g.cond);
                    continue;
                }
            }
            out.back().gates.push_back(g);
            open[g.q0] = Pending{out.size() - 1, out.back().gates.size() - 1, g.kind};
        }
    }

    Circuit merged;
    merged.modules = c.modules;
    merged.qubits = c.qubits;
    merged.record_size = c.record_size;
    for (auto& l : out) {
        std::erase_if(l.gates, [](const Gate& g) {
            return (g.kind == GateKind::X || g.kind == GateKind::Z) && g.arity() == 1 &&
                   g.cond.is_never();
        });
        if (!l.gates.empty()) merged.layers.push_back(std::move(l));
    }
    return merged;
}

}  // namespace csaforge

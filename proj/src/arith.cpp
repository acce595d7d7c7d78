#include "csaforge/arith.hpp"

#include <algorithm>
#include <map>

#include "csaforge/sim.hpp"
#include "window_emitter.hpp"

namespace csaforge {

namespace {

using B = CircuitBuilder;

struct Holder {
    QubitId q = 0;
    Coord c;
};

// The CSA tile. Position i occupies columns 3i..3i+2; the four cell layers
// live in three-row bands, top to bottom. Within a band (rows aR > bR > cR):
//   a-site (3i+2, aR);  b-site (3i+1, bR), w1 (3i+2, bR);
//   c-site (3i+1, cR), w5 (3i+2, cR).
// Fanout rails run along the cR rows; measured rail helpers are reset and
// reused as the band's w5 ancillae and cell pads. Control bits travel fixed
// relative paths on the right edge, so the window schedule (and with it the
// counted depth) does not depend on n.
class TileBuilder {
public:
    TileBuilder(std::size_t n, std::uint64_t m) : n_(n), rt_(ResidueTable::make(n, m)) {
        mod_ = b_.add_module("csa_tile");
    }

    ModularAdderBuild build() {
        ModularAdderBuild out;
        out.n = n_;
        out.m = rt_.m;
        const int N = static_cast<int>(n_);

        detail::WindowEmitter w(b_);
        for (int i = 0; i <= N + 1; ++i) {
            QubitId qa = site(3 * i + 2, row_a(0));
            QubitId qb = site(3 * i + 1, row_b(0));
            QubitId qc = site(3 * i + 1, row_c(0));
            out.in_a.push_back(qa);
            out.in_b.push_back(qb);
            out.in_c.push_back(qc);
            QubitId w1 = site(3 * i + 2, row_b(0));
            QubitId w5 = site(3 * i + 2, row_c(0));
            w.cell_at(0, qa, qb, qc, w1, w5);
            u_[i] = {w1, {3 * i + 2, row_b(0)}};
            v_[i + 1] = {w5, {3 * i + 2, row_c(0)}};
        }
        w.flush();

        // Truncate the three overflow bits; they become residue controls.
        Holder ctl_v1 = take_v(N + 1);
        Holder ctl_u = take_u(N + 1);
        Holder ctl_v2 = take_v(N + 2);

        reduction_band(1, rt_.r1, ctl_v1);
        reduction_band(2, rt_.r2, ctl_u);
        reduction_band(3, rt_.r3, ctl_v2);

        for (int i = 0; i <= N + 1; ++i) out.out_u.push_back(u_.at(i).q);
        for (auto& [pos, h] : v_) out.out_v.push_back({static_cast<std::size_t>(pos), h.q});
        out.circuit = b_.take();
        return out;
    }

private:
    int row_a(int band) const { return 12 - 3 * band; }
    int row_b(int band) const { return 11 - 3 * band; }
    int row_c(int band) const { return 10 - 3 * band; }

    QubitId site(int x, int y) {
        if (auto q = b_.qubit_at(mod_, {x, y})) return *q;
        return b_.add_qubit(mod_, {x, y});
    }

    Holder take_u(int pos) {
        Holder h = u_.at(pos);
        u_.erase(pos);
        return h;
    }
    Holder take_v(int pos) {
        Holder h = v_.at(pos);
        v_.erase(pos);
        return h;
    }

    Holder walk(detail::WindowEmitter& w, std::size_t t0, Holder h, const std::vector<Coord>& path) {
        for (std::size_t s = 0; s < path.size(); ++s) {
            QubitId next = site(path[s].x, path[s].y);
            w.swap_at(t0 + 3 * s, h.q, next);
            h = {next, path[s]};
        }
        return h;
    }

    struct Rail {
        std::vector<int> positions;     // copy positions, descending from n
        std::map<int, QubitId> copies;  // position -> copy qubit
        int i_lo = 0;
    };

    // Fanout of the parked control along the band's cR row: copies at every
    // c-site from position n down to the lowest set residue bit, chained
    // through helper pairs on the in-between columns.
    Rail emit_rail(detail::WindowEmitter& w, const Holder& park, std::uint64_t mask, int band) {
        const int N = static_cast<int>(n_);
        const int cR = row_c(band);
        Rail rail;
        int i_lo = 0;
        while (((mask >> i_lo) & 1) == 0) ++i_lo;
        rail.i_lo = i_lo;

        QubitId h = site(3 * N + 2, cR);
        std::vector<QubitId> xs, ys, ells;
        for (int i = N; i >= i_lo; --i) {
            ells.push_back(site(3 * i + 1, cR));
            rail.positions.push_back(i);
            if (i > i_lo) {
                xs.push_back(site(3 * i, cR));
                ys.push_back(site(3 * (i - 1) + 2, cR));
            }
        }
        std::size_t gaps = xs.size();

        w.at(0, B::g1(GateKind::H, h));
        for (auto y : ys) w.at(0, B::g1(GateKind::H, y));
        w.at(1, B::cnot(h, ells[0]));
        for (std::size_t g = 0; g < gaps; ++g) w.at(1, B::cnot(ys[g], ells[g + 1]));
        for (std::size_t g = 0; g < gaps; ++g) w.at(2, B::cnot(ells[g], xs[g]));
        w.at(3, B::cnot(park.q, h));
        for (std::size_t g = 0; g < gaps; ++g) w.at(3, B::cnot(xs[g], ys[g]));
        w.at(4, B::g1(GateKind::H, park.q));
        for (std::size_t g = 0; g < gaps; ++g) w.at(4, B::g1(GateKind::H, xs[g]));

        std::vector<std::uint32_t> js(gaps + 1), ks(gaps + 1);
        w.at(5, b_.measure(park.q, &js[0]));
        w.at(5, b_.measure(h, &ks[0]));
        for (std::size_t g = 0; g < gaps; ++g) {
            w.at(5, b_.measure(xs[g], &js[g + 1]));
            w.at(5, b_.measure(ys[g], &ks[g + 1]));
        }

        // Cascading corrections, parity-merged per copy; measured helpers
        // are reset within the same two timesteps.
        std::vector<std::uint32_t> cum;
        for (std::size_t t = 0; t <= gaps; ++t) {
            cum.push_back(ks[t]);
            w.at(6, B::g1(GateKind::X, ells[t], ParityExpr::on_parity(cum)));
            w.at(7, B::g1(GateKind::Z, ells[t], ParityExpr::on_bit(js[t])));
        }
        w.at(6, B::g1(GateKind::X, park.q, ParityExpr::on_bit(js[0])));
        w.at(7, B::g1(GateKind::X, h, ParityExpr::on_bit(ks[0])));
        for (std::size_t g = 0; g < gaps; ++g) {
            w.at(6, B::g1(GateKind::X, xs[g], ParityExpr::on_bit(js[g + 1])));
            w.at(7, B::g1(GateKind::X, ys[g], ParityExpr::on_bit(ks[g + 1])));
        }

        for (std::size_t t = 0; t <= gaps; ++t) rail.copies[rail.positions[t]] = ells[t];
        (void)band;
        return rail;
    }

    // Measures out the copies the cells will not consume, fixing the phase
    // on the lowest consumed copy and resetting the measured sites to |0>.
    void emit_release(detail::WindowEmitter& w, const Rail& rail, std::uint64_t mask) {
        std::vector<std::uint32_t> outcomes;
        std::vector<std::pair<QubitId, std::uint32_t>> extras;
        for (int pos : rail.positions) {
            if ((mask >> pos) & 1) continue;
            QubitId q = rail.copies.at(pos);
            w.at(0, B::g1(GateKind::H, q));
            std::uint32_t s = 0;
            w.at(1, b_.measure(q, &s));
            extras.push_back({q, s});
            outcomes.push_back(s);
        }
        if (extras.empty()) return;
        for (auto [q, s] : extras) w.at(2, B::g1(GateKind::X, q, ParityExpr::on_bit(s)));
        w.at(2, B::g1(GateKind::Z, rail.copies.at(rail.i_lo), ParityExpr::on_parity(outcomes)));
    }

    void reduction_band(int band, std::uint64_t mask, Holder ctl) {
        const int N = static_cast<int>(n_);
        const int aR = row_a(band), bR = row_b(band);
        const int paR = row_a(band - 1), pbR = row_b(band - 1), pcR = row_c(band - 1);
        const int cR = row_c(band);

        // The parks double as the band's rightmost w1 ancilla: the control is
        // measured by the rail and the site reset before the cells need it.
        // The long treks lean on freed or garbage sites next to the top cell.
        detail::WindowEmitter w(b_);
        std::vector<Coord> path;
        if (band == 1) {
            path = {{3 * N + 2, 9}, {3 * N + 2, 8}};
        } else if (band == 2) {
            path = {{3 * N + 4, 10}, {3 * N + 3, 9}, {3 * N + 3, 8},
                    {3 * N + 3, 7},  {3 * N + 3, 6}, {3 * N + 2, 5}};
        } else {
            path = {{3 * N + 4, 10}, {3 * N + 3, 9}, {3 * N + 3, 8}, {3 * N + 3, 7}, {3 * N + 3, 6},
                    {3 * N + 3, 5},  {3 * N + 3, 4}, {3 * N + 3, 3}, {3 * N + 2, 2}};
        }
        Holder park = walk(w, 0, ctl, path);
        w.flush();

        detail::WindowEmitter wf(b_);
        Rail rail = emit_rail(wf, park, mask, band);
        wf.flush();

        detail::WindowEmitter wr(b_);
        emit_release(wr, rail, mask);
        wr.flush();

        // Carry movers drop diagonally into this band's b-sites; the two
        // skip-layer carries take their own lanes on the right edge.
        detail::WindowEmitter wv(b_);
        std::map<int, Holder> v_in;
        for (auto it = v_.begin(); it != v_.end();) {
            int pos = it->first;
            if (pos <= N) {
                v_in[pos] = walk(wv, 0, it->second, {{3 * pos, aR}, {3 * pos + 1, bR}});
                it = v_.erase(it);
            } else {
                ++it;
            }
        }
        if (band == 2 && skip_.has_value())
            skip_ = walk(wv, 0, *skip_, {{3 * N + 3, 6}, {3 * N + 4, 5}});
        if (band == 3) {
            if (skip_.has_value()) skip_ = walk(wv, 0, *skip_, {{3 * N + 4, 4}, {3 * N + 4, 3}});
            if (skip2_.has_value()) skip2_ = walk(wv, 0, *skip2_, {{3 * N + 3, 3}, {3 * N + 4, 2}});
        }
        // Pass-through sum bits descend two rows now and one more next window.
        for (auto& [pos, h] : u_)
            if (h.c.y == paR) h = walk(wv, 0, h, {{h.c.x, pbR}, {h.c.x, pcR}});
        wv.flush();

        detail::WindowEmitter wu(b_);
        for (auto& [pos, h] : u_) {
            if (h.c.y == pbR)
                h = walk(wu, 0, h, {{h.c.x, pcR}, {h.c.x, aR}});
            else if (h.c.y == pcR)
                h = walk(wu, 0, h, {{h.c.x, aR}});
        }
        wu.flush();

        // Cells wherever at least two wires meet; single wires pass through.
        detail::WindowEmitter wc(b_);
        std::map<int, Holder> v_out;
        for (int i = 0; i <= N; ++i) {
            Holder& uh = u_.at(i);
            bool has_v = v_in.count(i) != 0;
            bool has_r = ((mask >> i) & 1) != 0;
            if (1 + (has_v ? 1 : 0) + (has_r ? 1 : 0) < 2) continue;
            QubitId qa = uh.q;
            QubitId qb = has_v ? v_in.at(i).q : site(3 * i + 1, bR);
            QubitId qc = has_r ? rail.copies.at(i) : site(3 * i + 1, cR);
            QubitId w1 = site(3 * i + 2, bR);
            QubitId w5 = site(3 * i + 2, cR);
            wc.cell_at(0, qa, qb, qc, w1, w5);
            u_[i] = {w1, {3 * i + 2, bR}};
            v_out[i + 1] = {w5, {3 * i + 2, cR}};
        }
        if (band == 1 && v_out.count(N + 1)) {
            skip_ = v_out.at(N + 1);  // v'_{n+1} skips the next band
            v_out.erase(N + 1);
        }
        if (band == 2 && v_out.count(N + 1)) {
            skip2_ = v_out.at(N + 1);
            v_out.erase(N + 1);
        }
        if (band == 3) {
            if (skip_.has_value() && skip2_.has_value()) {
                // Top position closes with a bare XOR; its carry is provably 0.
                wc.at(0, B::cnot(skip2_->q, skip_->q));
                u_[N + 1] = *skip_;
            } else if (skip_.has_value()) {
                u_[N + 1] = *skip_;
            }
            skip_.reset();
            skip2_.reset();
        }
        wc.flush();

        for (auto& [pos, h] : v_out) v_[pos] = h;
    }

    std::size_t n_;
    ResidueTable rt_;
    CircuitBuilder b_;
    ModuleId mod_ = 0;
    std::map<int, Holder> u_, v_;
    std::optional<Holder> skip_, skip2_;
};

}  // namespace

ToffoliBuild build_toffoli() {
    ToffoliBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("toffoli");
    out.c1 = b.add_qubit(m, {0, 0});
    out.c2 = b.add_qubit(m, {0, 1});
    out.target = b.add_qubit(m, {1, 0});
    detail::WindowEmitter w(b);
    w.toffoli_at(0, out.c1, out.c2, out.target);
    w.flush();
    out.circuit = b.take();
    return out;
}

SingleBitCsaBuild build_single_bit_csa() {
    SingleBitCsaBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("csa_cell");
    out.a = b.add_qubit(m, {2, 2});
    out.b = b.add_qubit(m, {1, 1});
    out.u = b.add_qubit(m, {2, 1});  // w1
    out.c = b.add_qubit(m, {1, 0});
    out.v = b.add_qubit(m, {2, 0});  // w5
    detail::WindowEmitter w(b);
    w.cell_at(0, out.a, out.b, out.c, out.u, out.v);
    w.flush();
    out.circuit = b.take();
    return out;
}

TwoTwoBuild build_two_two_adder() {
    TwoTwoBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("two_two");
    out.a = b.add_qubit(m, {0, 1});
    out.b = b.add_qubit(m, {1, 1});
    out.u = b.add_qubit(m, {0, 0});
    out.v = b.add_qubit(m, {1, 0});
    detail::WindowEmitter w(b);
    w.toffoli_at(0, out.a, out.b, out.v);
    w.at(8, B::cnot(out.a, out.u));
    w.at(9, B::cnot(out.b, out.u));
    w.flush();
    out.circuit = b.take();
    return out;
}

CsaLayerBuild build_csa_layer(std::size_t n_prime) {
    if (n_prime < 1) throw DomainError("layer needs at least one position");
    CsaLayerBuild out;
    CircuitBuilder b;
    ModuleId m = b.add_module("csa_layer");
    detail::WindowEmitter w(b);
    for (std::size_t i = 0; i < n_prime; ++i) {
        int x = 3 * static_cast<int>(i);
        QubitId qa = b.add_qubit(m, {x + 2, 2});
        QubitId qb = b.add_qubit(m, {x + 1, 1});
        QubitId w1 = b.add_qubit(m, {x + 2, 1});
        QubitId qc = b.add_qubit(m, {x + 1, 0});
        QubitId w5 = b.add_qubit(m, {x + 2, 0});
        w.cell_at(0, qa, qb, qc, w1, w5);
        out.a.push_back(qa);
        out.b.push_back(qb);
        out.c.push_back(qc);
        out.u.push_back(w1);
        out.v.push_back(w5);
    }
    w.flush();
    out.circuit = b.take();
    return out;
}

ModularAdderBuild build_modular_adder(std::size_t n, std::uint64_t m) {
    return TileBuilder(n, m).build();
}

CarrySaveNumber simulate_modular_adder(const ModularAdderBuild& tile, std::uint64_t a,
                                       std::uint64_t b, std::uint64_t c, std::uint64_t seed) {
    std::vector<std::pair<QubitId, int>> init;
    for (std::size_t i = 0; i < tile.in_a.size(); ++i) {
        init.push_back({tile.in_a[i], static_cast<int>((a >> i) & 1)});
        init.push_back({tile.in_b[i], static_cast<int>((b >> i) & 1)});
        init.push_back({tile.in_c[i], static_cast<int>((c >> i) & 1)});
    }
    SimState st = run(tile.circuit, init, Outcomes::seeded(seed));
    CarrySaveNumber out;
    for (std::size_t i = 0; i < tile.out_u.size(); ++i)
        out.set_u_bit(i, static_cast<std::uint8_t>(st.classical_bit(tile.out_u[i])));
    for (auto& [pos, q] : tile.out_v)
        out.set_v_bit(pos, static_cast<std::uint8_t>(st.classical_bit(q)));
    return out;
}

}  // namespace csaforge

#include "csaforge/mult.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>

#include "csaforge/comm.hpp"
#include "csaforge/oracle.hpp"
#include "window_emitter.hpp"

namespace csaforge {

namespace {

using B = CircuitBuilder;

std::vector<std::size_t> cse_significances(std::size_t n) {
    std::vector<std::size_t> sigs;
    for (std::size_t i = 0; i <= n + 1; ++i) sigs.push_back(i);  // u part
    for (std::size_t i = 1; i <= n + 1; ++i) sigs.push_back(i);  // v part
    return sigs;
}

}  // namespace

PartialProductPlan plan_partial_products(std::size_t n, std::uint64_t m,
                                         PartialProductPlan::Variant variant,
                                         std::optional<std::uint64_t> a) {
    ResidueTable::make(n, m);  // validates n and m
    PartialProductPlan plan;
    plan.n = n;
    plan.m = m;
    plan.variant = variant;

    if (variant == PartialProductPlan::Variant::Serial) {
        if (!a) throw DomainError("serial plan needs the classical base");
        plan.base_a = *a;
        plan.t_prime = static_cast<std::int64_t>(n);
        std::uint64_t shifted = *a % m;
        for (std::size_t i = 0; i < n; ++i) {
            plan.serial_residues.push_back(shifted);
            shifted = (shifted * 2) % m;
        }
        return plan;
    }

    std::int64_t N = static_cast<std::int64_t>(n);
    plan.t_prime = 2 * N * N + 16 * N + 11;
    plan.x_sig = cse_significances(n);
    plan.y_sig = plan.x_sig;

    // Pairs lighter than 2^n stay single bits, packed greedily by ascending
    // significance; heavier pairs each get a z-site with a precomputed
    // modular residue.
    std::vector<std::pair<std::size_t, std::pair<int, int>>> singles;
    int slot = 0;
    for (int xi = 0; xi < static_cast<int>(plan.x_sig.size()); ++xi)
        for (int yj = 0; yj < static_cast<int>(plan.y_sig.size()); ++yj) {
            std::size_t s = plan.x_sig[xi] + plan.y_sig[yj];
            if (s < n) {
                singles.push_back({s, {xi, yj}});
            } else {
                std::uint64_t residue = (std::uint64_t{1} << s) % m;
                plan.z_sites.push_back({slot++, xi, yj, residue});
            }
        }
    std::stable_sort(singles.begin(), singles.end(),
                     [](auto& l, auto& r) { return l.first < r.first; });
    std::vector<std::uint64_t> used;
    for (auto& [s, pair] : singles) {
        std::size_t g = 0;
        while (g < used.size() && (used[g] >> s) & 1) ++g;
        if (g == used.size()) {
            used.push_back(0);
            plan.single_groups.push_back({});
        }
        used[g] |= std::uint64_t{1} << s;
        plan.single_groups[g].members.push_back(pair);
        plan.single_groups[g].sigs.push_back(s);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Partial-product lattice
// ---------------------------------------------------------------------------

namespace {

// Line-cell (l, j) sits at global (2l, 2j): the x copy of line l at
// (2l, 2j+1), the y copy of line j at (2l+1, 2j), and the even-even corner
// (2l, 2j) reused three times over: x-fill ancilla, y-fill ancilla, then
// product target. Vertical strips are the modules; x lines spread inside a
// strip, y lines teleport across strip boundaries.
class LatticeBuilder {
public:
    explicit LatticeBuilder(const PartialProductPlan& plan)
        : plan_(plan), L_(plan.x_sig.size()) {
        per_strip_ = std::max<std::size_t>(2, (40 * plan_.n * 4 / 5) / (3 * L_));
        strips_ = (L_ + per_strip_ - 1) / per_strip_;
        for (std::size_t k = 0; k < strips_; ++k)
            strip_mods_.push_back(b_.add_module("ppc_strip_" + std::to_string(k)));
    }

    QubitId site(int gx, int gy) {
        ModuleId mod = strip_mods_[static_cast<std::size_t>(gx) / 2 / per_strip_];
        if (auto q = b_.qubit_at(mod, {gx, gy})) return *q;
        return b_.add_qubit(mod, {gx, gy});
    }

    PpcBuild build(bool standalone_z) {
        PpcBuild out;
        const int L = static_cast<int>(L_);
        for (int l = 0; l < L; ++l) out.in_x.push_back(site(2 * l, 2 * l + 1));
        for (int j = 0; j < L; ++j) out.in_y.push_back(site(2 * j + 1, 2 * j));

        x_fill();
        release_x();
        y_fill();
        release_y();

        detail::WindowEmitter w(b_);
        for (int l = 0; l < L; ++l)
            for (int j = 0; j < L; ++j)
                w.toffoli_at(0, site(2 * l, 2 * j + 1), site(2 * l + 1, 2 * j),
                             site(2 * l, 2 * j));
        w.flush();
        for (int l = 0; l < L; ++l)
            for (int j = 0; j < L; ++j) out.products[{l, j}] = site(2 * l, 2 * j);

        if (standalone_z) emit_z_sites(out);
        out.circuit = b_.take();
        return out;
    }

private:
    // Packed z-site modules; multi-bit residues extend by local chains.
    void emit_z_sites(PpcBuild& out) {
        constexpr std::size_t kPerModule = 3;
        std::vector<ModuleId> zmods;
        std::vector<Gate> teles;
        std::vector<std::pair<QubitId, QubitId>> chains;
        out.z_registers.resize(plan_.z_sites.size());
        for (std::size_t zi = 0; zi < plan_.z_sites.size(); ++zi) {
            const auto& z = plan_.z_sites[zi];
            if (zi % kPerModule == 0)
                zmods.push_back(b_.add_module("z_" + std::to_string(zi / kPerModule)));
            ModuleId zm = zmods.back();
            int col = static_cast<int>(zi % kPerModule);
            QubitId prod = out.products.at({z.xi, z.yj});
            int row = 0;
            QubitId first = 0;
            for (std::size_t s = 0; s < 64; ++s) {
                if (!((z.residue >> s) & 1)) continue;
                QubitId dst = b_.add_qubit(zm, {col, row});
                if (row == 0) {
                    teles.push_back(B::teleport(prod, dst));
                    first = dst;
                } else {
                    chains.push_back({first, dst});
                }
                out.z_registers[zi].push_back({s, dst});
                ++row;
            }
        }
        b_.append_layer(std::move(teles));
        while (!chains.empty()) {
            std::vector<Gate> layer;
            std::set<QubitId> used;
            std::vector<std::pair<QubitId, QubitId>> rest;
            for (auto& [src, dst] : chains) {
                if (used.count(src) || used.count(dst)) {
                    rest.push_back({src, dst});
                    continue;
                }
                used.insert(src);
                used.insert(dst);
                layer.push_back(B::cnot(src, dst));
            }
            b_.append_layer(std::move(layer));
            chains = std::move(rest);
        }
    }

    void x_fill() {
        const int L = static_cast<int>(L_);
        std::vector<std::pair<int, int>> fronts;
        for (int l = 0; l < L; ++l) fronts.push_back({2 * l + 1, 2 * l + 1});
        bool progress = true;
        while (progress) {
            progress = false;
            std::vector<Gate> layer;
            for (int l = 0; l < L; ++l) {
                auto& [lo, hi] = fronts[l];
                bool joint = lo == hi;  // both fronts share the seed qubit
                if (lo > 1) {
                    layer.push_back(B::cnot(site(2 * l, lo), site(2 * l, lo - 1)));
                    --lo;
                }
                if (!(joint && lo < hi) && hi < 2 * L - 1) {
                    layer.push_back(B::cnot(site(2 * l, hi), site(2 * l, hi + 1)));
                    ++hi;
                }
            }
            if (!layer.empty()) {
                b_.append_layer(std::move(layer));
                progress = true;
            }
        }
    }

    void release_x() {
        const int L = static_cast<int>(L_);
        std::vector<Gate> hs, ms, fix;
        for (int l = 0; l < L; ++l) {
            std::vector<std::uint32_t> outs;
            for (int j = 1; j < L; ++j) {
                QubitId q = site(2 * l, 2 * j);
                hs.push_back(B::g1(GateKind::H, q));
                std::uint32_t s = 0;
                ms.push_back(b_.measure(q, &s));
                fix.push_back(B::g1(GateKind::X, q, ParityExpr::on_bit(s)));
                outs.push_back(s);
            }
            fix.push_back(B::g1(GateKind::Z, site(2 * l, 1), ParityExpr::on_parity(outs)));
        }
        b_.append_layer(std::move(hs));
        b_.append_layer(std::move(ms));
        b_.append_layer(std::move(fix));
    }

    void y_fill() {
        const int L = static_cast<int>(L_);
        const int K = static_cast<int>(strips_);
        const int P = static_cast<int>(per_strip_);
        auto strip_lo = [&](int k) { return 2 * k * P; };
        auto strip_hi = [&](int k) { return std::min(2 * (k + 1) * P - 1, 2 * L - 1); };

        std::vector<int> home(L);
        for (int j = 0; j < L; ++j) home[j] = j / P;

        auto fill_jobs = [&](std::vector<std::array<int, 3>> jobs) {
            std::vector<std::array<int, 4>> fr;
            for (auto& [j, k, c] : jobs) fr.push_back({j, k, c, c});
            bool progress = true;
            while (progress) {
                progress = false;
                std::vector<Gate> layer;
                for (auto& f : fr) {
                    int j = f[0], k = f[1];
                    bool joint = f[2] == f[3];
                    if (f[2] > strip_lo(k)) {
                        layer.push_back(B::cnot(site(f[2], 2 * j), site(f[2] - 1, 2 * j)));
                        --f[2];
                    }
                    if (!(joint && f[2] < f[3]) && f[3] < strip_hi(k)) {
                        layer.push_back(B::cnot(site(f[3], 2 * j), site(f[3] + 1, 2 * j)));
                        ++f[3];
                    }
                }
                if (!layer.empty()) {
                    b_.append_layer(std::move(layer));
                    progress = true;
                }
            }
        };

        std::vector<std::array<int, 3>> jobs;
        for (int j = 0; j < L; ++j) jobs.push_back({j, home[j], 2 * j + 1});
        fill_jobs(std::move(jobs));

        int max_wave = 0;
        for (int j = 0; j < L; ++j)
            max_wave = std::max({max_wave, home[j], K - 1 - home[j]});
        for (int wave = 1; wave <= max_wave; ++wave) {
            std::vector<Gate> teles;
            std::vector<std::array<int, 3>> next;
            for (int j = 0; j < L; ++j) {
                int kl = home[j] - wave;
                if (kl >= 0) {
                    QubitId src = site(strip_lo(kl + 1), 2 * j);
                    QubitId dst = site(strip_hi(kl), 2 * j);
                    teles.push_back(B::teleport(src, dst));
                    cleared_.insert(src);
                    next.push_back({j, kl, strip_hi(kl)});
                }
                int kr = home[j] + wave;
                if (kr <= K - 1) {
                    QubitId src = site(strip_hi(kr - 1) - 1, 2 * j);
                    QubitId dst = site(strip_lo(kr), 2 * j);
                    teles.push_back(B::teleport(src, dst));
                    cleared_.insert(src);
                    next.push_back({j, kr, strip_lo(kr)});
                }
            }
            if (teles.empty()) continue;
            b_.append_layer(std::move(teles));
            fill_jobs(std::move(next));
        }
    }

    void release_y() {
        const int L = static_cast<int>(L_);
        std::vector<Gate> hs, ms, fix;
        for (int j = 0; j < L; ++j) {
            std::vector<std::uint32_t> outs;
            for (int l = 0; l < L; ++l) {
                QubitId q = site(2 * l, 2 * j);
                if (cleared_.count(q)) continue;  // consumed as a teleport seed
                hs.push_back(B::g1(GateKind::H, q));
                std::uint32_t s = 0;
                ms.push_back(b_.measure(q, &s));
                fix.push_back(B::g1(GateKind::X, q, ParityExpr::on_bit(s)));
                outs.push_back(s);
            }
            if (!outs.empty())
                fix.push_back(
                    B::g1(GateKind::Z, site(2 * j + 1, 2 * j), ParityExpr::on_parity(outs)));
        }
        b_.append_layer(std::move(hs));
        b_.append_layer(std::move(ms));
        b_.append_layer(std::move(fix));
    }

    const PartialProductPlan& plan_;
    std::size_t L_;
    std::size_t per_strip_ = 2;
    std::size_t strips_ = 1;
    std::vector<ModuleId> strip_mods_;
    CircuitBuilder b_;
    std::set<QubitId> cleared_;
};

}  // namespace

PpcBuild build_partial_products(const PartialProductPlan& plan, bool standalone_z_sites) {
    if (plan.variant != PartialProductPlan::Variant::Parallel)
        throw DomainError("gate-level partial products are defined for the parallel plan");
    return LatticeBuilder(plan).build(standalone_z_sites);
}

// ---------------------------------------------------------------------------
// Addition tree schedule
// ---------------------------------------------------------------------------

MmaSchedule schedule_mma(int t_prime) {
    if (t_prime < 3) throw DomainError("the addition tree needs at least three numbers");
    MmaSchedule s;
    s.input_count = t_prime;
    int next_id = t_prime;
    std::deque<int> pool;
    for (int i = 0; i < t_prime; ++i) pool.push_back(i);
    while (pool.size() > 2) {
        MmaSchedule::Stage stage;
        std::deque<int> out;
        while (pool.size() >= 3) {
            MmaSchedule::TileSlot t;
            for (int k = 0; k < 3; ++k) {
                t.inputs[k] = pool.front();
                pool.pop_front();
            }
            t.out_u = next_id++;
            t.out_v = next_id++;
            out.push_back(t.out_u);
            out.push_back(t.out_v);
            stage.tiles.push_back(t);
        }
        for (int c : pool) {
            stage.carried.push_back(c);
            out.push_back(c);
        }
        pool = std::move(out);
        s.stages.push_back(std::move(stage));
    }
    s.number_count = next_id;
    s.final_numbers = {pool[0], pool[1]};
    return s;
}

namespace {

// Qubit count of each number id: inputs per `input_bits`, tile outputs fixed.
std::vector<std::int64_t> number_bits(const MmaSchedule& sched,
                                      const std::vector<std::int64_t>& input_bits,
                                      std::int64_t u_bits, std::int64_t v_bits) {
    std::vector<std::int64_t> bits(sched.number_count, 0);
    for (std::size_t i = 0; i < input_bits.size() && i < bits.size(); ++i) bits[i] = input_bits[i];
    for (auto& stage : sched.stages)
        for (auto& t : stage.tiles) {
            bits[t.out_u] = u_bits;
            bits[t.out_v] = v_bits;
        }
    return bits;
}

std::int64_t stage_inflow(const MmaSchedule& sched, const std::vector<std::int64_t>& bits,
                          std::size_t si) {
    std::int64_t q = 0;
    for (const auto& t : sched.stages[si].tiles)
        for (int in : t.inputs) q += bits[in];
    return q;
}

}  // namespace

MmaTreeBuild build_mma_tree(std::int64_t t_prime, std::size_t n, std::uint64_t m) {
    MmaTreeBuild out;
    out.schedule = schedule_mma(static_cast<int>(t_prime));
    ModularAdderBuild tile = build_modular_adder(n, m);
    std::vector<std::int64_t> input_bits(out.schedule.input_count,
                                         static_cast<std::int64_t>(n + 2));
    std::vector<std::int64_t> bits =
        number_bits(out.schedule, input_bits, static_cast<std::int64_t>(tile.out_u.size()),
                    static_cast<std::int64_t>(tile.out_v.size()));
    HierPtr tile_block = make_leaf("csa_tile", std::move(tile.circuit));

    std::vector<HierStage> stages;
    for (std::size_t si = 0; si < out.schedule.stages.size(); ++si) {
        HierStage hs;
        hs.children.push_back(
            {tile_block, static_cast<std::int64_t>(out.schedule.stages[si].tiles.size())});
        if (si + 1 < out.schedule.stages.size()) {
            hs.teleport_qubits_after = stage_inflow(out.schedule, bits, si + 1);
            hs.teleport_rounds_after = 1;
        }
        out.tile_count += static_cast<std::int64_t>(out.schedule.stages[si].tiles.size());
        stages.push_back(std::move(hs));
    }
    out.stage_count = static_cast<std::int64_t>(stages.size());
    out.hier = compose("mma_tree", std::move(stages));
    return out;
}

// ---------------------------------------------------------------------------
// The full multiplier
// ---------------------------------------------------------------------------

namespace {

struct NumberBits {
    std::vector<std::size_t> sigs;
    std::vector<QubitId> qubits;
};

// Re-homes the modules and qubits of `src` inside `b`; returns the qubit map.
std::vector<QubitId> splice_modules(CircuitBuilder& b, const Circuit& src,
                                    const std::string& tag) {
    std::vector<ModuleId> mods;
    for (const auto& m : src.modules) mods.push_back(b.add_module(tag + "/" + m.name));
    std::vector<QubitId> qmap;
    for (const auto& qi : src.qubits) qmap.push_back(b.add_qubit(mods[qi.module], qi.coord));
    return qmap;
}

// Emits several instances merged timestep by timestep, remapping record
// slots; T and Tdg swap on the uncompute pass.
void splice_layers(CircuitBuilder& b,
                   const std::vector<std::pair<const Circuit*, const std::vector<QubitId>*>>& inst,
                   bool adjoint_t) {
    std::size_t depth = 0;
    for (auto& [c, qmap] : inst) depth = std::max(depth, c->layers.size());
    std::vector<std::vector<std::uint32_t>> slot_maps(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) slot_maps[i].resize(inst[i].first->record_size);
    for (std::size_t t = 0; t < depth; ++t) {
        std::vector<Gate> layer;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            const Circuit& c = *inst[i].first;
            if (t >= c.layers.size()) continue;
            const std::vector<QubitId>& qmap = *inst[i].second;
            for (Gate g : c.layers[t].gates) {
                g.q0 = qmap[g.q0];
                if (g.arity() == 2) g.q1 = qmap[g.q1];
                if (adjoint_t && g.kind == GateKind::T)
                    g.kind = GateKind::Tdg;
                else if (adjoint_t && g.kind == GateKind::Tdg)
                    g.kind = GateKind::T;
                for (auto& bit : g.cond.bits) bit = slot_maps[i][bit];
                if (g.slot) {
                    Gate fresh = b.measure(g.q0);
                    slot_maps[i][*g.slot] = *fresh.slot;
                    g.slot = fresh.slot;
                }
                layer.push_back(std::move(g));
            }
        }
        if (!layer.empty()) b.append_layer(std::move(layer));
    }
}

class FlatAssembly {
public:
    FlatAssembly(const PartialProductPlan& plan, const MmaSchedule& sched)
        : plan_(plan), sched_(sched), tile_(build_modular_adder(plan.n, plan.m)) {}

    Circuit assemble() {
        PpcBuild ppc = build_partial_products(plan_, /*standalone_z_sites=*/false);
        std::vector<QubitId> ppc_map = splice_modules(b_, ppc.circuit, "ppc");
        splice_layers(b_, {{&ppc.circuit, &ppc_map}}, false);

        std::vector<NumberBits> numbers(sched_.number_count);
        for (std::size_t zi = 0; zi < plan_.z_sites.size(); ++zi) {
            const auto& z = plan_.z_sites[zi];
            NumberBits nb;
            QubitId prod = ppc_map[ppc.products.at({z.xi, z.yj})];
            for (std::size_t s = 0; s < 64; ++s)
                if ((z.residue >> s) & 1) {
                    nb.sigs.push_back(s);
                    nb.qubits.push_back(prod);
                }
            numbers[zi] = std::move(nb);
        }
        for (std::size_t gi = 0; gi < plan_.single_groups.size(); ++gi) {
            const auto& g = plan_.single_groups[gi];
            NumberBits nb;
            for (std::size_t k = 0; k < g.members.size(); ++k) {
                nb.sigs.push_back(g.sigs[k]);
                nb.qubits.push_back(ppc_map[ppc.products.at(g.members[k])]);
            }
            numbers[plan_.z_sites.size() + gi] = std::move(nb);
        }

        std::vector<std::vector<std::vector<QubitId>>> stage_maps;
        std::vector<std::vector<std::pair<QubitId, QubitId>>> stage_teles;
        for (const auto& stage : sched_.stages) {
            std::vector<std::vector<QubitId>> maps;
            for (std::size_t ti = 0; ti < stage.tiles.size(); ++ti)
                maps.push_back(splice_modules(b_, tile_.circuit, "tile"));

            std::vector<std::pair<QubitId, QubitId>> teles;
            for (std::size_t ti = 0; ti < stage.tiles.size(); ++ti) {
                const auto& slot = stage.tiles[ti];
                const std::array<const std::vector<QubitId>*, 3> regs = {&tile_.in_a, &tile_.in_b,
                                                                         &tile_.in_c};
                for (int k = 0; k < 3; ++k) {
                    const NumberBits& nb = numbers[slot.inputs[k]];
                    for (std::size_t bi = 0; bi < nb.sigs.size(); ++bi)
                        teles.push_back({nb.qubits[bi], maps[ti][regs[k]->at(nb.sigs[bi])]});
                }
            }
            emit_teleports(teles, ppc, ppc_map);
            stage_teles.push_back(std::move(teles));

            std::vector<std::pair<const Circuit*, const std::vector<QubitId>*>> inst;
            for (auto& m : maps) inst.push_back({&tile_.circuit, &m});
            splice_layers(b_, inst, false);

            for (std::size_t ti = 0; ti < stage.tiles.size(); ++ti) {
                const auto& slot = stage.tiles[ti];
                NumberBits u, v;
                for (std::size_t i = 0; i < tile_.out_u.size(); ++i) {
                    u.sigs.push_back(i);
                    u.qubits.push_back(maps[ti][tile_.out_u[i]]);
                }
                for (auto& [pos, q] : tile_.out_v) {
                    v.sigs.push_back(pos);
                    v.qubits.push_back(maps[ti][q]);
                }
                numbers[slot.out_u] = std::move(u);
                numbers[slot.out_v] = std::move(v);
            }
            stage_maps.push_back(std::move(maps));
        }

        // Mirror: tiles re-emit on their own qubits with conjugate T gates,
        // last stage first, each followed by its reversed teleports.
        for (std::size_t si = sched_.stages.size(); si-- > 0;) {
            std::vector<std::pair<const Circuit*, const std::vector<QubitId>*>> inst;
            for (auto& m : stage_maps[si]) inst.push_back({&tile_.circuit, &m});
            splice_layers(b_, inst, true);
            std::vector<std::pair<QubitId, QubitId>> back;
            for (auto it = stage_teles[si].rbegin(); it != stage_teles[si].rend(); ++it)
                back.push_back({it->second, it->first});
            // Shared endpoints split across consecutive rounds.
            while (!back.empty()) {
                std::vector<Gate> layer;
                std::set<QubitId> seen;
                std::vector<std::pair<QubitId, QubitId>> rest;
                for (auto& [s, d] : back) {
                    if (seen.count(s) || seen.count(d)) {
                        rest.push_back({s, d});
                        continue;
                    }
                    seen.insert(s);
                    seen.insert(d);
                    layer.push_back(B::teleport(s, d));
                }
                b_.append_layer(std::move(layer));
                back = std::move(rest);
            }
        }
        splice_layers(b_, {{&ppc.circuit, &ppc_map}}, true);
        return b_.take();
    }

private:
    // One teleport round per remaining bit of a shared source: multi-bit
    // residues copy the product bit into its idle diagonal neighbor between
    // rounds, so every destination receives a live qubit.
    void emit_teleports(std::vector<std::pair<QubitId, QubitId>>& teles, const PpcBuild& ppc,
                        const std::vector<QubitId>& ppc_map) {
        std::map<QubitId, std::vector<QubitId>> by_src;
        std::vector<QubitId> order;
        for (auto& [src, dst] : teles) {
            if (!by_src.count(src)) order.push_back(src);
            by_src[src].push_back(dst);
        }
        std::vector<std::pair<QubitId, QubitId>> rewritten;
        bool more = true;
        while (more) {
            more = false;
            std::vector<Gate> copies, round;
            for (QubitId src : order) {
                auto& dsts = by_src[src];
                if (dsts.empty()) continue;
                QubitId dst = dsts.back();
                dsts.pop_back();
                if (!dsts.empty()) {
                    QubitId scratch = scratch_neighbor(src, ppc, ppc_map);
                    copies.push_back(B::cnot(src, scratch));
                    round.push_back(B::teleport(scratch, dst));
                    rewritten.push_back({scratch, dst});
                    more = true;
                } else {
                    round.push_back(B::teleport(src, dst));
                    rewritten.push_back({src, dst});
                }
            }
            if (!copies.empty()) b_.append_layer(std::move(copies));
            if (!round.empty()) b_.append_layer(std::move(round));
        }
        teles = std::move(rewritten);
    }

    QubitId scratch_neighbor(QubitId src, const PpcBuild& ppc, const std::vector<QubitId>& ppc_map) {
        // src is a spliced product corner at even-even (gx, gy); the odd-odd
        // diagonal neighbor is structurally idle.
        const QubitInfo& info = b_.peek().qubits.at(src);
        Coord c{info.coord.x + 1, info.coord.y + 1};
        (void)ppc;
        (void)ppc_map;
        if (auto q = b_.qubit_at(info.module, c)) return *q;
        return b_.add_qubit(info.module, c);
    }

    const PartialProductPlan& plan_;
    const MmaSchedule& sched_;
    ModularAdderBuild tile_;
    CircuitBuilder b_;
};

}  // namespace

MultiplierBuild build_modular_multiplier(std::size_t n, std::uint64_t m,
                                         PartialProductPlan::Variant variant,
                                         std::optional<std::uint64_t> a, bool with_flat) {
    MultiplierBuild out;
    out.plan = plan_partial_products(n, m, variant, a);

    std::vector<std::int64_t> input_bits;
    if (variant == PartialProductPlan::Variant::Parallel) {
        for (auto& z : out.plan.z_sites)
            input_bits.push_back(static_cast<std::int64_t>(std::popcount(z.residue)));
        for (auto& g : out.plan.single_groups)
            input_bits.push_back(static_cast<std::int64_t>(g.members.size()));
    } else {
        for (auto r : out.plan.serial_residues)
            input_bits.push_back(static_cast<std::int64_t>(std::popcount(r)));
    }
    while (input_bits.size() < 3) input_bits.push_back(0);  // zero-register padding
    out.schedule = schedule_mma(static_cast<int>(input_bits.size()));

    ModularAdderBuild tile = build_modular_adder(n, m);
    std::vector<std::int64_t> bits =
        number_bits(out.schedule, input_bits, static_cast<std::int64_t>(tile.out_u.size()),
                    static_cast<std::int64_t>(tile.out_v.size()));
    HierPtr tile_block = make_leaf("csa_tile", std::move(tile.circuit));

    HierPtr prep_leaf;
    if (variant == PartialProductPlan::Variant::Parallel) {
        PpcBuild ppc = build_partial_products(out.plan, /*standalone_z_sites=*/false);
        prep_leaf = make_leaf("ppc", std::move(ppc.circuit));
    } else {
        prep_leaf = make_leaf("shifted_multiple_prep",
                              build_fanout(std::max<std::size_t>(2, n)).circuit);
    }

    std::vector<HierStage> stages;
    HierStage prep;
    prep.children.push_back({prep_leaf, 1});
    prep.teleport_qubits_after = stage_inflow(out.schedule, bits, 0);
    prep.teleport_rounds_after = 1;
    stages.push_back(std::move(prep));

    for (std::size_t si = 0; si < out.schedule.stages.size(); ++si) {
        HierStage hs;
        hs.children.push_back(
            {tile_block, static_cast<std::int64_t>(out.schedule.stages[si].tiles.size())});
        if (si + 1 < out.schedule.stages.size()) {
            hs.teleport_qubits_after = stage_inflow(out.schedule, bits, si + 1);
            hs.teleport_rounds_after = 1;
        }
        out.tile_count += static_cast<std::int64_t>(out.schedule.stages[si].tiles.size());
        stages.push_back(std::move(hs));
    }
    out.mma_stage_count = static_cast<std::int64_t>(out.schedule.stages.size());

    for (std::size_t si = out.schedule.stages.size(); si-- > 0;) {
        HierStage hs;
        hs.children.push_back(
            {tile_block, static_cast<std::int64_t>(out.schedule.stages[si].tiles.size())});
        hs.inplace = true;
        hs.teleport_qubits_after = stage_inflow(out.schedule, bits, si);
        hs.teleport_rounds_after = 1;
        stages.push_back(std::move(hs));
    }
    HierStage prep_mirror;
    prep_mirror.children.push_back({prep_leaf, 1});
    prep_mirror.inplace = true;
    stages.push_back(std::move(prep_mirror));

    out.hier = compose("modular_multiplier", std::move(stages));

    if (with_flat) {
        if (n > 3) throw DomainError("flat multiplier is materialized only for n <= 3");
        if (variant != PartialProductPlan::Variant::Parallel)
            throw DomainError("flat multiplier requires the parallel variant");
        FlatAssembly fa(out.plan, out.schedule);
        out.flat = fa.assemble();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semantics
// ---------------------------------------------------------------------------

CarrySaveNumber semantic_multiply(const CarrySaveNumber& x, const CarrySaveNumber& y,
                                  std::size_t n, std::uint64_t m) {
    PartialProductPlan plan = plan_partial_products(n, m, PartialProductPlan::Variant::Parallel);
    auto bit_of = [&](const CarrySaveNumber& c, int idx) -> std::uint8_t {
        std::size_t nu = n + 2;
        if (static_cast<std::size_t>(idx) < nu) return c.u_bit(static_cast<std::size_t>(idx));
        return c.v_bit(static_cast<std::size_t>(idx) - nu + 1);
    };

    std::vector<std::uint64_t> values;
    for (const auto& z : plan.z_sites)
        values.push_back((bit_of(x, z.xi) & bit_of(y, z.yj)) ? z.residue : 0);
    for (const auto& g : plan.single_groups) {
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < g.members.size(); ++k) {
            std::uint8_t p = bit_of(x, g.members[k].first) & bit_of(y, g.members[k].second);
            v += static_cast<std::uint64_t>(p) << g.sigs[k];
        }
        values.push_back(v);
    }
    while (values.size() < 3) values.push_back(0);

    MmaSchedule sched = schedule_mma(static_cast<int>(values.size()));
    values.resize(sched.number_count, 0);
    for (const auto& stage : sched.stages)
        for (const auto& t : stage.tiles) {
            CarrySaveNumber r = oracle_modular_adder(values[t.inputs[0]], values[t.inputs[1]],
                                                     values[t.inputs[2]], n, m);
            std::uint64_t uval = 0, vval = 0;
            for (std::size_t i = 0; i < r.u.size(); ++i) uval += std::uint64_t{r.u[i]} << i;
            for (std::size_t i = 0; i < r.v.size(); ++i) vval += std::uint64_t{r.v[i]} << (i + 1);
            values[t.out_u] = uval;
            values[t.out_v] = vval;
        }

    CarrySaveNumber out;
    std::uint64_t uval = values[sched.final_numbers[0]];
    std::uint64_t vval = values[sched.final_numbers[1]];
    for (std::size_t i = 0; i <= n + 1; ++i) out.set_u_bit(i, (uval >> i) & 1);
    for (std::size_t i = 1; i <= n + 1; ++i) out.set_v_bit(i, (vval >> i) & 1);
    return out;
}

}  // namespace csaforge

#include "csaforge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csaforge {

namespace {

constexpr double kTiny = 1e-14;

void prune(AmplitudeMap& amps) {
    for (auto it = amps.begin(); it != amps.end();) {
        if (std::abs(it->second) < kTiny)
            it = amps.erase(it);
        else
            ++it;
    }
}

void renormalize(AmplitudeMap& amps) {
    double n2 = 0;
    for (auto& [k, a] : amps) n2 += std::norm(a);
    double inv = 1.0 / std::sqrt(n2);
    for (auto& [k, a] : amps) a *= inv;
}

struct Runner {
    const Circuit& c;
    const SimOptions& opt;
    SimState st;
    std::mt19937_64 rng;
    const std::vector<std::uint8_t>* forced = nullptr;

    void apply_unitary(const Gate& g) {
        using std::numbers::sqrt2;
        const Amplitude t_phase = std::polar(1.0, std::numbers::pi / 4);
        switch (g.kind) {
            case GateKind::X: {
                AmplitudeMap out;
                out.reserve(st.amplitudes.size());
                for (auto& [k, a] : st.amplitudes) {
                    BasisKey nk = k;
                    nk.flip(g.q0);
                    out[nk] += a;
                }
                st.amplitudes = std::move(out);
                break;
            }
            case GateKind::Z:
                for (auto& [k, a] : st.amplitudes)
                    if (k.get(g.q0)) a = -a;
                break;
            case GateKind::T:
                for (auto& [k, a] : st.amplitudes)
                    if (k.get(g.q0)) a *= t_phase;
                break;
            case GateKind::Tdg:
                for (auto& [k, a] : st.amplitudes)
                    if (k.get(g.q0)) a *= std::conj(t_phase);
                break;
            case GateKind::H: {
                AmplitudeMap out;
                out.reserve(st.amplitudes.size() * 2);
                const double s = 1.0 / sqrt2;
                for (auto& [k, a] : st.amplitudes) {
                    BasisKey k0 = k, k1 = k;
                    k0.set(g.q0, false);
                    k1.set(g.q0, true);
                    if (!k.get(g.q0)) {
                        out[k0] += a * s;
                        out[k1] += a * s;
                    } else {
                        out[k0] += a * s;
                        out[k1] -= a * s;
                    }
                }
                prune(out);
                st.amplitudes = std::move(out);
                break;
            }
            case GateKind::CNOT: {
                AmplitudeMap out;
                out.reserve(st.amplitudes.size());
                for (auto& [k, a] : st.amplitudes) {
                    BasisKey nk = k;
                    if (k.get(g.q0)) nk.flip(g.q1);
                    out[nk] += a;
                }
                st.amplitudes = std::move(out);
                break;
            }
            default: throw DomainError("not a unitary gate");
        }
    }

    void apply_measure(const Gate& g) {
        double p1 = 0;
        for (auto& [k, a] : st.amplitudes)
            if (k.get(g.q0)) p1 += std::norm(a);
        int outcome;
        if (forced) {
            if (*g.slot >= forced->size()) throw DomainError("forced outcome vector too short");
            outcome = (*forced)[*g.slot];
            double p = outcome ? p1 : 1.0 - p1;
            if (p < 1e-12) throw ImpossibleOutcome("forced outcome has zero amplitude");
        } else {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            outcome = u(rng) < p1 ? 1 : 0;
        }
        for (auto it = st.amplitudes.begin(); it != st.amplitudes.end();) {
            if (it->first.get(g.q0) != (outcome != 0))
                it = st.amplitudes.erase(it);
            else
                ++it;
        }
        renormalize(st.amplitudes);
        if (st.record.size() <= *g.slot) st.record.resize(*g.slot + 1, 0);
        st.record[*g.slot] = static_cast<std::uint8_t>(outcome);
    }

    void apply_teleport(const Gate& g) {
        AmplitudeMap out;
        out.reserve(st.amplitudes.size());
        for (auto& [k, a] : st.amplitudes) {
            BasisKey nk = k;
            nk.set(g.q1, k.get(g.q0));
            nk.set(g.q0, false);
            out[nk] += a;
        }
        st.amplitudes = std::move(out);
    }

    void run_all(const std::vector<std::pair<QubitId, int>>& initial) {
        BasisKey k = BasisKey::zeros(c.qubits.size());
        for (auto [q, v] : initial) {
            if (q >= c.qubits.size()) throw DomainError("initial value for unknown qubit");
            k.set(q, v != 0);
        }
        st.num_qubits = c.qubits.size();
        st.amplitudes.emplace(std::move(k), Amplitude{1.0, 0.0});

        for (const Layer& layer : c.layers) {
            for (const Gate& g : layer.gates) {
                if (!g.cond.is_always() && !g.cond.eval(st.record)) continue;
                if (g.kind == GateKind::MeasureZ)
                    apply_measure(g);
                else if (g.kind == GateKind::Teleport)
                    apply_teleport(g);
                else
                    apply_unitary(g);
                if (st.amplitudes.size() > opt.sparsity_cap)
                    throw SparsityExceeded("amplitude count exceeds cap");
            }
            double n = st.norm();
            if (std::abs(n - 1.0) > opt.norm_tolerance) throw ModelError("state norm drifted");
        }
        if (st.record.size() < c.record_size) st.record.resize(c.record_size, 0);
    }
};

}  // namespace

double SimState::norm() const {
    double n2 = 0;
    for (auto& [k, a] : amplitudes) n2 += std::norm(a);
    return std::sqrt(n2);
}

bool SimState::qubit_is_classical(QubitId q) const {
    bool first = true, val = false;
    for (auto& [k, a] : amplitudes) {
        if (first) {
            val = k.get(q);
            first = false;
        } else if (k.get(q) != val) {
            return false;
        }
    }
    return true;
}

int SimState::classical_bit(QubitId q) const {
    if (!qubit_is_classical(q)) throw NotSeparable("qubit is in superposition");
    return amplitudes.empty() ? 0 : (amplitudes.begin()->first.get(q) ? 1 : 0);
}

SimState run(const Circuit& c, const std::vector<std::pair<QubitId, int>>& initial,
             const Outcomes& outcomes, const SimOptions& opt) {
    Runner r{c, opt};
    if (outcomes.is_forced())
        r.forced = &std::get<std::vector<std::uint8_t>>(outcomes.source);
    else
        r.rng.seed(std::get<std::uint64_t>(outcomes.source));
    r.run_all(initial);
    return std::move(r.st);
}

std::vector<Amplitude> reduced_state(const SimState& s, const std::vector<QubitId>& subset) {
    // Group amplitudes by the complement bits; the state is separable across
    // the cut iff all groups are proportional.
    auto sub_key = [&](const BasisKey& k) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < subset.size(); ++i)
            if (k.get(subset[i])) idx |= std::uint64_t{1} << i;
        return idx;
    };
    auto rest_key = [&](const BasisKey& k) {
        BasisKey r = k;
        for (auto q : subset) r.set(q, false);
        return r;
    };
    if (subset.size() > 20) throw DomainError("subset too large for dense reduction");
    std::unordered_map<BasisKey, std::vector<Amplitude>, BasisKeyHash> groups;
    for (auto& [k, a] : s.amplitudes) {
        auto& vec = groups[rest_key(k)];
        if (vec.empty()) vec.assign(std::size_t{1} << subset.size(), Amplitude{});
        vec[sub_key(k)] += a;
    }
    if (groups.empty()) throw NotSeparable("empty state");
    // Pick the heaviest group as the reference direction.
    const std::vector<Amplitude>* ref = nullptr;
    double best = -1;
    for (auto& [rk, vec] : groups) {
        double w = 0;
        for (auto& a : vec) w += std::norm(a);
        if (w > best) {
            best = w;
            ref = &vec;
        }
    }
    double refn = std::sqrt(best);
    std::vector<Amplitude> dir(ref->size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = (*ref)[i] / refn;
    for (auto& [rk, vec] : groups) {
        // vec must equal c*dir for some scalar c.
        Amplitude c{};
        double w = 0;
        for (std::size_t i = 0; i < vec.size(); ++i) {
            c += vec[i] * std::conj(dir[i]);
            w += std::norm(vec[i]);
        }
        double residual = w - std::norm(c);
        if (residual > 1e-9) throw NotSeparable("subset entangled with remainder");
    }
    return dir;
}

double fidelity(const SimState& s, const std::vector<QubitId>& subset,
                const std::vector<Amplitude>& reference) {
    if (reference.size() != (std::size_t{1} << subset.size()))
        throw DomainError("reference has wrong dimension");
    std::vector<Amplitude> red = reduced_state(s, subset);
    double rn2 = 0;
    for (auto& a : reference) rn2 += std::norm(a);
    Amplitude ov{};
    for (std::size_t i = 0; i < red.size(); ++i) ov += std::conj(reference[i]) * red[i];
    return std::norm(ov) / rn2;
}

}  // namespace csaforge

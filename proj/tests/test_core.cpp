#include <doctest.h>

#include "csaforge/hier.hpp"
#include "csaforge/resources.hpp"

using namespace csaforge;

namespace {

Circuit two_hadamards() {
    CircuitBuilder b;
    ModuleId m = b.add_module("m");
    QubitId q0 = b.add_qubit(m, {0, 0});
    QubitId q1 = b.add_qubit(m, {1, 0});
    b.append_layer({CircuitBuilder::g1(GateKind::H, q0), CircuitBuilder::g1(GateKind::H, q1)});
    return b.take();
}

}  // namespace

TEST_CASE("append_layer counts a concurrent layer") {
    Circuit c = two_hadamards();
    ResourceReport r = count_resources(c);
    CHECK(r.depth == 1);
    CHECK(r.size == 2);
    CHECK(r.width == 2);
    CHECK(r.module_width == 1);
    CHECK(r.depth_size_width_consistent());
}

TEST_CASE("overlapping supports are rejected") {
    CircuitBuilder b;
    ModuleId m = b.add_module("m");
    QubitId q0 = b.add_qubit(m, {0, 0});
    QubitId q1 = b.add_qubit(m, {1, 0});
    CHECK_THROWS_AS(
        b.append_layer({CircuitBuilder::cnot(q0, q1), CircuitBuilder::g1(GateKind::X, q1)}),
        ConcurrencyViolation);
}

TEST_CASE("teleport and elementary gates cannot share a timestep") {
    CircuitBuilder b;
    ModuleId m0 = b.add_module("m0");
    ModuleId m1 = b.add_module("m1");
    QubitId q0 = b.add_qubit(m0, {0, 0});
    QubitId r0 = b.add_qubit(m1, {0, 0});
    QubitId q2 = b.add_qubit(m0, {1, 0});
    CHECK_THROWS_AS(
        b.append_layer({CircuitBuilder::teleport(q0, r0), CircuitBuilder::g1(GateKind::X, q2)}),
        TimestepKindViolation);
    // And a teleport within one module is not a teleport at all.
    CHECK_THROWS_AS(b.append_layer({CircuitBuilder::teleport(q0, q2)}), TimestepKindViolation);
}

TEST_CASE("empty circuit counts zero everywhere") {
    Circuit c;
    ResourceReport r = count_resources(c);
    CHECK(r == ResourceReport{});
}

TEST_CASE("counting is invariant under gate order within a layer") {
    CircuitBuilder b1, b2;
    for (auto* b : {&b1, &b2}) {
        ModuleId m = b->add_module("m");
        b->add_qubit(m, {0, 0});
        b->add_qubit(m, {1, 0});
        b->add_qubit(m, {2, 0});
    }
    b1.append_layer({CircuitBuilder::g1(GateKind::H, 0), CircuitBuilder::cnot(1, 2)});
    b2.append_layer({CircuitBuilder::cnot(1, 2), CircuitBuilder::g1(GateKind::H, 0)});
    CHECK(count_resources(b1.take()) == count_resources(b2.take()));
}

TEST_CASE("duplicate coordinate in a module is rejected") {
    CircuitBuilder b;
    ModuleId m = b.add_module("m");
    b.add_qubit(m, {0, 0});
    CHECK_THROWS_AS(b.add_qubit(m, {0, 0}), DomainError);
}

TEST_CASE("functional append_layer returns an extended circuit") {
    Circuit c = two_hadamards();
    Circuit d = append_layer(std::move(c), {CircuitBuilder::g1(GateKind::X, 0)});
    CHECK(count_resources(d).depth == 2);
    check_wellformed(d);
}

TEST_CASE("hierarchical roll-up: sequential reuse and parallel stages") {
    // A leaf with D=8, S=15, W=3 stands in for a Toffoli block.
    CircuitBuilder b;
    ModuleId m = b.add_module("m");
    QubitId a = b.add_qubit(m, {0, 0});
    QubitId c = b.add_qubit(m, {1, 0});
    QubitId t = b.add_qubit(m, {1, 1});
    for (int i = 0; i < 7; ++i) b.append_layer({CircuitBuilder::cnot(a, c)});
    b.append_layer({CircuitBuilder::cnot(a, c), CircuitBuilder::g1(GateKind::H, t)});
    Circuit leafc = b.take();
    ResourceReport lr = count_resources(leafc);
    REQUIRE(lr.depth == 8);
    REQUIRE(lr.size == 9);

    HierPtr leaf = make_leaf("block", std::move(leafc));

    // Two sequential copies with width reuse.
    HierPtr seq = compose("seq", {HierStage{{{leaf, 1}}}, HierStage{{{leaf, 1}}}},
                          /*reuse_width=*/true);
    ResourceReport sr = count_resources(seq);
    CHECK(sr.depth == 16);
    CHECK(sr.size == 18);
    CHECK(sr.width == 3);

    // One stage of four parallel copies.
    HierPtr par = compose("par", {HierStage{{{leaf, 4}}}});
    ResourceReport pr = count_resources(par);
    CHECK(pr.depth == 8);
    CHECK(pr.size == 36);
    CHECK(pr.width == 12);
    CHECK(stage_count(*par) == 1);
}

TEST_CASE("module depth is the longest consecutive teleport run") {
    CircuitBuilder b;
    ModuleId m0 = b.add_module("a");
    ModuleId m1 = b.add_module("b");
    QubitId q0 = b.add_qubit(m0, {0, 0});
    QubitId q1 = b.add_qubit(m1, {0, 0});
    QubitId q2 = b.add_qubit(m0, {1, 0});
    QubitId q3 = b.add_qubit(m1, {1, 0});
    b.append_layer({CircuitBuilder::teleport(q0, q1)});
    b.append_layer({CircuitBuilder::teleport(q2, q3)});
    b.append_layer({CircuitBuilder::g1(GateKind::X, q1)});
    b.append_layer({CircuitBuilder::teleport(q1, q0)});
    ResourceReport r = count_resources(b.take());
    CHECK(r.module_depth == 2);
    CHECK(r.module_size == 3);
    CHECK(r.module_width == 2);
    CHECK(r.depth == 1);
    CHECK(r.size == 1);
}

TEST_CASE("parity expressions evaluate and merge") {
    std::vector<std::uint8_t> rec = {1, 0, 1};
    CHECK(ParityExpr::always().eval(rec));
    CHECK_FALSE(ParityExpr::never().eval(rec));
    CHECK(ParityExpr::on_bit(0).eval(rec));
    CHECK_FALSE(ParityExpr::on_bit(1).eval(rec));
    CHECK_FALSE(ParityExpr::on_parity({0, 2}).eval(rec));
    ParityExpr e = ParityExpr::on_bit(0).xor_with(ParityExpr::on_bit(1));
    CHECK(e.eval(rec));
    ParityExpr cancel = ParityExpr::on_bit(0).xor_with(ParityExpr::on_bit(0));
    CHECK(cancel.is_never());
}

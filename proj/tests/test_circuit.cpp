#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ftfir/circuit.hpp"
#include "ftfir/simulate.hpp"

using namespace ftfir;

namespace {

bool apply_gate(GateKind k, bool a, bool b, bool c) {
  switch (k) {
    case GateKind::And: return a && b;
    case GateKind::Or: return a || b;
    case GateKind::Not: return !a;
    case GateKind::Xor: return a != b;
    case GateKind::Xnor: return a == b;
    case GateKind::Mux2: return a ? c : b;
    case GateKind::Const0: return false;
    case GateKind::Const1: return true;
  }
  return false;
}

// Random combinational DAG whose gates are inserted in shuffled order, so
// the simulator has to sort them.
Netlist random_dag(std::mt19937_64& rng, std::size_t inputs, std::size_t gates) {
  Netlist nl;
  std::vector<NetId> nets;
  for (std::size_t i = 0; i < inputs; ++i) nets.push_back(nl.add_input());
  struct Pending {
    GateKind kind;
    std::array<NetId, 3> ins;
    NetId out;
  };
  std::vector<Pending> pending;
  for (std::size_t g = 0; g < gates; ++g) {
    GateKind k = kAllGateKinds[rng() % kAllGateKinds.size()];
    Pending p{k, {}, nl.add_net()};
    for (std::size_t i = 0; i < arity(k); ++i) p.ins[i] = nets[rng() % nets.size()];
    nets.push_back(p.out);
    pending.push_back(p);
  }
  std::shuffle(pending.begin(), pending.end(), rng);
  for (const auto& p : pending) nl.drive_net(p.kind, std::span<const NetId>(p.ins.data(), arity(p.kind)), p.out);
  for (std::size_t i = 0; i < 4 && i < nets.size(); ++i) nl.mark_output(nets[nets.size() - 1 - i]);
  return nl;
}

// Brute-force fixed point: sweep all gates until nothing changes.
std::vector<bool> fixed_point_oracle(const Netlist& nl, const std::vector<bool>& in) {
  std::vector<bool> v(nl.net_count(), false);
  for (std::size_t i = 0; i < in.size(); ++i) v[nl.primary_inputs()[i].index] = in[i];
  for (bool changed = true; changed;) {
    changed = false;
    for (const Gate& g : nl.gates()) {
      auto in_at = [&](std::size_t i) { return i < arity(g.kind) ? bool(v[g.inputs[i].index]) : false; };
      bool nv = apply_gate(g.kind, in_at(0), in_at(1), in_at(2));
      if (v[g.output.index] != nv) {
        v[g.output.index] = nv;
        changed = true;
      }
    }
  }
  return v;
}

}  // namespace

TEST(Evaluate, AndGate) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input();
  NetId y = nl.and_(a, b);
  std::vector<bool> in{true, true};
  EXPECT_TRUE(evaluate(nl, in)[y.index]);
}

TEST(Evaluate, Mux2SelectsWhen1) {
  Netlist nl;
  NetId s = nl.add_input(), w0 = nl.add_input(), w1 = nl.add_input();
  NetId y = nl.mux2(s, w0, w1);
  std::vector<bool> in{true, false, true};
  EXPECT_TRUE(evaluate(nl, in)[y.index]);
}

TEST(Evaluate, XorWithItselfIsZero) {
  Netlist nl;
  NetId x = nl.add_input();
  NetId y = nl.xor_(x, x);
  for (bool v : {false, true}) {
    std::vector<bool> in{v};
    EXPECT_FALSE(evaluate(nl, in)[y.index]);
  }
}

TEST(Evaluate, MissingInputIsAnError) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input();
  nl.and_(a, b);
  std::vector<bool> in{true};
  EXPECT_THROW(evaluate(nl, in), Error);
}

TEST(Build, CombinationalCycleRejected) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId x = nl.add_net("x"), y = nl.add_net("y");
  nl.drive_net(GateKind::And, std::vector<NetId>{a, y}, x);
  nl.drive_net(GateKind::Not, std::vector<NetId>{x}, y);
  EXPECT_THROW(Simulator{nl}, Error);
}

TEST(Build, CycleThroughRegisterIsFine) {
  Netlist nl;
  auto r = nl.add_register();
  NetId q = nl.registers()[r].q;
  nl.connect_register(r, nl.not_(q));
  nl.mark_output(q);
  Simulator sim(nl);
  SimState s = sim.reset_state();
  std::vector<bool> none;
  std::vector<bool> seen;
  for (int i = 0; i < 4; ++i) {
    auto res = sim.step(s, none);
    seen.push_back(res.outputs[0]);
    s = res.next;
  }
  EXPECT_EQ(seen, (std::vector<bool>{false, true, false, true}));
}

TEST(Build, DoubleDriverRejected) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId y = nl.not_(a);
  EXPECT_THROW(nl.drive_net(GateKind::Not, std::vector<NetId>{a}, y), Error);
}

TEST(Build, DanglingReferenceRejected) {
  Netlist nl;
  NetId a = nl.add_input();
  EXPECT_THROW(nl.and_(a, NetId{42}), Error);
}

TEST(Build, ArityChecked) {
  Netlist nl;
  NetId a = nl.add_input();
  EXPECT_THROW(nl.add_gate(GateKind::And, {a}), Error);
}

TEST(Build, UndrivenNetFailsValidation) {
  Netlist nl;
  nl.add_net("floating");
  EXPECT_THROW(nl.validate(), Error);
}

TEST(Step, DelayOfConstantOne) {
  Netlist nl;
  NetId one = nl.constant(true);
  nl.mark_output(nl.delay(one));
  Simulator sim(nl);
  SimState s = sim.reset_state();
  std::vector<bool> none, out;
  for (int i = 0; i < 3; ++i) {
    auto r = sim.step(s, none);
    out.push_back(r.outputs[0]);
    EXPECT_EQ(r.next.cycle, s.cycle + 1);
    s = r.next;
  }
  EXPECT_EQ(out, (std::vector<bool>{false, true, true}));
}

TEST(Step, ShiftRegisterImpulse) {
  Netlist nl;
  NetId x = nl.add_input();
  NetId t0 = nl.delay(x), t1 = nl.delay(t0), t2 = nl.delay(t1);
  for (NetId t : {t0, t1, t2}) nl.mark_output(t);
  Simulator sim(nl);
  SimState s = sim.reset_state();
  std::vector<std::vector<bool>> taps;
  for (bool v : {true, false, false, false}) {
    std::vector<bool> in{v};
    auto r = sim.step(s, in);
    s = r.next;
    taps.push_back(r.outputs);
  }
  // outputs show the register contents before each edge
  EXPECT_EQ(taps[1], (std::vector<bool>{true, false, false}));
  EXPECT_EQ(taps[2], (std::vector<bool>{false, true, false}));
  EXPECT_EQ(taps[3], (std::vector<bool>{false, false, true}));
}

TEST(Step, NoRegistersMatchesEvaluate) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input();
  nl.mark_output(nl.xor_(a, b));
  Simulator sim(nl);
  std::vector<bool> in{true, false};
  SimState s = sim.reset_state();
  auto r = sim.step(s, in);
  EXPECT_EQ(r.outputs[0], sim.evaluate(in)[nl.primary_outputs()[0].index]);
  EXPECT_TRUE(r.next.registers.empty());
  EXPECT_EQ(r.next.cycle, 1U);
}

TEST(Step, StateMismatchIsAnError) {
  Netlist nl;
  NetId x = nl.add_input();
  nl.mark_output(nl.delay(x));
  Simulator sim(nl);
  SimState bad;
  std::vector<bool> in{true};
  EXPECT_THROW(sim.step(bad, in), Error);
}

TEST(Faults, FlipOnAndOutputSeenDownstream) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input();
  NetId y = nl.and_(a, b);
  nl.mark_output(nl.not_(y));
  nl.mark_output(y);
  Simulator sim(nl);
  std::vector<bool> in{true, true};
  auto r = sim.evaluate_with_faults(sim.reset_state(), in, {{{y, 0, 1, FaultMode::Flip}}});
  EXPECT_FALSE(r.outputs[1]);
  EXPECT_TRUE(r.outputs[0]);  // consumer saw the faulted 0
}

TEST(Faults, StuckAtCurrentValueIsInvisible) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId y = nl.or_(a, nl.constant(true));
  nl.mark_output(nl.delay(y));
  nl.mark_output(y);
  Simulator sim(nl);
  std::vector<bool> in{false};
  auto clean = sim.step(sim.reset_state(), in);
  auto faulty = sim.evaluate_with_faults(sim.reset_state(), in, {{{y, 0, 5, FaultMode::Stuck1}}});
  EXPECT_EQ(clean.outputs, faulty.outputs);
  EXPECT_EQ(clean.next, faulty.next);
}

TEST(Faults, PastWindowIsInvisible) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId y = nl.not_(a);
  nl.mark_output(nl.delay(y));
  Simulator sim(nl);
  SimState s = sim.reset_state();
  s.cycle = 10;
  std::vector<bool> in{true};
  auto clean = sim.step(s, in);
  auto faulty = sim.evaluate_with_faults(s, in, {{{y, 3, 10, FaultMode::Flip}}});
  EXPECT_EQ(clean.next, faulty.next);
}

TEST(Faults, RegisterOutputAndPrimaryInputCanBeFaulted) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId q = nl.delay(a);
  nl.mark_output(nl.xor_(a, q));
  Simulator sim(nl);
  std::vector<bool> in{false};
  auto r1 = sim.evaluate_with_faults(sim.reset_state(), in, {{{a, 0, 1, FaultMode::Stuck1}}});
  EXPECT_TRUE(r1.outputs[0]);
  EXPECT_EQ(r1.next.registers[0], kAllLanes);  // faulted input was latched
  auto r2 = sim.evaluate_with_faults(sim.reset_state(), in, {{{q, 0, 1, FaultMode::Flip}}});
  EXPECT_TRUE(r2.outputs[0]);
}

TEST(Faults, InvalidOverlayRejected) {
  Netlist nl;
  NetId a = nl.add_input();
  nl.mark_output(nl.not_(a));
  Simulator sim(nl);
  std::vector<bool> in{false};
  EXPECT_THROW(sim.evaluate_with_faults(sim.reset_state(), in, {{{NetId{99}, 0, 1, FaultMode::Flip}}}), Error);
  EXPECT_THROW(sim.evaluate_with_faults(sim.reset_state(), in, {{{a, 4, 4, FaultMode::Flip}}}), Error);
}

TEST(Faults, LaneMaskLimitsFaultToItsLanes) {
  Netlist nl;
  NetId a = nl.add_input();
  NetId y = nl.not_(a);
  nl.mark_output(y);
  Simulator sim(nl);
  auto cf = sim.compile_faults({{{y, 0, 1, FaultMode::Flip, lane_bit(3) | lane_bit(60)}}});
  SimState s = sim.reset_state();
  std::vector<Lanes> values, in{0};
  sim.run_cycle(in, s, values, &cf);
  EXPECT_EQ(values[y.index], kAllLanes ^ (lane_bit(3) | lane_bit(60)));
}

TEST(Properties, RandomDagMatchesFixedPointOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Netlist nl = random_dag(rng, 6, 60);
    Simulator sim(nl);
    for (int k = 0; k < 16; ++k) {
      std::vector<bool> in(6);
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = (rng() & 1U) != 0;
      EXPECT_EQ(sim.evaluate(in), fixed_point_oracle(nl, in));
    }
  }
}

TEST(Properties, EmptyOverlayEqualsStepAndIsDeterministic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Netlist nl = random_dag(rng, 5, 40);
    // close a few loops through registers
    for (int r = 0; r < 3; ++r) nl.mark_output(nl.delay(nl.primary_outputs()[r % nl.primary_outputs().size()]));
    Simulator sim(nl);
    SimState a = sim.reset_state(), b = sim.reset_state();
    for (int cyc = 0; cyc < 8; ++cyc) {
      std::vector<bool> in(5);
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = (rng() & 1U) != 0;
      auto s1 = sim.step(a, in);
      auto s2 = sim.evaluate_with_faults(b, in, FaultOverlay{});
      auto s3 = sim.step(a, in);
      EXPECT_EQ(s1.outputs, s2.outputs);
      EXPECT_EQ(s1.next, s2.next);
      EXPECT_EQ(s1.outputs, s3.outputs);
      a = s1.next;
      b = s2.next;
    }
  }
}

TEST(Properties, LanesAreIndependent) {
  std::mt19937_64 rng(3);
  Netlist nl = random_dag(rng, 8, 80);
  Simulator sim(nl);
  std::vector<Lanes> in(8);
  for (auto& w : in) w = rng();
  SimState s = sim.reset_state();
  std::vector<Lanes> values;
  sim.run_cycle(in, s, values);
  for (std::size_t lane : {0U, 17U, 63U}) {
    std::vector<bool> scalar(8);
    for (std::size_t i = 0; i < 8; ++i) scalar[i] = ((in[i] >> lane) & 1U) != 0;
    auto ref = sim.evaluate(scalar);
    for (std::size_t n = 0; n < values.size(); ++n) ASSERT_EQ(((values[n] >> lane) & 1U) != 0, ref[n]);
  }
}

TEST(Cells, ScopesNest) {
  Netlist nl;
  NetId a = nl.add_input();
  {
    CellScope outer(nl, "outer");
    nl.not_(a);
    CellScope inner(nl, "inner");
    nl.not_(a);
  }
  nl.not_(a);
  ASSERT_EQ(nl.cells().size(), 2U);
  EXPECT_EQ(nl.cells()[1].parent, 0);
  EXPECT_EQ(nl.gates()[0].cell, 0);
  EXPECT_EQ(nl.gates()[1].cell, 1);
  EXPECT_EQ(nl.gates()[2].cell, kNoCell);
}

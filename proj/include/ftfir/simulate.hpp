#pragma once

// Compiled, lane-parallel simulation of a Netlist.
//
// Every net value is a 64-bit word: bit l is the net's value in independent
// simulation lane l. Scalar simulation broadcasts one assignment to all lanes
// and reads lane 0; campaigns put a different stimulus or fault in each lane.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftfir/circuit.hpp"

namespace ftfir {

using Lanes = std::uint64_t;
inline constexpr Lanes kAllLanes = ~Lanes{0};
inline constexpr std::size_t kLaneCount = 64;

constexpr Lanes broadcast(bool b) { return b ? kAllLanes : Lanes{0}; }
constexpr Lanes lane_bit(std::size_t lane) { return Lanes{1} << lane; }

struct SimState {
  std::vector<Lanes> registers;
  std::uint64_t cycle = 0;

  friend bool operator==(const SimState&, const SimState&) = default;
};

enum class FaultMode : std::uint8_t { Flip, Stuck0, Stuck1 };

constexpr std::string_view to_string(FaultMode m) {
  switch (m) {
    case FaultMode::Flip: return "flip";
    case FaultMode::Stuck0: return "stuck0";
    case FaultMode::Stuck1: return "stuck1";
  }
  return "?";
}

// Active for cycles in [start, end), only in the lanes set in `lanes`.
struct NetFault {
  NetId net;
  std::uint64_t start = 0;
  std::uint64_t end = 1;
  FaultMode mode = FaultMode::Flip;
  Lanes lanes = kAllLanes;
};

struct FaultOverlay {
  std::vector<NetFault> faults;

  bool empty() const { return faults.empty(); }
};

// Fault overlay resolved against one compiled netlist: each fault is keyed
// by the instruction position right after its net's driver.
class CompiledFaults {
 public:
  struct Entry {
    std::uint32_t position;
    std::uint32_t net;
    std::uint64_t start;
    std::uint64_t end;
    FaultMode mode;
    Lanes lanes;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  friend class Simulator;
  std::vector<Entry> entries_;
};

struct StepResult {
  std::vector<bool> outputs;
  SimState next;
};

class Simulator {
 public:
  // The netlist must outlive the simulator and stay unmodified.
  explicit Simulator(const Netlist& nl) : nl_(&nl) {
    nl.validate();
    compile();
  }

  const Netlist& netlist() const { return *nl_; }
  std::size_t instruction_count() const { return code_.size(); }

  SimState reset_state() const {
    SimState s;
    s.registers.reserve(nl_->registers().size());
    for (const auto& r : nl_->registers()) s.registers.push_back(broadcast(r.reset_value));
    return s;
  }

  CompiledFaults compile_faults(const FaultOverlay& overlay) const {
    CompiledFaults cf;
    cf.entries_.reserve(overlay.faults.size());
    for (const auto& f : overlay.faults) {
      if (!nl_->contains(f.net))
        throw Error("fault overlay references invalid net " + std::to_string(f.net.index));
      if (f.end <= f.start)
        throw Error("fault window on net " + std::to_string(f.net.index) + " is empty");
      cf.entries_.push_back({fault_position_[f.net.index], f.net.index, f.start, f.end, f.mode,
                             f.lanes});
    }
    std::stable_sort(cf.entries_.begin(), cf.entries_.end(),
                     [](const auto& a, const auto& b) { return a.position < b.position; });
    return cf;
  }

  // One clock cycle: drive inputs, settle combinational logic (with faults
  // applied right after their driver), then latch registers.
  // `values` is caller-owned scratch holding every net after the call.
  void run_cycle(std::span<const Lanes> inputs, SimState& state, std::vector<Lanes>& values,
                 const CompiledFaults* faults = nullptr) const {
    const auto& pis = nl_->primary_inputs();
    if (inputs.size() != pis.size())
      throw Error("missing input assignment: expected " + std::to_string(pis.size()) +
                  " primary inputs, got " + std::to_string(inputs.size()));
    const auto& regs = nl_->registers();
    if (state.registers.size() != regs.size())
      throw Error("simulation state has " + std::to_string(state.registers.size()) +
                  " registers, netlist has " + std::to_string(regs.size()));

    values.resize(nl_->net_count());
    Lanes* v = values.data();
    for (std::size_t i = 0; i < pis.size(); ++i) v[pis[i].index] = inputs[i];
    for (std::size_t i = 0; i < regs.size(); ++i) v[regs[i].q.index] = state.registers[i];

    if (faults == nullptr || faults->empty()) {
      execute(v, 0, code_.size());
    } else {
      const auto& fl = faults->entries();
      std::size_t k = 0;
      std::size_t begin = 0;
      while (k < fl.size()) {
        const std::size_t pos = fl[k].position;
        execute(v, begin, pos);
        begin = pos;
        for (; k < fl.size() && fl[k].position == pos; ++k) apply(v, fl[k], state.cycle);
      }
      execute(v, begin, code_.size());
    }

    for (std::size_t i = 0; i < regs.size(); ++i) state.registers[i] = v[regs[i].d.index];
    ++state.cycle;
  }

  // Runs cycles from `state`; returns the primary outputs of every cycle.
  std::vector<std::vector<Lanes>> run(std::span<const std::vector<Lanes>> inputs_per_cycle,
                                      SimState& state,
                                      const CompiledFaults* faults = nullptr) const {
    std::vector<std::vector<Lanes>> outs;
    outs.reserve(inputs_per_cycle.size());
    std::vector<Lanes> values;
    for (const auto& in : inputs_per_cycle) {
      run_cycle(in, state, values, faults);
      outs.push_back(read_outputs(values));
    }
    return outs;
  }

  std::vector<Lanes> read_outputs(std::span<const Lanes> values) const {
    std::vector<Lanes> out;
    out.reserve(nl_->primary_outputs().size());
    for (NetId n : nl_->primary_outputs()) out.push_back(values[n.index]);
    return out;
  }

  // ---- scalar interface ---------------------------------------------------

  // Combinational evaluation with registers at their reset values.
  std::vector<bool> evaluate(const std::vector<bool>& inputs) const {
    SimState s = reset_state();
    std::vector<Lanes> values;
    run_cycle(broadcast_all(inputs), s, values);
    std::vector<bool> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] & 1U) != 0;
    return out;
  }

  StepResult step(const SimState& state, const std::vector<bool>& inputs) const {
    return evaluate_with_faults(state, inputs, FaultOverlay{});
  }

  StepResult evaluate_with_faults(const SimState& state, const std::vector<bool>& inputs,
                                  const FaultOverlay& overlay) const {
    CompiledFaults cf = compile_faults(overlay);
    StepResult r{{}, state};
    std::vector<Lanes> values;
    run_cycle(broadcast_all(inputs), r.next, values, &cf);
    for (NetId n : nl_->primary_outputs()) r.outputs.push_back((values[n.index] & 1U) != 0);
    return r;
  }

 private:
  struct Instr {
    GateKind op;
    std::uint32_t out, a, b, c;
  };

  static std::vector<Lanes> broadcast_all(const std::vector<bool>& bits) {
    std::vector<Lanes> out;
    out.reserve(bits.size());
    for (bool b : bits) out.push_back(broadcast(b));
    return out;
  }

  void execute(Lanes* v, std::size_t begin, std::size_t end) const {
    const Instr* code = code_.data();
    for (std::size_t i = begin; i < end; ++i) {
      const Instr& in = code[i];
      switch (in.op) {
        case GateKind::And: v[in.out] = v[in.a] & v[in.b]; break;
        case GateKind::Or: v[in.out] = v[in.a] | v[in.b]; break;
        case GateKind::Not: v[in.out] = ~v[in.a]; break;
        case GateKind::Xor: v[in.out] = v[in.a] ^ v[in.b]; break;
        case GateKind::Xnor: v[in.out] = ~(v[in.a] ^ v[in.b]); break;
        case GateKind::Mux2: v[in.out] = (v[in.a] & v[in.c]) | (~v[in.a] & v[in.b]); break;
        case GateKind::Const0: v[in.out] = 0; break;
        case GateKind::Const1: v[in.out] = kAllLanes; break;
      }
    }
  }

  static void apply(Lanes* v, const CompiledFaults::Entry& f, std::uint64_t cycle) {
    if (cycle < f.start || cycle >= f.end) return;
    Lanes& x = v[f.net];
    switch (f.mode) {
      case FaultMode::Flip: x ^= f.lanes; break;
      case FaultMode::Stuck0: x &= ~f.lanes; break;
      case FaultMode::Stuck1: x |= f.lanes; break;
    }
  }

  // Depth-first topological order that keeps insertion order whenever the
  // gate list already is topological.
  void compile() {
    const auto& gates = nl_->gates();
    const std::size_t n = gates.size();
    enum : std::uint8_t { kWhite, kGrey, kBlack };
    std::vector<std::uint8_t> color(n, kWhite);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::vector<std::pair<std::uint32_t, std::uint8_t>> stack;

    auto gate_driver = [&](NetId net) -> std::int64_t {
      const Driver& d = nl_->driver(net);
      return d.kind == DriverKind::Gate ? static_cast<std::int64_t>(d.index) : -1;
    };

    for (std::uint32_t root = 0; root < n; ++root) {
      if (color[root] != kWhite) continue;
      stack.push_back({root, 0});
      color[root] = kGrey;
      while (!stack.empty()) {
        auto& [g, next] = stack.back();
        const Gate& gate = gates[g];
        if (next < arity(gate.kind)) {
          std::int64_t dep = gate_driver(gate.inputs[next++]);
          if (dep < 0) continue;
          auto d = static_cast<std::uint32_t>(dep);
          if (color[d] == kGrey)
            throw Error("combinational cycle through net " +
                        std::to_string(gates[d].output.index) + " ('" +
                        nl_->net_name(gates[d].output) + "')");
          if (color[d] == kWhite) {
            color[d] = kGrey;
            stack.push_back({d, 0});
          }
        } else {
          color[g] = kBlack;
          order.push_back(g);
          stack.pop_back();
        }
      }
    }

    code_.reserve(n);
    fault_position_.assign(nl_->net_count(), 0);
    for (std::uint32_t g : order) {
      const Gate& gate = gates[g];
      Instr in{gate.kind, gate.output.index, 0, 0, 0};
      const std::size_t k = arity(gate.kind);
      if (k > 0) in.a = gate.inputs[0].index;
      if (k > 1) in.b = gate.inputs[1].index;
      if (k > 2) in.c = gate.inputs[2].index;
      code_.push_back(in);
      fault_position_[gate.output.index] = static_cast<std::uint32_t>(code_.size());
    }
  }

  const Netlist* nl_;
  std::vector<Instr> code_;
  std::vector<std::uint32_t> fault_position_;
};

// ---- free-function scalar interface -------------------------------------------

inline std::vector<bool> evaluate(const Netlist& nl, const std::vector<bool>& inputs) {
  return Simulator(nl).evaluate(inputs);
}

inline StepResult step(const Netlist& nl, const SimState& state, const std::vector<bool>& inputs) {
  return Simulator(nl).step(state, inputs);
}

inline StepResult evaluate_with_faults(const Netlist& nl, const SimState& state,
                                       const std::vector<bool>& inputs,
                                       const FaultOverlay& overlay) {
  return Simulator(nl).evaluate_with_faults(state, inputs, overlay);
}

// ---- lane packing for words ----------------------------------------------------

// Per-bit lane words for `width` bits of lane_values[l] (two's complement).
inline std::vector<Lanes> pack_lanes(std::span<const std::int64_t> lane_values, std::size_t width) {
  if (lane_values.size() > kLaneCount) throw Error("more than 64 lanes");
  std::vector<Lanes> bits(width, 0);
  for (std::size_t l = 0; l < lane_values.size(); ++l) {
    auto u = static_cast<std::uint64_t>(lane_values[l]);
    for (std::size_t i = 0; i < width; ++i)
      if ((u >> i) & 1U) bits[i] |= lane_bit(l);
  }
  return bits;
}

inline std::uint64_t unpack_unsigned(std::span<const Lanes> bits, std::size_t lane) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) v |= ((bits[i] >> lane) & 1U) << i;
  return v;
}

inline std::int64_t unpack_signed(std::span<const Lanes> bits, std::size_t lane) {
  std::uint64_t v = unpack_unsigned(bits, lane);
  const std::size_t w = bits.size();
  if (w > 0 && w < 64 && ((v >> (w - 1)) & 1U)) v |= ~std::uint64_t{0} << w;
  return static_cast<std::int64_t>(v);
}

}  // namespace ftfir

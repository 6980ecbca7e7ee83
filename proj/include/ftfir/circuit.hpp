#pragma once

// Structural gate-level netlist: nets, two-valued gates, D registers,
// primary inputs/outputs, named port groups and builder cell tags.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftfir {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Handle into one netlist's net table.
struct NetId {
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t index = kInvalid;

  constexpr bool valid() const { return index != kInvalid; }
  friend constexpr auto operator<=>(NetId, NetId) = default;
};

enum class GateKind : std::uint8_t { And, Or, Not, Xor, Xnor, Mux2, Const0, Const1 };

inline constexpr std::array<GateKind, 8> kAllGateKinds = {
    GateKind::And,  GateKind::Or,   GateKind::Not,    GateKind::Xor,
    GateKind::Xnor, GateKind::Mux2, GateKind::Const0, GateKind::Const1};

constexpr std::size_t arity(GateKind kind) {
  switch (kind) {
    case GateKind::Not: return 1;
    case GateKind::Mux2: return 3;
    case GateKind::Const0:
    case GateKind::Const1: return 0;
    default: return 2;
  }
}

constexpr std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Not: return "NOT";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Mux2: return "MUX2";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
  }
  return "?";
}

inline GateKind gate_kind_from_string(std::string_view s) {
  for (GateKind k : kAllGateKinds)
    if (to_string(k) == s) return k;
  throw Error("unknown gate kind '" + std::string(s) + "'");
}

using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

// MUX2 input order is (select, when0, when1).
struct Gate {
  GateKind kind = GateKind::Const0;
  std::array<NetId, 3> inputs{};
  NetId output;
  CellId cell = kNoCell;

  std::span<const NetId> used_inputs() const { return {inputs.data(), arity(kind)}; }
};

struct Register {
  NetId d;
  NetId q;
  bool reset_value = false;
  CellId cell = kNoCell;
};

// Builder-attached tag ("full_adder", "vedic4x4", "replica", ...). Cells nest.
struct Cell {
  std::string kind;
  CellId parent = kNoCell;
};

enum class Signedness : std::uint8_t { Unsigned, TwosComplement };

// Fixed-width bit vector; bits[0] is the LSB.
struct Word {
  std::vector<NetId> bits;
  Signedness sign = Signedness::Unsigned;

  std::size_t width() const { return bits.size(); }
  NetId operator[](std::size_t i) const { return bits[i]; }
  NetId msb() const { return bits.back(); }
};

enum class PortDirection : std::uint8_t { Input, Output };

struct PortGroup {
  std::string name;
  PortDirection direction = PortDirection::Input;
  Word word;
};

enum class DriverKind : std::uint8_t { None, PrimaryInput, Gate, Register };

struct Driver {
  DriverKind kind = DriverKind::None;
  std::uint32_t index = 0;
};

class Netlist {
 public:
  // ---- nets -------------------------------------------------------------

  NetId add_net(std::string name = {}) {
    NetId id{static_cast<std::uint32_t>(net_names_.size())};
    net_names_.push_back(std::move(name));
    drivers_.push_back({});
    return id;
  }

  std::size_t net_count() const { return net_names_.size(); }
  const std::string& net_name(NetId n) const { return net_names_.at(n.index); }
  void set_net_name(NetId n, std::string name) { net_names_.at(n.index) = std::move(name); }
  const Driver& driver(NetId n) const { return drivers_.at(n.index); }
  bool contains(NetId n) const { return n.valid() && n.index < net_names_.size(); }

  // ---- primary inputs / outputs ------------------------------------------

  NetId add_input(std::string name = {}) {
    NetId n = add_net(std::move(name));
    mark_input(n);
    return n;
  }

  void mark_input(NetId n) {
    check_net(n);
    claim_driver(n, {DriverKind::PrimaryInput, static_cast<std::uint32_t>(inputs_.size())});
    inputs_.push_back(n);
  }

  void mark_output(NetId n) {
    check_net(n);
    outputs_.push_back(n);
  }

  const std::vector<NetId>& primary_inputs() const { return inputs_; }
  const std::vector<NetId>& primary_outputs() const { return outputs_; }

  // ---- gates -------------------------------------------------------------

  NetId add_gate(GateKind kind, std::span<const NetId> ins, std::string name = {}) {
    check_arity(kind, ins.size());
    for (NetId n : ins) check_net(n);
    NetId out = add_net(std::move(name));
    place_gate(kind, ins, out);
    return out;
  }

  NetId add_gate(GateKind kind, std::initializer_list<NetId> ins, std::string name = {}) {
    return add_gate(kind, std::span<const NetId>(ins.begin(), ins.size()), std::move(name));
  }

  // Drive an existing, undriven net (used by importers and copies).
  void drive_net(GateKind kind, std::span<const NetId> ins, NetId out) {
    check_arity(kind, ins.size());
    for (NetId n : ins) check_net(n);
    check_net(out);
    place_gate(kind, ins, out);
  }

  const std::vector<Gate>& gates() const { return gates_; }

  NetId and_(NetId a, NetId b) { return add_gate(GateKind::And, {a, b}); }
  NetId or_(NetId a, NetId b) { return add_gate(GateKind::Or, {a, b}); }
  NetId xor_(NetId a, NetId b) { return add_gate(GateKind::Xor, {a, b}); }
  NetId xnor_(NetId a, NetId b) { return add_gate(GateKind::Xnor, {a, b}); }
  NetId not_(NetId a) { return add_gate(GateKind::Not, {a}); }
  NetId mux2(NetId select, NetId when0, NetId when1) {
    return add_gate(GateKind::Mux2, {select, when0, when1});
  }

  // One shared CONST0/CONST1 net per netlist, created on first request.
  NetId constant(bool value) {
    NetId& slot = value ? const1_ : const0_;
    if (!slot.valid()) {
      CellId saved = current_cell_;
      current_cell_ = kNoCell;
      slot = add_gate(value ? GateKind::Const1 : GateKind::Const0, std::span<const NetId>{},
                      value ? "const1" : "const0");
      current_cell_ = saved;
    }
    return slot;
  }

  // Value of a net driven directly by a CONST gate.
  std::optional<bool> constant_value(NetId n) const {
    const Driver& d = driver(n);
    if (d.kind != DriverKind::Gate) return std::nullopt;
    GateKind k = gates_[d.index].kind;
    if (k == GateKind::Const0) return false;
    if (k == GateKind::Const1) return true;
    return std::nullopt;
  }

  bool is_zero(NetId n) const { return constant_value(n) == std::optional<bool>(false); }

  // ---- registers ---------------------------------------------------------

  // Returns the register index; its q net is driven immediately, d is
  // attached later with connect_register (allows feedback through state).
  std::uint32_t add_register(bool reset_value = false, std::string name = {}) {
    NetId q = add_net(std::move(name));
    auto idx = static_cast<std::uint32_t>(registers_.size());
    claim_driver(q, {DriverKind::Register, idx});
    registers_.push_back({NetId{}, q, reset_value, current_cell_});
    return idx;
  }

  void add_register_driving(NetId q, bool reset_value) {
    check_net(q);
    auto idx = static_cast<std::uint32_t>(registers_.size());
    claim_driver(q, {DriverKind::Register, idx});
    registers_.push_back({NetId{}, q, reset_value, current_cell_});
  }

  void connect_register(std::uint32_t reg, NetId d) {
    check_net(d);
    Register& r = registers_.at(reg);
    if (r.d.valid()) throw Error("register " + std::to_string(reg) + " already connected");
    r.d = d;
  }

  // Register whose input is `d`; returns q.
  NetId delay(NetId d, bool reset_value = false, std::string name = {}) {
    auto r = add_register(reset_value, std::move(name));
    connect_register(r, d);
    return registers_[r].q;
  }

  const std::vector<Register>& registers() const { return registers_; }

  // ---- ports -------------------------------------------------------------

  Word add_input_word(std::string name, std::size_t width,
                      Signedness sign = Signedness::Unsigned) {
    Word w;
    w.sign = sign;
    for (std::size_t i = 0; i < width; ++i)
      w.bits.push_back(add_input(name + "[" + std::to_string(i) + "]"));
    ports_.push_back({std::move(name), PortDirection::Input, w});
    return w;
  }

  void add_output_word(std::string name, const Word& w) {
    for (NetId n : w.bits) mark_output(n);
    ports_.push_back({std::move(name), PortDirection::Output, w});
  }

  void add_port(PortGroup port) {
    for (NetId n : port.word.bits) check_net(n);
    ports_.push_back(std::move(port));
  }

  const std::vector<PortGroup>& ports() const { return ports_; }

  const PortGroup& port(std::string_view name) const {
    for (const auto& p : ports_)
      if (p.name == name) return p;
    throw Error("no port group named '" + std::string(name) + "'");
  }

  const PortGroup* find_port(PortDirection dir) const {
    for (const auto& p : ports_)
      if (p.direction == dir) return &p;
    return nullptr;
  }

  // ---- cells -------------------------------------------------------------

  CellId open_cell(std::string kind) {
    cells_.push_back({std::move(kind), current_cell_});
    current_cell_ = static_cast<CellId>(cells_.size() - 1);
    return current_cell_;
  }

  void close_cell() {
    if (current_cell_ == kNoCell) throw Error("close_cell without open cell");
    current_cell_ = cells_[current_cell_].parent;
  }

  CellId add_cell(std::string kind, CellId parent) {
    cells_.push_back({std::move(kind), parent});
    return static_cast<CellId>(cells_.size() - 1);
  }

  void set_gate_cell(std::size_t gate, CellId cell) { gates_.at(gate).cell = cell; }
  void set_register_cell(std::size_t reg, CellId cell) { registers_.at(reg).cell = cell; }

  const std::vector<Cell>& cells() const { return cells_; }
  CellId current_cell() const { return current_cell_; }

  // ---- well-formedness ---------------------------------------------------

  // Every net has a driver, every register is connected. Combinational
  // cycles are rejected when the netlist is compiled for simulation.
  void validate() const {
    for (std::size_t i = 0; i < drivers_.size(); ++i)
      if (drivers_[i].kind == DriverKind::None)
        throw Error("net " + std::to_string(i) + " ('" + net_names_[i] + "') has no driver");
    for (std::size_t i = 0; i < registers_.size(); ++i)
      if (!registers_[i].d.valid())
        throw Error("register " + std::to_string(i) + " has no input");
  }

 private:
  void check_net(NetId n) const {
    if (!contains(n)) throw Error("dangling net reference " + std::to_string(n.index));
  }

  static void check_arity(GateKind kind, std::size_t n) {
    if (n != arity(kind))
      throw Error(std::string(to_string(kind)) + " expects " + std::to_string(arity(kind)) +
                  " inputs, got " + std::to_string(n));
  }

  void claim_driver(NetId n, Driver d) {
    Driver& slot = drivers_[n.index];
    if (slot.kind != DriverKind::None)
      throw Error("net " + std::to_string(n.index) + " ('" + net_names_[n.index] +
                  "') already has a driver");
    slot = d;
  }

  void place_gate(GateKind kind, std::span<const NetId> ins, NetId out) {
    Gate g;
    g.kind = kind;
    for (std::size_t i = 0; i < ins.size(); ++i) g.inputs[i] = ins[i];
    g.output = out;
    g.cell = current_cell_;
    claim_driver(out, {DriverKind::Gate, static_cast<std::uint32_t>(gates_.size())});
    gates_.push_back(g);
  }

  std::vector<std::string> net_names_;
  std::vector<Driver> drivers_;
  std::vector<Gate> gates_;
  std::vector<Register> registers_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<PortGroup> ports_;
  std::vector<Cell> cells_;
  CellId current_cell_ = kNoCell;
  NetId const0_;
  NetId const1_;
};

// Tags everything built in its lifetime with a new cell of the given kind.
class CellScope {
 public:
  CellScope(Netlist& nl, std::string kind) : nl_(nl), id_(nl.open_cell(std::move(kind))) {}
  ~CellScope() { nl_.close_cell(); }
  CellScope(const CellScope&) = delete;
  CellScope& operator=(const CellScope&) = delete;

  CellId id() const { return id_; }

 private:
  Netlist& nl_;
  CellId id_;
};

// ---- word helpers -----------------------------------------------------------

inline Word zero_extend(Netlist& nl, const Word& w, std::size_t width) {
  Word out = w;
  out.bits.resize(std::min(width, w.width()));
  while (out.width() < width) out.bits.push_back(nl.constant(false));
  return out;
}

inline Word sign_extend(const Word& w, std::size_t width) {
  if (w.width() == 0) throw Error("cannot sign-extend an empty word");
  Word out = w;
  out.bits.resize(std::min(width, w.width()));
  while (out.width() < width) out.bits.push_back(w.msb());
  out.sign = Signedness::TwosComplement;
  return out;
}

inline Word extend(Netlist& nl, const Word& w, std::size_t width) {
  return w.sign == Signedness::TwosComplement ? sign_extend(w, width) : zero_extend(nl, w, width);
}

// Word of `width` constant nets holding the low bits of `value`.
inline Word constant_word(Netlist& nl, std::uint64_t value, std::size_t width,
                          Signedness sign = Signedness::Unsigned) {
  Word w;
  w.sign = sign;
  for (std::size_t i = 0; i < width; ++i) w.bits.push_back(nl.constant(((value >> i) & 1U) != 0));
  return w;
}

inline Word slice(const Word& w, std::size_t lo, std::size_t count) {
  Word out;
  out.bits.assign(w.bits.begin() + static_cast<std::ptrdiff_t>(lo),
                  w.bits.begin() + static_cast<std::ptrdiff_t>(lo + count));
  return out;
}

}  // namespace ftfir

#pragma once

// Netlist interchange.
//
// Structured form (JSON, "ftfir-netlist" version 1):
//   format           "ftfir-netlist"
//   version          1
//   nets             [name, ...]                      index = net id
//   gates            [{kind, inputs:[net..], output, cell}, ...]
//                    kind in AND OR NOT XOR XNOR MUX2 CONST0 CONST1,
//                    MUX2 inputs are (select, when0, when1)
//   registers        [{d, q, reset, cell}, ...]
//   primary_inputs   [net, ...]
//   primary_outputs  [net, ...]
//   ports            [{name, direction: input|output,
//                      signedness: unsigned|twos_complement, bits:[net..]}]
//   cells            [{kind, parent}, ...]              parent -1 = top level
//
// Graph form is Graphviz DOT with one node per primary input, gate, register
// and primary output. Both forms list items in insertion order.

#include <sstream>
#include <string>

#include <json.hpp>

#include "ftfir/circuit.hpp"

namespace ftfir {

enum class ExportFormat { Dot, Json };

inline nlohmann::ordered_json netlist_to_json(const Netlist& nl) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "ftfir-netlist";
  doc["version"] = 1;

  auto nets = ordered_json::array();
  for (std::size_t i = 0; i < nl.net_count(); ++i) nets.push_back(nl.net_name(NetId{static_cast<std::uint32_t>(i)}));
  doc["nets"] = std::move(nets);

  auto gates = ordered_json::array();
  for (const Gate& g : nl.gates()) {
    auto ins = ordered_json::array();
    for (NetId n : g.used_inputs()) ins.push_back(n.index);
    gates.push_back({{"kind", to_string(g.kind)},
                     {"inputs", std::move(ins)},
                     {"output", g.output.index},
                     {"cell", g.cell}});
  }
  doc["gates"] = std::move(gates);

  auto regs = ordered_json::array();
  for (const Register& r : nl.registers())
    regs.push_back({{"d", r.d.index}, {"q", r.q.index}, {"reset", r.reset_value ? 1 : 0},
                    {"cell", r.cell}});
  doc["registers"] = std::move(regs);

  auto ids = [](const std::vector<NetId>& v) {
    auto a = ordered_json::array();
    for (NetId n : v) a.push_back(n.index);
    return a;
  };
  doc["primary_inputs"] = ids(nl.primary_inputs());
  doc["primary_outputs"] = ids(nl.primary_outputs());

  auto ports = ordered_json::array();
  for (const PortGroup& p : nl.ports())
    ports.push_back({{"name", p.name},
                     {"direction", p.direction == PortDirection::Input ? "input" : "output"},
                     {"signedness", p.word.sign == Signedness::TwosComplement ? "twos_complement"
                                                                              : "unsigned"},
                     {"bits", ids(p.word.bits)}});
  doc["ports"] = std::move(ports);

  auto cells = ordered_json::array();
  for (const Cell& c : nl.cells()) cells.push_back({{"kind", c.kind}, {"parent", c.parent}});
  doc["cells"] = std::move(cells);
  return doc;
}

inline Netlist netlist_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "ftfir-netlist")
      throw Error("not an ftfir-netlist document");
    if (doc.at("version").get<int>() != 1) throw Error("unsupported netlist document version");

    Netlist nl;
    for (const auto& name : doc.at("nets")) nl.add_net(name.get<std::string>());
    auto net = [&](const nlohmann::json& j) {
      NetId n{j.get<std::uint32_t>()};
      if (!nl.contains(n)) throw Error("dangling net reference " + std::to_string(n.index));
      return n;
    };

    for (const auto& c : doc.at("cells")) nl.add_cell(c.at("kind").get<std::string>(), c.at("parent").get<CellId>());
    const auto cell_count = static_cast<CellId>(nl.cells().size());
    auto cell = [&](const nlohmann::json& j) {
      auto c = j.get<CellId>();
      if (c < kNoCell || c >= cell_count) throw Error("invalid cell reference " + std::to_string(c));
      return c;
    };

    for (const auto& g : doc.at("gates")) {
      std::vector<NetId> ins;
      for (const auto& i : g.at("inputs")) ins.push_back(net(i));
      nl.drive_net(gate_kind_from_string(g.at("kind").get<std::string>()), ins, net(g.at("output")));
      nl.set_gate_cell(nl.gates().size() - 1, cell(g.at("cell")));
    }
    for (const auto& r : doc.at("registers")) {
      nl.add_register_driving(net(r.at("q")), r.at("reset").get<int>() != 0);
      const auto idx = static_cast<std::uint32_t>(nl.registers().size() - 1);
      nl.connect_register(idx, net(r.at("d")));
      nl.set_register_cell(idx, cell(r.at("cell")));
    }
    for (const auto& i : doc.at("primary_inputs")) nl.mark_input(net(i));
    for (const auto& o : doc.at("primary_outputs")) nl.mark_output(net(o));
    for (const auto& p : doc.at("ports")) {
      PortGroup pg;
      pg.name = p.at("name").get<std::string>();
      const auto dir = p.at("direction").get<std::string>();
      if (dir != "input" && dir != "output") throw Error("invalid port direction '" + dir + "'");
      pg.direction = dir == "input" ? PortDirection::Input : PortDirection::Output;
      pg.word.sign = p.at("signedness").get<std::string>() == "twos_complement"
                         ? Signedness::TwosComplement
                         : Signedness::Unsigned;
      for (const auto& b : p.at("bits")) pg.word.bits.push_back(net(b));
      nl.add_port(std::move(pg));
    }
    nl.validate();
    return nl;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed netlist document: ") + e.what());
  }
}

inline Netlist import_netlist(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed netlist document: ") + e.what());
  }
  return netlist_from_json(doc);
}

inline std::string netlist_to_dot(const Netlist& nl, const std::string& graph_name = "netlist") {
  std::ostringstream os;
  auto node = [&](NetId n) {
    const Driver& d = nl.driver(n);
    switch (d.kind) {
      case DriverKind::PrimaryInput: return "i" + std::to_string(d.index);
      case DriverKind::Gate: return "g" + std::to_string(d.index);
      case DriverKind::Register: return "r" + std::to_string(d.index);
      case DriverKind::None: break;
    }
    return "undriven" + std::to_string(n.index);
  };

  os << "digraph \"" << graph_name << "\" {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n";
  for (std::size_t i = 0; i < nl.primary_inputs().size(); ++i)
    os << "  i" << i << " [shape=triangle,label=\"" << nl.net_name(nl.primary_inputs()[i])
       << "\"];\n";
  for (std::size_t i = 0; i < nl.gates().size(); ++i)
    os << "  g" << i << " [shape=box,label=\"" << to_string(nl.gates()[i].kind) << "\"];\n";
  for (std::size_t i = 0; i < nl.registers().size(); ++i)
    os << "  r" << i << " [shape=box,style=bold,label=\"DFF\"];\n";
  for (std::size_t i = 0; i < nl.primary_outputs().size(); ++i)
    os << "  o" << i << " [shape=invtriangle,label=\"" << nl.net_name(nl.primary_outputs()[i])
       << "\"];\n";

  for (std::size_t i = 0; i < nl.gates().size(); ++i)
    for (NetId in : nl.gates()[i].used_inputs()) os << "  " << node(in) << " -> g" << i << ";\n";
  for (std::size_t i = 0; i < nl.registers().size(); ++i)
    os << "  " << node(nl.registers()[i].d) << " -> r" << i << ";\n";
  for (std::size_t i = 0; i < nl.primary_outputs().size(); ++i)
    os << "  " << node(nl.primary_outputs()[i]) << " -> o" << i << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string export_netlist(const Netlist& nl, ExportFormat format) {
  if (format == ExportFormat::Dot) return netlist_to_dot(nl);
  return netlist_to_json(nl).dump(1) + "\n";
}

}  // namespace ftfir

#pragma once

// Structural primitive census and the comparison against the reference
// FPGA utilization table (LUT / FF / carry per 5MR configuration).

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ftfir/circuit.hpp"
#include "ftfir/fir.hpp"
#include "ftfir/redundancy.hpp"
#include "ftfir/voters.hpp"

namespace ftfir {

struct ResourceCount {
  std::size_t flip_flops = 0;
  std::map<GateKind, std::size_t> gates_by_kind;
  std::map<std::string, std::size_t> cells_by_kind;
  std::size_t full_adder_cells = 0;
  std::size_t mux2 = 0;
  std::size_t total_gates = 0;

  std::size_t gates(GateKind k) const {
    auto it = gates_by_kind.find(k);
    return it == gates_by_kind.end() ? 0 : it->second;
  }

  std::size_t cells(const std::string& kind) const {
    auto it = cells_by_kind.find(kind);
    return it == cells_by_kind.end() ? 0 : it->second;
  }

  ResourceCount& operator+=(const ResourceCount& o) {
    flip_flops += o.flip_flops;
    for (const auto& [k, v] : o.gates_by_kind) gates_by_kind[k] += v;
    for (const auto& [k, v] : o.cells_by_kind) cells_by_kind[k] += v;
    full_adder_cells += o.full_adder_cells;
    mux2 += o.mux2;
    total_gates += o.total_gates;
    return *this;
  }

  friend bool operator==(const ResourceCount&, const ResourceCount&) = default;
};

namespace detail {

inline bool in_subtree(const Netlist& nl, CellId c, CellId root) {
  for (; c != kNoCell; c = nl.cells()[c].parent)
    if (c == root) return true;
  return false;
}

// Counts items whose cell satisfies `keep`.
template <typename Pred>
ResourceCount census_if(const Netlist& nl, Pred keep) {
  ResourceCount rc;
  for (const Gate& g : nl.gates())
    if (keep(g.cell)) {
      ++rc.gates_by_kind[g.kind];
      ++rc.total_gates;
      if (g.kind == GateKind::Mux2) ++rc.mux2;
    }
  for (const Register& r : nl.registers())
    if (keep(r.cell)) ++rc.flip_flops;
  for (std::size_t i = 0; i < nl.cells().size(); ++i)
    if (keep(static_cast<CellId>(i))) ++rc.cells_by_kind[nl.cells()[i].kind];
  rc.full_adder_cells = rc.cells("full_adder");
  return rc;
}

}  // namespace detail

inline ResourceCount census(const Netlist& nl) {
  return detail::census_if(nl, [](CellId) { return true; });
}

// Everything built inside one cell, nested cells included.
inline ResourceCount census_cell(const Netlist& nl, CellId root) {
  return detail::census_if(nl, [&](CellId c) { return detail::in_subtree(nl, c, root); });
}

// Gates and registers outside every cell.
inline ResourceCount census_glue(const Netlist& nl) {
  ResourceCount rc = detail::census_if(nl, [](CellId c) { return c == kNoCell; });
  rc.cells_by_kind.clear();
  rc.full_adder_cells = 0;
  return rc;
}

// ---- reference table ---------------------------------------------------------------

struct ReferenceRow {
  VoterKind config;
  int lut;
  int ff;
  int carry;
};

inline constexpr std::array<ReferenceRow, 5> kReferenceUtilization = {{
    {VoterKind::Majority5, 122, 132, 33},
    {VoterKind::Xor5, 122, 132, 33},
    {VoterKind::Xnor5, 122, 132, 33},
    {VoterKind::CascadedTmr5, 225, 132, 57},
    {VoterKind::Mux41_5, 244, 148, 57},
}};

inline const ReferenceRow& reference_row(VoterKind k) {
  for (const auto& r : kReferenceUtilization)
    if (r.config == k) return r;
  throw Error("no reference row");
}

struct ConfigResources {
  ResourceCount total;
  ResourceCount voter;
};

inline ConfigResources config_resources(const ReplicaSystem& sys) {
  ConfigResources cr;
  cr.total = census(sys.netlist);
  for (std::size_t i = 0; i < sys.netlist.cells().size(); ++i) {
    const Cell& c = sys.netlist.cells()[i];
    if (c.parent == kNoCell && c.kind == "word_voter")
      cr.voter += census_cell(sys.netlist, static_cast<CellId>(i));
  }
  return cr;
}

struct ComparisonRow {
  VoterKind config;
  ConfigResources ours;
  ReferenceRow reference;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  bool base_ff_equal = false;      // Conventional, XOR and XNOR rows have equal FF counts
  bool richer_voters = false;      // Cascaded and 4:1 MUX voters use more gates than XOR/XNOR
};

inline ComparisonTable compare_with_reference(const std::map<VoterKind, ConfigResources>& counts) {
  ComparisonTable t;
  for (const auto& ref : kReferenceUtilization) {
    auto it = counts.find(ref.config);
    if (it == counts.end())
      throw Error("missing configuration " + std::string(to_string(ref.config)));
    t.rows.push_back({ref.config, it->second, ref});
  }
  auto row = [&](VoterKind k) -> const ConfigResources& { return counts.at(k); };
  t.base_ff_equal = row(VoterKind::Majority5).total.flip_flops == row(VoterKind::Xor5).total.flip_flops &&
                    row(VoterKind::Xor5).total.flip_flops == row(VoterKind::Xnor5).total.flip_flops;
  const std::size_t cascade = std::max(row(VoterKind::Xor5).voter.total_gates, row(VoterKind::Xnor5).voter.total_gates);
  t.richer_voters = row(VoterKind::CascadedTmr5).voter.total_gates > cascade &&
                    row(VoterKind::Mux41_5).voter.total_gates > cascade;
  return t;
}

inline std::map<VoterKind, ConfigResources> resources_for_fir(const FirDatapath& fir) {
  std::map<VoterKind, ConfigResources> out;
  for (VoterKind k : kAllVoterKinds) out[k] = config_resources(replicate(fir, k));
  return out;
}

// CSV: config,ff,xor,xnor,and,or,not,mux2,fa_cells,paper_lut,paper_ff,paper_carry
inline std::string comparison_csv(const ComparisonTable& t) {
  std::ostringstream os;
  os << "config,ff,xor,xnor,and,or,not,mux2,fa_cells,paper_lut,paper_ff,paper_carry\n";
  for (const auto& r : t.rows) {
    const ResourceCount& c = r.ours.total;
    os << to_string(r.config) << "," << c.flip_flops << "," << c.gates(GateKind::Xor) << ","
       << c.gates(GateKind::Xnor) << "," << c.gates(GateKind::And) << "," << c.gates(GateKind::Or)
       << "," << c.gates(GateKind::Not) << "," << c.mux2 << "," << c.full_adder_cells << ","
       << r.reference.lut << "," << r.reference.ff << "," << r.reference.carry << "\n";
  }
  return os.str();
}

}  // namespace ftfir

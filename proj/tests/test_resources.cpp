#include <gtest/gtest.h>

#include "ftfir/arithmetic.hpp"
#include "ftfir/netlist_io.hpp"
#include "ftfir/resources.hpp"

using namespace ftfir;

namespace {

FirDatapath small_fir(int taps) {
  FilterSpec spec;
  spec.num_taps = taps;
  return build_fir(design_lowpass(spec));
}

// Sum over top-level cells plus everything outside any cell.
ResourceCount by_parts(const Netlist& nl) {
  ResourceCount sum = census_glue(nl);
  for (std::size_t i = 0; i < nl.cells().size(); ++i)
    if (nl.cells()[i].parent == kNoCell) sum += census_cell(nl, static_cast<CellId>(i));
  return sum;
}

}  // namespace

TEST(Census, Vote3XorMux) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input(), c = nl.add_input();
  nl.mark_output(build_vote3_xor_mux(nl, a, b, c));
  ResourceCount rc = census(nl);
  EXPECT_EQ(rc.gates(GateKind::Xor), 1U);
  EXPECT_EQ(rc.mux2, 1U);
  EXPECT_EQ(rc.total_gates, 2U);
  EXPECT_EQ(rc.flip_flops, 0U);
}

TEST(Census, Vedic4x4HasNineFullAdders) {
  Netlist nl;
  Word a = nl.add_input_word("a", 4), b = nl.add_input_word("b", 4);
  nl.add_output_word("p", build_vedic_4x4(nl, a, b));
  EXPECT_EQ(census(nl).full_adder_cells, 9U);
}

TEST(Census, TotalsEqualSumOfParts) {
  ReplicaSystem sys = replicate(small_fir(5), VoterKind::CascadedTmr5);
  ResourceCount rc = census(sys.netlist);
  std::size_t sum = 0;
  for (const auto& [k, v] : rc.gates_by_kind) sum += v;
  EXPECT_EQ(sum, rc.total_gates);
  EXPECT_EQ(rc.total_gates, sys.netlist.gates().size());
  EXPECT_EQ(rc.flip_flops, sys.netlist.registers().size());
  EXPECT_EQ(rc.mux2, rc.gates(GateKind::Mux2));
}

TEST(Census, ReplicatedFlipFlopsAreFiveTimesBase) {
  FirDatapath fir = small_fir(7);
  const std::size_t base = census(fir.netlist).flip_flops;
  for (VoterKind k : kAllVoterKinds) EXPECT_EQ(census(replicate(fir, k).netlist).flip_flops, 5 * base);
}

TEST(Census, AdditiveOverCellsAndGlue) {
  for (VoterKind k : kAllVoterKinds) {
    ReplicaSystem sys = replicate(small_fir(5), k);
    ResourceCount whole = census(sys.netlist), parts = by_parts(sys.netlist);
    EXPECT_EQ(parts.total_gates, whole.total_gates);
    EXPECT_EQ(parts.flip_flops, whole.flip_flops);
    EXPECT_EQ(parts.gates_by_kind, whole.gates_by_kind);
    EXPECT_EQ(parts.cells_by_kind, whole.cells_by_kind);
  }
}

TEST(Census, StableAcrossExportImport) {
  ReplicaSystem sys = replicate(small_fir(5), VoterKind::Mux41_5);
  Netlist back = import_netlist(export_netlist(sys.netlist, ExportFormat::Json));
  EXPECT_EQ(census(back), census(sys.netlist));
  EXPECT_EQ(census(sys.netlist), census(sys.netlist));
}

TEST(Comparison, ReferenceRowsAreVerbatim) {
  EXPECT_EQ(reference_row(VoterKind::Majority5).lut, 122);
  EXPECT_EQ(reference_row(VoterKind::Majority5).ff, 132);
  EXPECT_EQ(reference_row(VoterKind::Majority5).carry, 33);
  EXPECT_EQ(reference_row(VoterKind::CascadedTmr5).lut, 225);
  EXPECT_EQ(reference_row(VoterKind::CascadedTmr5).ff, 132);
  EXPECT_EQ(reference_row(VoterKind::CascadedTmr5).carry, 57);
  EXPECT_EQ(reference_row(VoterKind::Mux41_5).lut, 244);
  EXPECT_EQ(reference_row(VoterKind::Mux41_5).ff, 148);
  EXPECT_EQ(reference_row(VoterKind::Mux41_5).carry, 57);
}

TEST(Comparison, StructuralRelations) {
  ComparisonTable t = compare_with_reference(resources_for_fir(small_fir(7)));
  ASSERT_EQ(t.rows.size(), 5U);
  EXPECT_TRUE(t.base_ff_equal);
  EXPECT_TRUE(t.richer_voters);
  for (const auto& r : t.rows) EXPECT_GT(r.ours.voter.total_gates, 0U);
}

TEST(Comparison, MissingConfigurationRejected) {
  auto counts = resources_for_fir(small_fir(3));
  counts.erase(VoterKind::Xnor5);
  EXPECT_THROW(compare_with_reference(counts), Error);
}

TEST(Comparison, CsvRows) {
  ComparisonTable t = compare_with_reference(resources_for_fir(small_fir(3)));
  const std::string csv = comparison_csv(t);
  EXPECT_EQ(csv.rfind("config,ff,xor,xnor,and,or,not,mux2,fa_cells,paper_lut,paper_ff,paper_carry\n", 0), 0U);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_NE(csv.find(",122,132,33\n"), std::string::npos);
  EXPECT_NE(csv.find("cascaded_tmr5,"), std::string::npos);
  EXPECT_NE(csv.find(",225,132,57\n"), std::string::npos);
  EXPECT_NE(csv.find("mux41_5,"), std::string::npos);
  EXPECT_NE(csv.find(",244,148,57\n"), std::string::npos);
}

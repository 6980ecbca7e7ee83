// Builds a 7-tap FIR, wraps it in each voter configuration, and shows that a
// fault in one replica leaves the output untouched.
#include <iostream>

#include "ftfir/ftfir.hpp"

using namespace ftfir;

int main() {
  FilterSpec spec;
  spec.num_taps = 7;
  const QuantizedCoeffs coeffs = design_lowpass(spec);
  const FirDatapath fir = build_fir(coeffs);

  std::cout << "coefficients (Q1." << coeffs.frac_bits << "):";
  for (auto c : coeffs.fixed) std::cout << " " << c;
  std::cout << "\n";

  const std::vector<std::vector<std::int64_t>> impulse{{16384, 0, 0, 0, 0, 0, 0, 0, 0}};
  const auto golden = run_fir_batch(fir, impulse);

  for (VoterKind k : kAllVoterKinds) {
    const ReplicaSystem sys = replicate(fir, k);
    FaultOverlay fault;
    fault.faults.push_back({sys.replica_nets[1][sys.replica_nets[1].size() / 2], 0, 100, FaultMode::Stuck1});
    const auto out = run_system_batch(sys, impulse, fault);
    const ResourceCount rc = census(sys.netlist);
    std::cout << display_name(k) << ": " << rc.total_gates << " gates, " << rc.flip_flops << " flip-flops, "
              << (out == golden ? "fault masked" : "fault visible") << "\n";
  }

  std::cout << "5MR reliability at R=0.9: " << analytic_reliability(RedundancyScheme::Majority5, 0.9) << "\n";
}

#pragma once

// Five-way replication under a word voter, transient fault injection
// campaigns and analytic NMR reliability.
//
// The fault universe of a replica is every net driven inside it (gate and
// register outputs, including its constant nets). Primary inputs are shared
// and voters are assumed fault-free, so neither is injectable.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftfir/circuit.hpp"
#include "ftfir/fir.hpp"
#include "ftfir/rng.hpp"
#include "ftfir/simulate.hpp"
#include "ftfir/stream.hpp"
#include "ftfir/voters.hpp"

namespace ftfir {

inline constexpr std::size_t kReplicas = 5;

struct ReplicaSystem {
  Netlist netlist;
  VoterKind voter = VoterKind::Majority5;
  Word input;
  Word output;
  std::array<Word, kReplicas> replica_outputs;
  std::array<std::vector<NetId>, kReplicas> replica_nets;
  std::size_t latency = 0;
  std::size_t base_registers = 0;

  std::size_t universe_size() const {
    std::size_t n = 0;
    for (const auto& r : replica_nets) n += r.size();
    return n;
  }
};

// Copies `base` five times around one shared input port; outputs go through
// a word voter of the given kind. `base` needs exactly one input and one
// output port group, and the input group must cover all primary inputs.
inline ReplicaSystem replicate(const Netlist& base, VoterKind voter, std::size_t latency = 0) {
  base.validate();
  const PortGroup* in_port = nullptr;
  const PortGroup* out_port = nullptr;
  for (const auto& p : base.ports()) {
    const PortGroup*& slot = p.direction == PortDirection::Input ? in_port : out_port;
    if (slot != nullptr) throw Error("malformed port groups: replicated netlist needs exactly one input and one output group");
    slot = &p;
  }
  if (in_port == nullptr || out_port == nullptr)
    throw Error("malformed port groups: replicated netlist needs exactly one input and one output group");
  if (in_port->word.width() != base.primary_inputs().size())
    throw Error("malformed port groups: input group does not cover every primary input");

  ReplicaSystem sys;
  sys.voter = voter;
  sys.latency = latency;
  sys.base_registers = base.registers().size();
  Netlist& nl = sys.netlist;
  sys.input = nl.add_input_word(in_port->name, in_port->word.width(), in_port->word.sign);

  for (std::size_t r = 0; r < kReplicas; ++r) {
    CellScope replica(nl, "replica");
    const std::string prefix = "r" + std::to_string(r) + "/";
    std::vector<NetId> map(base.net_count());
    for (std::size_t i = 0; i < in_port->word.width(); ++i) map[in_port->word[i].index] = sys.input[i];
    for (std::size_t i = 0; i < base.net_count(); ++i) {
      if (map[i].valid()) continue;
      map[i] = nl.add_net(prefix + base.net_name(NetId{static_cast<std::uint32_t>(i)}));
      sys.replica_nets[r].push_back(map[i]);
    }

    const CellId cell_offset = static_cast<CellId>(nl.cells().size());
    for (const Cell& c : base.cells())
      nl.add_cell(c.kind, c.parent == kNoCell ? replica.id() : c.parent + cell_offset);
    auto mapped_cell = [&](CellId c) { return c == kNoCell ? replica.id() : c + cell_offset; };

    for (const Gate& g : base.gates()) {
      std::array<NetId, 3> ins{};
      const std::size_t k = arity(g.kind);
      for (std::size_t i = 0; i < k; ++i) ins[i] = map[g.inputs[i].index];
      nl.drive_net(g.kind, std::span<const NetId>(ins.data(), k), map[g.output.index]);
      nl.set_gate_cell(nl.gates().size() - 1, mapped_cell(g.cell));
    }
    for (const Register& reg : base.registers()) {
      nl.add_register_driving(map[reg.q.index], reg.reset_value);
      const auto idx = static_cast<std::uint32_t>(nl.registers().size() - 1);
      nl.connect_register(idx, map[reg.d.index]);
      nl.set_register_cell(idx, mapped_cell(reg.cell));
    }
    Word out;
    out.sign = out_port->word.sign;
    for (NetId n : out_port->word.bits) out.bits.push_back(map[n.index]);
    sys.replica_outputs[r] = std::move(out);
  }

  sys.output = build_word_voter(nl, voter, std::span<const Word, kReplicas>(sys.replica_outputs));
  nl.add_output_word(out_port->name, sys.output);
  nl.validate();
  return sys;
}

inline ReplicaSystem replicate(const FirDatapath& fir, VoterKind voter) {
  return replicate(fir.netlist, voter, fir.latency);
}

// Latency-aligned outputs of the voted system, as run_fir_batch does for a
// single datapath.
inline std::vector<std::vector<std::int64_t>> run_system_batch(
    const ReplicaSystem& sys, std::span<const std::vector<std::int64_t>> traces,
    const FaultOverlay& overlay = {}) {
  Simulator sim(sys.netlist);
  WordStreamer streamer(sim, sys.input, sys.output);
  CompiledFaults faults = sim.compile_faults(overlay);
  std::vector<std::vector<std::int64_t>> result;
  for (std::size_t first = 0; first < traces.size(); first += kLaneCount) {
    const std::size_t count = std::min(kLaneCount, traces.size() - first);
    auto raw = streamer.run(traces.subspan(first, count), sys.latency, &faults);
    for (auto& r : raw)
      result.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(sys.latency), r.end());
  }
  return result;
}

// ---- reports ------------------------------------------------------------------

struct ReplicaBreakdown {
  std::uint64_t injected = 0;  // trials in which this replica carried a fault
  std::uint64_t masked = 0;    // ... whose system output was still correct
};

struct PairResult {
  std::size_t first = 0;
  std::size_t second = 0;
  std::uint64_t patterns = 0;
  std::uint64_t masked = 0;
  bool fully_masked() const { return masked == patterns; }
};

struct MaskingReport {
  std::string configuration;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t universe_size = 0;
  std::uint64_t total = 0;
  std::uint64_t masked = 0;
  std::uint64_t unmasked = 0;
  std::array<ReplicaBreakdown, kReplicas> per_replica{};
  std::vector<PairResult> pairs;  // double-fault campaigns only
  bool coverage_complete = true;  // double-fault: every output bit saw both golden values

  double rate() const { return total == 0 ? 1.0 : static_cast<double>(masked) / static_cast<double>(total); }

  std::size_t fully_masked_pairs() const {
    std::size_t n = 0;
    for (const auto& p : pairs) n += p.fully_masked() ? 1 : 0;
    return n;
  }
};

// Summary CSV: configuration,mode,seed,universe_size,total,masked,unmasked,masking_rate
inline std::string report_summary_csv(const std::vector<MaskingReport>& reports) {
  std::ostringstream os;
  os << "configuration,mode,seed,universe_size,total,masked,unmasked,masking_rate\n";
  for (const auto& r : reports)
    os << r.configuration << "," << r.mode << "," << r.seed << "," << r.universe_size << ","
       << r.total << "," << r.masked << "," << r.unmasked << "," << format_double(r.rate()) << "\n";
  return os.str();
}

// Per-replica CSV: configuration,replica,injected,masked
inline std::string report_replica_csv(const MaskingReport& r) {
  std::ostringstream os;
  os << "configuration,replica,injected,masked\n";
  for (std::size_t i = 0; i < kReplicas; ++i)
    os << r.configuration << "," << i + 1 << "," << r.per_replica[i].injected << ","
       << r.per_replica[i].masked << "\n";
  return os.str();
}

// Pair CSV (double-fault campaigns): configuration,replica_a,replica_b,patterns,masked,fully_masked
inline std::string report_pairs_csv(const MaskingReport& r) {
  std::ostringstream os;
  os << "configuration,replica_a,replica_b,patterns,masked,fully_masked\n";
  for (const auto& p : r.pairs)
    os << r.configuration << "," << p.first + 1 << "," << p.second + 1 << "," << p.patterns << ","
       << p.masked << "," << (p.fully_masked() ? 1 : 0) << "\n";
  return os.str();
}

inline nlohmann::ordered_json report_to_json(const MaskingReport& r) {
  nlohmann::ordered_json j;
  j["configuration"] = r.configuration;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["universe_size"] = r.universe_size;
  j["total"] = r.total;
  j["masked"] = r.masked;
  j["unmasked"] = r.unmasked;
  j["masking_rate"] = r.rate();
  auto reps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < kReplicas; ++i)
    reps.push_back({{"replica", i + 1},
                    {"injected", r.per_replica[i].injected},
                    {"masked", r.per_replica[i].masked}});
  j["per_replica"] = std::move(reps);
  if (!r.pairs.empty()) {
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : r.pairs)
      pairs.push_back({{"replica_a", p.first + 1},
                       {"replica_b", p.second + 1},
                       {"patterns", p.patterns},
                       {"masked", p.masked},
                       {"fully_masked", p.fully_masked()}});
    j["pairs"] = std::move(pairs);
    j["coverage_complete"] = r.coverage_complete;
  }
  return j;
}

// ---- campaigns ----------------------------------------------------------------

namespace detail {

// Runs the stimulus (from `start`, or reset) with the given overlay and
// returns the lanes whose output trace differs anywhere from `golden`.
inline Lanes mismatching_lanes(const WordStreamer& streamer,
                               const std::vector<std::vector<std::int64_t>>& stimulus,
                               const std::vector<std::vector<Lanes>>& golden,
                               const CompiledFaults& faults, const SimState* start) {
  auto rows = streamer.run_bits(stimulus, 0, &faults, start);
  const std::size_t offset = golden.size() - rows.size();
  Lanes bad = 0;
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t i = 0; i < rows[t].size(); ++i) bad |= rows[t][i] ^ golden[offset + t][i];
  return bad;
}

inline std::vector<std::vector<std::int64_t>> as_stimulus(std::span<const std::int64_t> s) {
  if (s.empty()) throw Error("stimulus must be nonempty");
  return {std::vector<std::int64_t>(s.begin(), s.end())};
}

}  // namespace detail

// Flip every replica net, one at a time, during `cycle`; a fault is masked
// when the whole voted output trace equals the fault-free one.
inline MaskingReport enumerate_single_faults(const ReplicaSystem& sys,
                                             std::span<const std::int64_t> stimulus,
                                             std::size_t cycle) {
  auto stim = detail::as_stimulus(stimulus);
  if (cycle >= stimulus.size())
    throw Error("fault cycle " + std::to_string(cycle) + " is beyond the " +
                std::to_string(stimulus.size()) + "-cycle stimulus");
  Simulator sim(sys.netlist);
  WordStreamer streamer(sim, sys.input, sys.output);
  const auto golden = streamer.run_bits(stim, 0, nullptr);
  const SimState at_fault = streamer.advance(stimulus, cycle);

  MaskingReport rep;
  rep.configuration = std::string(to_string(sys.voter));
  rep.mode = "exhaustive-single";
  rep.universe_size = sys.universe_size();

  std::vector<std::pair<std::size_t, NetId>> universe;
  for (std::size_t r = 0; r < kReplicas; ++r)
    for (NetId n : sys.replica_nets[r]) universe.push_back({r, n});

  for (std::size_t first = 0; first < universe.size(); first += kLaneCount) {
    const std::size_t count = std::min(kLaneCount, universe.size() - first);
    FaultOverlay overlay;
    for (std::size_t l = 0; l < count; ++l)
      overlay.faults.push_back({universe[first + l].second, cycle, cycle + 1, FaultMode::Flip, lane_bit(l)});
    const Lanes bad = detail::mismatching_lanes(streamer, stim, golden, sim.compile_faults(overlay), &at_fault);
    for (std::size_t l = 0; l < count; ++l) {
      const bool ok = ((bad >> l) & 1U) == 0;
      auto& br = rep.per_replica[universe[first + l].first];
      ++br.injected;
      ++rep.total;
      if (ok) {
        ++br.masked;
        ++rep.masked;
      } else {
        ++rep.unmasked;
      }
    }
  }
  return rep;
}

// Two replicas fail from `cycle` to the end of the stimulus. Adversarial:
// every output bit of each faulty replica is forced to each of the 2x2
// value combinations (stuck-at patterns), so each bit position sees every
// disagreement pattern against both golden values. Non-adversarial: both
// faulty replicas output the bitwise complement of their correct word.
inline MaskingReport enumerate_double_faults(const ReplicaSystem& sys,
                                             std::span<const std::int64_t> stimulus,
                                             std::size_t cycle, bool adversarial) {
  auto stim = detail::as_stimulus(stimulus);
  if (cycle >= stimulus.size())
    throw Error("fault cycle " + std::to_string(cycle) + " is beyond the " +
                std::to_string(stimulus.size()) + "-cycle stimulus");
  Simulator sim(sys.netlist);
  WordStreamer streamer(sim, sys.input, sys.output);
  const auto golden = streamer.run_bits(stim, 0, nullptr);
  const SimState at_fault = streamer.advance(stimulus, cycle);
  const std::uint64_t end = stimulus.size();

  MaskingReport rep;
  rep.configuration = std::string(to_string(sys.voter));
  rep.mode = adversarial ? "exhaustive-double-adversarial" : "exhaustive-double";
  rep.universe_size = sys.universe_size();

  // Every voted output bit must take both values after the fault cycle for
  // the stuck-at patterns to exercise both correct values.
  const std::size_t width = sys.output.width();
  for (std::size_t i = 0; i < width && rep.coverage_complete; ++i) {
    bool saw0 = false, saw1 = false;
    for (std::size_t t = cycle; t < golden.size(); ++t) ((golden[t][i] & 1U) ? saw1 : saw0) = true;
    rep.coverage_complete = saw0 && saw1;
  }

  struct LaneJob {
    std::size_t pair;
  };
  FaultOverlay overlay;
  std::vector<LaneJob> jobs;
  for (std::size_t a = 0; a < kReplicas; ++a)
    for (std::size_t b = a + 1; b < kReplicas; ++b) {
      rep.pairs.push_back({a, b, 0, 0});
      const std::size_t patterns = adversarial ? 4 : 1;
      for (std::size_t p = 0; p < patterns; ++p) {
        const Lanes lane = lane_bit(jobs.size());
        jobs.push_back({rep.pairs.size() - 1});
        auto force = [&](std::size_t replica, int mode) {
          for (NetId n : sys.replica_outputs[replica].bits)
            overlay.faults.push_back({n, cycle, end,
                                      mode < 0 ? FaultMode::Flip
                                               : (mode ? FaultMode::Stuck1 : FaultMode::Stuck0),
                                      lane});
        };
        force(a, adversarial ? static_cast<int>(p & 1U) : -1);
        force(b, adversarial ? static_cast<int>((p >> 1) & 1U) : -1);
      }
    }

  const Lanes bad = detail::mismatching_lanes(streamer, stim, golden, sim.compile_faults(overlay), &at_fault);
  for (std::size_t l = 0; l < jobs.size(); ++l) {
    PairResult& pr = rep.pairs[jobs[l].pair];
    const bool ok = ((bad >> l) & 1U) == 0;
    ++pr.patterns;
    ++rep.total;
    for (std::size_t r : {pr.first, pr.second}) {
      ++rep.per_replica[r].injected;
      if (ok) ++rep.per_replica[r].masked;
    }
    if (ok) {
      ++pr.masked;
      ++rep.masked;
    } else {
      ++rep.unmasked;
    }
  }
  return rep;
}

enum class FailureMode : std::uint8_t {
  NetFlip,      // one uniformly chosen replica net inverted for the whole run
  ForcedWrong,  // the replica's output word complemented for the whole run
};

constexpr std::string_view to_string(FailureMode m) {
  return m == FailureMode::NetFlip ? "net-flip" : "forced-wrong";
}

inline FailureMode failure_mode_from_string(std::string_view s) {
  if (s == "net-flip") return FailureMode::NetFlip;
  if (s == "forced-wrong") return FailureMode::ForcedWrong;
  throw Error("unknown failure mode '" + std::string(s) + "' (expected net-flip or forced-wrong)");
}

// Each trial draws independent replica failures with the given probability
// from the (seed, trial) substream; 64 trials share one simulation pass.
inline MaskingReport monte_carlo_campaign(const ReplicaSystem& sys,
                                          std::span<const std::int64_t> stimulus,
                                          double probability, std::uint64_t trials,
                                          std::uint64_t seed,
                                          FailureMode failure = FailureMode::NetFlip) {
  if (!(probability >= 0.0 && probability <= 1.0))
    throw Error("failure probability must lie in [0, 1]");
  if (trials < 1) throw Error("campaign needs at least one trial");
  auto stim = detail::as_stimulus(stimulus);
  Simulator sim(sys.netlist);
  WordStreamer streamer(sim, sys.input, sys.output);
  const auto golden = streamer.run_bits(stim, 0, nullptr);
  const std::uint64_t end = stimulus.size();

  MaskingReport rep;
  rep.configuration = std::string(to_string(sys.voter));
  rep.mode = "monte-carlo/" + std::string(to_string(failure));
  rep.seed = seed;
  rep.universe_size = sys.universe_size();

  for (std::uint64_t first = 0; first < trials; first += kLaneCount) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kLaneCount, trials - first));
    FaultOverlay overlay;
    std::vector<std::array<bool, kReplicas>> failed(count);
    for (std::size_t l = 0; l < count; ++l) {
      StreamRng rng(seed, first + l);
      for (std::size_t r = 0; r < kReplicas; ++r) {
        failed[l][r] = rng.uniform01() < probability;
        if (!failed[l][r]) continue;
        if (failure == FailureMode::NetFlip) {
          const auto& nets = sys.replica_nets[r];
          overlay.faults.push_back({nets[rng.index(nets.size())], 0, end, FaultMode::Flip, lane_bit(l)});
        } else {
          for (NetId n : sys.replica_outputs[r].bits)
            overlay.faults.push_back({n, 0, end, FaultMode::Flip, lane_bit(l)});
        }
      }
    }
    const Lanes bad = overlay.empty()
                          ? Lanes{0}
                          : detail::mismatching_lanes(streamer, stim, golden, sim.compile_faults(overlay), nullptr);
    for (std::size_t l = 0; l < count; ++l) {
      const bool ok = ((bad >> l) & 1U) == 0;
      ++rep.total;
      ok ? ++rep.masked : ++rep.unmasked;
      for (std::size_t r = 0; r < kReplicas; ++r)
        if (failed[l][r]) {
          ++rep.per_replica[r].injected;
          if (ok) ++rep.per_replica[r].masked;
        }
    }
  }
  return rep;
}

// ---- analytic reliability ---------------------------------------------------------

enum class RedundancyScheme : std::uint8_t { Tmr, Majority5 };

constexpr std::string_view to_string(RedundancyScheme s) {
  return s == RedundancyScheme::Tmr ? "tmr" : "majority5mr";
}

// System reliability with a perfect voter and independent module
// reliability r: TMR 3r^2 - 2r^3, 5MR r^3 (6r^2 - 15r + 10).
inline double analytic_reliability(RedundancyScheme scheme, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error("module reliability must lie in [0, 1]");
  if (scheme == RedundancyScheme::Tmr) return r * r * (3.0 - 2.0 * r);
  return r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
}

struct ReliabilityCurve {
  RedundancyScheme scheme = RedundancyScheme::Majority5;
  std::vector<double> module_reliability;
  std::vector<double> system_reliability;
};

inline ReliabilityCurve reliability_curve(RedundancyScheme scheme, std::size_t points) {
  if (points < 2) throw Error("reliability curve needs at least two points");
  ReliabilityCurve c;
  c.scheme = scheme;
  for (std::size_t i = 0; i < points; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(points - 1);
    c.module_reliability.push_back(r);
    c.system_reliability.push_back(analytic_reliability(scheme, r));
  }
  return c;
}

// CSV: scheme,module_reliability,system_reliability
inline std::string curve_csv(const ReliabilityCurve& c) {
  std::ostringstream os;
  os << "scheme,module_reliability,system_reliability\n";
  for (std::size_t i = 0; i < c.module_reliability.size(); ++i)
    os << to_string(c.scheme) << "," << format_double(c.module_reliability[i]) << ","
       << format_double(c.system_reliability[i]) << "\n";
  return os.str();
}

inline nlohmann::ordered_json curve_to_json(const ReliabilityCurve& c) {
  return {{"scheme", to_string(c.scheme)},
          {"module_reliability", c.module_reliability},
          {"system_reliability", c.system_reliability}};
}

}  // namespace ftfir

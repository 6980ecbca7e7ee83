#pragma once

// Word-level streaming on top of the lane-parallel simulator: one sample per
// cycle into an input port group, one value per cycle out of an output port
// group, up to 64 independent streams per pass.

#include <span>
#include <unordered_map>
#include <vector>

#include "ftfir/simulate.hpp"

namespace ftfir {

class WordStreamer {
 public:
  WordStreamer(const Simulator& sim, const Word& input, const Word& output)
      : sim_(&sim), output_(output) {
    const auto& pis = sim.netlist().primary_inputs();
    std::unordered_map<std::uint32_t, std::size_t> pos;
    for (std::size_t i = 0; i < pis.size(); ++i) pos[pis[i].index] = i;
    for (NetId n : input.bits) {
      auto it = pos.find(n.index);
      if (it == pos.end()) throw Error("input word bit is not a primary input");
      input_pi_.push_back(it->second);
    }
    pi_count_ = pis.size();
  }

  // traces[l] is the sample sequence of lane l (all equal length, <= 64
  // lanes). Runs trace length + extra_cycles cycles from reset; extra cycles
  // drive zeros. Returns out[l][cycle] as signed values of the output word.
  std::vector<std::vector<std::int64_t>> run(std::span<const std::vector<std::int64_t>> traces,
                                             std::size_t extra_cycles = 0,
                                             const CompiledFaults* faults = nullptr) const {
    if (traces.empty()) return {};
    if (traces.size() > kLaneCount) throw Error("at most 64 streams per pass");
    const std::size_t len = traces[0].size();
    for (const auto& t : traces)
      if (t.size() != len) throw Error("streams in one pass must have equal length");

    const std::size_t lanes = traces.size();
    const std::size_t cycles = len + extra_cycles;
    std::vector<std::vector<std::int64_t>> out(lanes, std::vector<std::int64_t>(cycles));
    SimState state = sim_->reset_state();
    std::vector<Lanes> inputs(pi_count_, 0);
    std::vector<Lanes> values;
    std::vector<std::int64_t> column(lanes);
    std::vector<Lanes> out_bits(output_.width());

    for (std::size_t t = 0; t < cycles; ++t) {
      for (std::size_t l = 0; l < lanes; ++l) column[l] = t < len ? traces[l][t] : 0;
      const auto packed = pack_lanes(column, input_pi_.size());
      for (std::size_t i = 0; i < input_pi_.size(); ++i) inputs[input_pi_[i]] = packed[i];
      sim_->run_cycle(inputs, state, values, faults);
      for (std::size_t i = 0; i < output_.width(); ++i) out_bits[i] = values[output_[i].index];
      for (std::size_t l = 0; l < lanes; ++l)
        out[l][t] = output_.sign == Signedness::TwosComplement
                        ? unpack_signed(out_bits, l)
                        : static_cast<std::int64_t>(unpack_unsigned(out_bits, l));
    }
    return out;
  }

  // Raw per-cycle output bit lanes. A single trace is broadcast to every
  // lane so each lane can carry a different fault. With `start` the run
  // resumes from that state (its cycle indexes into the traces) instead of
  // reset; rows are returned for the simulated cycles only.
  std::vector<std::vector<Lanes>> run_bits(std::span<const std::vector<std::int64_t>> traces,
                                           std::size_t extra_cycles,
                                           const CompiledFaults* faults,
                                           const SimState* start = nullptr) const {
    const std::size_t len = traces[0].size();
    const std::size_t lanes = traces.size();
    const std::size_t cycles = len + extra_cycles;
    SimState state = start != nullptr ? *start : sim_->reset_state();
    std::vector<std::vector<Lanes>> out;
    out.reserve(cycles - std::min<std::size_t>(cycles, state.cycle));
    std::vector<Lanes> inputs(pi_count_, 0);
    std::vector<Lanes> values;
    std::vector<std::int64_t> column(lanes);
    for (std::size_t t = state.cycle; t < cycles; ++t) {
      for (std::size_t l = 0; l < lanes; ++l) column[l] = t < len ? traces[l][t] : 0;
      auto packed = pack_lanes(column, input_pi_.size());
      if (lanes == 1)
        for (auto& b : packed) b = broadcast((b & 1U) != 0);
      for (std::size_t i = 0; i < input_pi_.size(); ++i) inputs[input_pi_[i]] = packed[i];
      sim_->run_cycle(inputs, state, values, faults);
      std::vector<Lanes> row(output_.width());
      for (std::size_t i = 0; i < output_.width(); ++i) row[i] = values[output_[i].index];
      out.push_back(std::move(row));
    }
    return out;
  }

  // State after the first `cycles` cycles of a fault-free run of one trace.
  SimState advance(std::span<const std::int64_t> trace, std::size_t cycles) const {
    SimState state = sim_->reset_state();
    std::vector<Lanes> inputs(pi_count_, 0);
    std::vector<Lanes> values;
    for (std::size_t t = 0; t < cycles; ++t) {
      const std::int64_t x = t < trace.size() ? trace[t] : 0;
      for (std::size_t i = 0; i < input_pi_.size(); ++i)
        inputs[input_pi_[i]] = broadcast(((static_cast<std::uint64_t>(x) >> i) & 1U) != 0);
      sim_->run_cycle(inputs, state, values);
    }
    return state;
  }

 private:
  const Simulator* sim_;
  Word output_;
  std::vector<std::size_t> input_pi_;
  std::size_t pi_count_ = 0;
};

}  // namespace ftfir

#pragma once

// Small helpers shared by the unit tests.

#include <cstdint>
#include <vector>

#include "ftfir/circuit.hpp"
#include "ftfir/simulate.hpp"

namespace ftfir::testing {

// Evaluates a combinational circuit for up to 64 operand tuples at once.
// `ins` lists the input words in primary-input order.
class WordEval {
 public:
  WordEval(const Netlist& nl, std::vector<Word> ins, Word out)
      : sim_(nl), ins_(std::move(ins)), out_(std::move(out)) {}

  // operands[l][k] is the value of input word k in lane l.
  std::vector<std::int64_t> run(const std::vector<std::vector<std::int64_t>>& operands,
                                bool out_signed = false) const {
    const auto& pis = sim_.netlist().primary_inputs();
    std::vector<Lanes> in(pis.size(), 0);
    std::vector<std::size_t> slot(sim_.netlist().net_count(), SIZE_MAX);
    for (std::size_t i = 0; i < pis.size(); ++i) slot[pis[i].index] = i;
    for (std::size_t k = 0; k < ins_.size(); ++k) {
      std::vector<std::int64_t> lane_vals;
      for (const auto& op : operands) lane_vals.push_back(op[k]);
      auto bits = pack_lanes(lane_vals, ins_[k].width());
      for (std::size_t b = 0; b < bits.size(); ++b) in[slot[ins_[k][b].index]] = bits[b];
    }
    SimState s = sim_.reset_state();
    std::vector<Lanes> values;
    sim_.run_cycle(in, s, values);
    std::vector<Lanes> outbits;
    for (NetId n : out_.bits) outbits.push_back(values[n.index]);
    std::vector<std::int64_t> res;
    for (std::size_t l = 0; l < operands.size(); ++l)
      res.push_back(out_signed ? unpack_signed(outbits, l)
                               : static_cast<std::int64_t>(unpack_unsigned(outbits, l)));
    return res;
  }

  std::int64_t one(std::vector<std::int64_t> operands, bool out_signed = false) const {
    return run({std::move(operands)}, out_signed)[0];
  }

 private:
  Simulator sim_;
  std::vector<Word> ins_;
  Word out_;
};

}  // namespace ftfir::testing

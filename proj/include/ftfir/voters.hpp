#pragma once

// Voter builders for the five 5-modular-redundancy configurations.
//
//   Majority5      OR of the ten 3-input AND terms (exact majority-of-5)
//   Xor5 / Xnor5   two-stage cascade vote3(vote3(x1,x2,x3), x4, x5) of
//                  XOR-MUX / XNOR-MUX TMR cells (not an exact majority-of-5)
//   CascadedTmr5   vote3 over three overlapping first-level TMR planes
//   Mux41_5        Shannon expansion on (x1,x2) into a 4-to-1 multiplexer
//                  selecting AND3 / TMR / TMR / OR3 of (x3,x4,x5)

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <string_view>

#include "ftfir/circuit.hpp"

namespace ftfir {

enum class VoterKind : std::uint8_t { Majority5, Xor5, Xnor5, CascadedTmr5, Mux41_5 };

inline constexpr std::array<VoterKind, 5> kAllVoterKinds = {
    VoterKind::Majority5, VoterKind::Xor5, VoterKind::Xnor5, VoterKind::CascadedTmr5,
    VoterKind::Mux41_5};

constexpr std::string_view to_string(VoterKind k) {
  switch (k) {
    case VoterKind::Majority5: return "majority5";
    case VoterKind::Xor5: return "xor5";
    case VoterKind::Xnor5: return "xnor5";
    case VoterKind::CascadedTmr5: return "cascaded_tmr5";
    case VoterKind::Mux41_5: return "mux41_5";
  }
  return "?";
}

// Row label used in the resource comparison table.
constexpr std::string_view display_name(VoterKind k) {
  switch (k) {
    case VoterKind::Majority5: return "Conventional 5MR";
    case VoterKind::Xor5: return "5MR with TMR(XOR)";
    case VoterKind::Xnor5: return "5MR with TMR(XNOR)";
    case VoterKind::CascadedTmr5: return "5MR as Cascaded TMR";
    case VoterKind::Mux41_5: return "5MR with 4 to 1 MUX";
  }
  return "?";
}

inline VoterKind voter_kind_from_string(std::string_view s) {
  for (VoterKind k : kAllVoterKinds)
    if (to_string(k) == s) return k;
  throw Error("unknown voter kind '" + std::string(s) +
              "' (expected majority5, xor5, xnor5, cascaded_tmr5 or mux41_5)");
}

using Vote5Inputs = std::array<NetId, 5>;

// MUX2(select = a^b, when0 = a, when1 = c)
inline NetId build_vote3_xor_mux(Netlist& nl, NetId a, NetId b, NetId c) {
  CellScope cell(nl, "vote3_xor_mux");
  return nl.mux2(nl.xor_(a, b), a, c);
}

// MUX2(select = XNOR(a,b), when0 = c, when1 = a)
inline NetId build_vote3_xnor_mux(Netlist& nl, NetId a, NetId b, NetId c) {
  CellScope cell(nl, "vote3_xnor_mux");
  return nl.mux2(nl.xnor_(a, b), c, a);
}

inline NetId build_vote5_majority(Netlist& nl, const Vote5Inputs& x) {
  CellScope cell(nl, "vote5_majority");
  NetId acc;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      for (int k = j + 1; k < 5; ++k) {
        NetId term = nl.and_(nl.and_(x[i], x[j]), x[k]);
        acc = acc.valid() ? nl.or_(acc, term) : term;
      }
  return acc;
}

inline NetId build_vote5_xor_mux(Netlist& nl, const Vote5Inputs& x) {
  CellScope cell(nl, "vote5_xor_mux");
  NetId first = build_vote3_xor_mux(nl, x[0], x[1], x[2]);
  return build_vote3_xor_mux(nl, first, x[3], x[4]);
}

inline NetId build_vote5_xnor_mux(Netlist& nl, const Vote5Inputs& x) {
  CellScope cell(nl, "vote5_xnor_mux");
  NetId first = build_vote3_xnor_mux(nl, x[0], x[1], x[2]);
  return build_vote3_xnor_mux(nl, first, x[3], x[4]);
}

inline NetId build_vote5_cascaded_tmr(Netlist& nl, const Vote5Inputs& x) {
  CellScope cell(nl, "vote5_cascaded_tmr");
  NetId p1 = build_vote3_xor_mux(nl, x[0], x[1], x[2]);
  NetId p2 = build_vote3_xor_mux(nl, x[1], x[2], x[3]);
  NetId p3 = build_vote3_xor_mux(nl, x[2], x[3], x[4]);
  return build_vote3_xor_mux(nl, p1, p2, p3);
}

inline NetId build_vote5_mux41(Netlist& nl, const Vote5Inputs& x) {
  CellScope cell(nl, "vote5_mux41");
  NetId all3 = nl.and_(nl.and_(x[2], x[3]), x[4]);
  NetId any3 = nl.or_(nl.or_(x[2], x[3]), x[4]);
  NetId tmr = build_vote3_xor_mux(nl, x[2], x[3], x[4]);
  // 4-to-1 multiplexer on (x1, x2) from three MUX2
  NetId when_x1_0 = nl.mux2(x[1], all3, tmr);
  NetId when_x1_1 = nl.mux2(x[1], tmr, any3);
  return nl.mux2(x[0], when_x1_0, when_x1_1);
}

inline NetId build_vote5(Netlist& nl, VoterKind kind, const Vote5Inputs& x) {
  switch (kind) {
    case VoterKind::Majority5: return build_vote5_majority(nl, x);
    case VoterKind::Xor5: return build_vote5_xor_mux(nl, x);
    case VoterKind::Xnor5: return build_vote5_xnor_mux(nl, x);
    case VoterKind::CascadedTmr5: return build_vote5_cascaded_tmr(nl, x);
    case VoterKind::Mux41_5: return build_vote5_mux41(nl, x);
  }
  throw Error("invalid voter kind");
}

// Bitwise vote over five equal-width words.
inline Word build_word_voter(Netlist& nl, VoterKind kind, std::span<const Word, 5> words) {
  const std::size_t w = words[0].width();
  for (const Word& word : words)
    if (word.width() != w) throw Error("word voter inputs must have equal widths");
  CellScope cell(nl, "word_voter");
  Word out;
  out.sign = words[0].sign;
  for (std::size_t i = 0; i < w; ++i)
    out.bits.push_back(build_vote5(nl, kind, {words[0][i], words[1][i], words[2][i],
                                              words[3][i], words[4][i]}));
  return out;
}

// Third order statistic of five values.
template <typename T>
T median5(std::array<T, 5> v) {
  std::nth_element(v.begin(), v.begin() + 2, v.end());
  return v[2];
}

}  // namespace ftfir

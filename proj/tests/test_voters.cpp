#include <gtest/gtest.h>

#include <algorithm>
#include <bitset>
#include <map>
#include <random>

#include "ftfir/resources.hpp"
#include "ftfir/simulate.hpp"
#include "ftfir/voters.hpp"

using namespace ftfir;

namespace {

bool maj3(bool a, bool b, bool c) { return int(a) + int(b) + int(c) >= 2; }
bool maj5(const std::array<bool, 5>& x) { return std::count(x.begin(), x.end(), true) >= 3; }

std::vector<bool> bits(const char* s) {
  std::vector<bool> v;
  for (; *s; ++s) v.push_back(*s == '1');
  return v;
}

std::array<bool, 5> pattern(int v) {
  std::array<bool, 5> x{};
  for (int i = 0; i < 5; ++i) x[i] = ((v >> i) & 1) != 0;
  return x;
}

// Reference behaviour of each structure, written directly from its description.
bool reference(VoterKind k, const std::array<bool, 5>& x) {
  switch (k) {
    case VoterKind::Majority5:
    case VoterKind::Mux41_5: return maj5(x);
    case VoterKind::Xor5:
    case VoterKind::Xnor5: return maj3(maj3(x[0], x[1], x[2]), x[3], x[4]);
    case VoterKind::CascadedTmr5:
      return maj3(maj3(x[0], x[1], x[2]), maj3(x[1], x[2], x[3]), maj3(x[2], x[3], x[4]));
  }
  return false;
}

struct Voter5 {
  Netlist nl;
  NetId out;
};

Voter5 build(VoterKind k) {
  Voter5 v;
  Vote5Inputs x;
  for (auto& n : x) n = v.nl.add_input();
  v.out = build_vote5(v.nl, k, x);
  v.nl.mark_output(v.out);
  return v;
}

// All 32 patterns in one lane-parallel pass; bit v of the result is the output for pattern v.
std::uint32_t truth_table(const Voter5& v) {
  Simulator sim(v.nl);
  std::vector<Lanes> in(5, 0);
  for (int p = 0; p < 32; ++p)
    for (int i = 0; i < 5; ++i)
      if ((p >> i) & 1) in[i] |= lane_bit(p);
  SimState s = sim.reset_state();
  std::vector<Lanes> values;
  sim.run_cycle(in, s, values);
  return static_cast<std::uint32_t>(values[v.out.index]);
}

// Pairs of faulty inputs that the structure masks for every correct value
// and every combination of faulty values (exhaustive over 2^5 patterns).
std::vector<std::pair<int, int>> masked_pairs(VoterKind k) {
  Voter5 v = build(k);
  const std::uint32_t tt = truth_table(v);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      bool ok = true;
      for (int correct = 0; correct < 2 && ok; ++correct)
        for (int fi = 0; fi < 2 && ok; ++fi)
          for (int fj = 0; fj < 2 && ok; ++fj) {
            int p = correct ? 31 : 0;
            p = (p & ~(1 << i)) | (fi << i);
            p = (p & ~(1 << j)) | (fj << j);
            ok = (((tt >> p) & 1U) != 0) == (correct != 0);
          }
      if (ok) out.emplace_back(i + 1, j + 1);
    }
  return out;
}

}  // namespace

TEST(Vote3, XorMuxExamples) {
  for (const char* row : {"1101", "0111", "0010", "1000"}) {
    auto r = bits(row);
    Netlist nl;
    NetId x = nl.add_input(), y = nl.add_input(), z = nl.add_input();
    NetId o = build_vote3_xor_mux(nl, x, y, z);
    EXPECT_EQ(evaluate(nl, {r[0], r[1], r[2]})[o.index], r[3]);
  }
}

TEST(Vote3, XnorMuxExamples) {
  for (const char* row : {"1011", "0010", "1101", "0100"}) {
    auto r = bits(row);
    Netlist nl;
    NetId x = nl.add_input(), y = nl.add_input(), z = nl.add_input();
    NetId o = build_vote3_xnor_mux(nl, x, y, z);
    EXPECT_EQ(evaluate(nl, {r[0], r[1], r[2]})[o.index], r[3]);
  }
}

TEST(Vote3, BothAreMajorityOfThree) {
  for (int v = 0; v < 8; ++v) {
    Netlist nl;
    NetId a = nl.add_input(), b = nl.add_input(), c = nl.add_input();
    NetId o1 = build_vote3_xor_mux(nl, a, b, c), o2 = build_vote3_xnor_mux(nl, a, b, c);
    auto out = evaluate(nl, {(v & 1) != 0, (v & 2) != 0, (v & 4) != 0});
    EXPECT_EQ(out[o1.index], maj3(v & 1, v & 2, v & 4));
    EXPECT_EQ(out[o2.index], maj3(v & 1, v & 2, v & 4));
  }
}

TEST(Vote3, GateCounts) {
  Netlist nl;
  NetId a = nl.add_input(), b = nl.add_input(), c = nl.add_input();
  build_vote3_xor_mux(nl, a, b, c);
  build_vote3_xnor_mux(nl, a, b, c);
  ResourceCount rc = census(nl);
  EXPECT_EQ(rc.gates(GateKind::Xor), 1U);
  EXPECT_EQ(rc.gates(GateKind::Xnor), 1U);
  EXPECT_EQ(rc.mux2, 2U);
}

TEST(Vote5, TruthTablesMatchReference) {
  for (VoterKind k : kAllVoterKinds) {
    const std::uint32_t tt = truth_table(build(k));
    for (int p = 0; p < 32; ++p)
      EXPECT_EQ(((tt >> p) & 1U) != 0, reference(k, pattern(p))) << to_string(k) << " pattern " << p;
  }
}

TEST(Vote5, ScalarExamples) {
  {
    Voter5 v = build(VoterKind::Majority5);
    EXPECT_TRUE(evaluate(v.nl, bits("11100"))[v.out.index]);
    EXPECT_FALSE(evaluate(v.nl, bits("11000"))[v.out.index]);
  }
  {
    // the cascade is not a majority-of-five here
    Voter5 v = build(VoterKind::Xor5);
    EXPECT_FALSE(evaluate(v.nl, bits("11100"))[v.out.index]);
  }
  {
    Voter5 v = build(VoterKind::Mux41_5);
    EXPECT_TRUE(evaluate(v.nl, bits("00111"))[v.out.index]);
    EXPECT_FALSE(evaluate(v.nl, bits("11000"))[v.out.index]);
  }
}

TEST(Vote5, AgreementWithMajorityOfFive) {
  // frozen from the enumeration below
  const std::map<VoterKind, int> expected{{VoterKind::Majority5, 32}, {VoterKind::Xor5, 30},
                                          {VoterKind::Xnor5, 30}, {VoterKind::CascadedTmr5, 28},
                                          {VoterKind::Mux41_5, 32}};
  for (VoterKind k : kAllVoterKinds) {
    const std::uint32_t tt = truth_table(build(k));
    int agree = 0;
    for (int p = 0; p < 32; ++p) agree += (((tt >> p) & 1U) != 0) == maj5(pattern(p));
    EXPECT_EQ(agree, expected.at(k)) << to_string(k);
  }
}

TEST(Vote5, MajorityIsSymmetric) {
  for (VoterKind k : {VoterKind::Majority5, VoterKind::Mux41_5}) {
    const std::uint32_t tt = truth_table(build(k));
    for (int p = 0; p < 32; ++p) {
      std::array<int, 5> perm{0, 1, 2, 3, 4};
      do {
        int q = 0;
        for (int i = 0; i < 5; ++i) q |= ((p >> perm[i]) & 1) << i;
        ASSERT_EQ((tt >> p) & 1U, (tt >> q) & 1U);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST(Vote5, UnanimousInputsPassThrough) {
  for (VoterKind k : kAllVoterKinds) {
    const std::uint32_t tt = truth_table(build(k));
    EXPECT_EQ(tt & 1U, 0U);
    EXPECT_EQ((tt >> 31) & 1U, 1U);
  }
}

TEST(Vote5, SingleDisagreementAlwaysMasked) {
  for (VoterKind k : kAllVoterKinds) {
    const std::uint32_t tt = truth_table(build(k));
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ((tt >> (1 << i)) & 1U, 0U) << to_string(k);
      EXPECT_EQ((tt >> (31 ^ (1 << i))) & 1U, 1U) << to_string(k);
    }
  }
}

TEST(Vote5, DoubleFaultPairs) {
  using Pairs = std::vector<std::pair<int, int>>;
  Pairs all;
  for (int i = 1; i <= 5; ++i)
    for (int j = i + 1; j <= 5; ++j) all.emplace_back(i, j);
  EXPECT_EQ(masked_pairs(VoterKind::Majority5), all);
  EXPECT_EQ(masked_pairs(VoterKind::Mux41_5), all);

  Pairs no45 = all;
  no45.erase(std::find(no45.begin(), no45.end(), std::make_pair(4, 5)));
  EXPECT_EQ(masked_pairs(VoterKind::Xor5), no45);
  EXPECT_EQ(masked_pairs(VoterKind::Xnor5), no45);

  Pairs cascade = all;
  for (auto bad : {std::make_pair(2, 3), std::make_pair(3, 4)})
    cascade.erase(std::find(cascade.begin(), cascade.end(), bad));
  EXPECT_EQ(masked_pairs(VoterKind::CascadedTmr5), cascade);
}

TEST(Vote5, MajorityGateCount) {
  Voter5 v = build(VoterKind::Majority5);
  ResourceCount rc = census(v.nl);
  EXPECT_EQ(rc.gates(GateKind::And), 20U);
  EXPECT_EQ(rc.gates(GateKind::Or), 9U);
}

TEST(Vote5, Mux41UsesThreeMux2ForSelection) {
  Voter5 v = build(VoterKind::Mux41_5);
  EXPECT_EQ(census(v.nl).mux2, 4U);  // three for the 4:1 selection, one inside the TMR cell
}

TEST(Vote5, KindNamesRoundTrip) {
  for (VoterKind k : kAllVoterKinds) EXPECT_EQ(voter_kind_from_string(to_string(k)), k);
  EXPECT_THROW(voter_kind_from_string("bogus"), Error);
}

TEST(WordVoter, VotesEachBit) {
  Netlist nl;
  std::array<Word, 5> w;
  for (int i = 0; i < 5; ++i) w[i] = nl.add_input_word("w" + std::to_string(i), 8);
  Word y = build_word_voter(nl, VoterKind::Majority5, w);
  nl.add_output_word("y", y);
  const std::array<int, 5> vals{0x0F, 0x0F, 0x0F, 0xF0, 0xAA};
  std::vector<bool> in;
  for (int v : vals)
    for (int b = 0; b < 8; ++b) in.push_back(((v >> b) & 1) != 0);
  auto out = evaluate(nl, in);
  int got = 0;
  for (int b = 0; b < 8; ++b) got |= int(out[y[b].index]) << b;
  EXPECT_EQ(got, 0x0F);
  EXPECT_EQ(census(nl).cells("vote5_majority"), 8U);
}

TEST(WordVoter, MismatchedWidthsRejected) {
  Netlist nl;
  std::array<Word, 5> w;
  for (int i = 0; i < 5; ++i) w[i] = nl.add_input_word("w" + std::to_string(i), i == 4 ? 7 : 8);
  EXPECT_THROW(build_word_voter(nl, VoterKind::Xor5, w), Error);
}

TEST(Median5, Examples) {
  EXPECT_EQ(median5<int>({5, 1, 4, 2, 3}), 3);
  EXPECT_EQ(median5<int>({-7, 100, 100, 100, -7}), 100);
  EXPECT_EQ(median5<std::int64_t>({0, 0, 0, 1, 1}), 0);
}

TEST(Vote5, KnownPatterns) {
  {
    Voter5 v = build(VoterKind::Mux41_5);
    EXPECT_TRUE(evaluate(v.nl, bits("11001"))[v.out.index]);
    EXPECT_FALSE(evaluate(v.nl, bits("00110"))[v.out.index]);
  }
  {
    Voter5 v = build(VoterKind::CascadedTmr5);
    EXPECT_TRUE(evaluate(v.nl, bits("11100"))[v.out.index]);
  }
  {
    Voter5 v = build(VoterKind::Xnor5);
    EXPECT_TRUE(evaluate(v.nl, bits("11111"))[v.out.index]);
  }
}

TEST(Vote5, XorAndXnorCascadesAreEquivalent) {
  EXPECT_EQ(truth_table(build(VoterKind::Xor5)), truth_table(build(VoterKind::Xnor5)));
  EXPECT_EQ(truth_table(build(VoterKind::Majority5)), truth_table(build(VoterKind::Mux41_5)));
}

TEST(Vote5, XorXnorCensusDiffersOnlyInGateFlavour) {
  ResourceCount a = census(build(VoterKind::Xor5).nl), b = census(build(VoterKind::Xnor5).nl);
  EXPECT_EQ(a.gates(GateKind::Xor), b.gates(GateKind::Xnor));
  EXPECT_EQ(a.gates(GateKind::Xnor), b.gates(GateKind::Xor));
  EXPECT_EQ(a.mux2, b.mux2);
  EXPECT_EQ(a.total_gates, b.total_gates);
}

TEST(Vote5, CascadesArePositionallyAsymmetric) {
  for (VoterKind k : {VoterKind::Xor5, VoterKind::Xnor5, VoterKind::CascadedTmr5}) {
    const std::uint32_t tt = truth_table(build(k));
    bool asymmetric = false;
    for (int p = 0; p < 32 && !asymmetric; ++p) {
      std::array<int, 5> perm{0, 1, 2, 3, 4};
      do {
        int q = 0;
        for (int i = 0; i < 5; ++i) q |= ((p >> perm[i]) & 1) << i;
        if (((tt >> p) & 1U) != ((tt >> q) & 1U)) asymmetric = true;
      } while (!asymmetric && std::next_permutation(perm.begin(), perm.end()));
    }
    EXPECT_TRUE(asymmetric) << to_string(k);
  }
}

TEST(WordVoter, KnownWords) {
  auto vote = [](VoterKind k, std::array<int, 5> vals) {
    Netlist nl;
    std::array<Word, 5> w;
    for (int i = 0; i < 5; ++i) w[i] = nl.add_input_word("w" + std::to_string(i), 4);
    Word y = build_word_voter(nl, k, w);
    std::vector<bool> in;
    for (int v : vals)
      for (int b = 0; b < 4; ++b) in.push_back(((v >> b) & 1) != 0);
    auto out = evaluate(nl, in);
    int got = 0;
    for (int b = 0; b < 4; ++b) got |= int(out[y[b].index]) << b;
    return got;
  };
  for (VoterKind k : kAllVoterKinds) EXPECT_EQ(vote(k, {11, 11, 11, 11, 11}), 11);
  EXPECT_EQ(vote(VoterKind::Majority5, {3, 3, 3, 9, 9}), 3);
  // bitwise majority oracle
  const std::array<int, 5> mixed{3, 5, 6, 0, 7};
  int want = 0;
  for (int b = 0; b < 4; ++b) {
    int ones = 0;
    for (int v : mixed) ones += (v >> b) & 1;
    want |= int(ones >= 3) << b;
  }
  EXPECT_EQ(vote(VoterKind::Majority5, mixed), want);
}

TEST(Median5, MoreExamples) {
  EXPECT_EQ(median5<int>({1, 2, 3, 4, 5}), 3);
  EXPECT_EQ(median5<int>({7, 7, 7, 0, 0}), 7);
}

TEST(Median5, MatchesSortOracleAndIsBounded) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10000; ++i) {
    std::array<std::int64_t, 5> v;
    for (auto& x : v) x = static_cast<std::int64_t>(rng() % 2001) - 1000;
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto m = median5(v);
    ASSERT_EQ(m, sorted[2]);
    ASSERT_GE(m, sorted.front());
    ASSERT_LE(m, sorted.back());
    std::shuffle(v.begin(), v.end(), rng);
    ASSERT_EQ(median5(v), m);
  }
}

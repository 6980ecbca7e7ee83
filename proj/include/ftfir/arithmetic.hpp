#pragma once

// Arithmetic cell builders: full adders, ripple-carry adders, carry-save
// adders and trees, the 4x4 Urdhva-Tiryagbhyam (Vedic) multiplier and its
// recursive 8x8 / 16x16 compositions, and a signed 16x16 multiplier.
//
// Cell tags used by the resource census:
//   full_adder      2 XOR, 2 AND, 1 OR
//   half_adder      1 XOR, 1 AND
//   sum_bit         2 XOR (top column of a truncated carry-save stage)
//   ripple_adder    containing rca_bit (full-adder recipe), rca_half
//                   (half-adder recipe) and rca_sum (carry-out dropped) slices
//   csa, csa_tree, vedic4x4, special_adder4, vedic<n>x<n>, abs,
//   signed_multiplier

#include <bit>
#include <optional>
#include <span>
#include <vector>

#include "ftfir/circuit.hpp"

namespace ftfir {

struct AdderBit {
  NetId sum;
  NetId carry;
};

// Bit i of `carry` has weight 2^i (already shifted).
struct CsaPair {
  Word sum;
  Word carry;
};

inline AdderBit build_full_adder(Netlist& nl, NetId a, NetId b, NetId cin) {
  CellScope cell(nl, "full_adder");
  NetId p = nl.xor_(a, b);
  NetId sum = nl.xor_(p, cin);
  NetId g = nl.and_(a, b);
  NetId t = nl.and_(p, cin);
  return {sum, nl.or_(g, t)};
}

inline AdderBit build_half_adder(Netlist& nl, NetId a, NetId b) {
  CellScope cell(nl, "half_adder");
  return {nl.xor_(a, b), nl.and_(a, b)};
}

namespace detail {

inline std::size_t ceil_log2(std::size_t k) {
  return k <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(k - 1));
}

inline NetId bit_or_zero(Netlist& nl, const Word& w, std::size_t i) {
  return i < w.width() ? w[i] : nl.constant(false);
}

// Adds up to three bits of one column, skipping constant-zero inputs.
// With want_carry == false the carry is never built (truncated top column).
inline AdderBit compress_column(Netlist& nl, std::span<const NetId> column, bool want_carry,
                                const char* full_tag, const char* half_tag, const char* sum_tag) {
  std::vector<NetId> live;
  for (NetId n : column)
    if (n.valid() && !nl.is_zero(n)) live.push_back(n);

  const NetId zero = nl.constant(false);
  switch (live.size()) {
    case 0: return {zero, zero};
    case 1: return {live[0], zero};
    case 2:
      if (!want_carry) {
        CellScope cell(nl, sum_tag);
        return {nl.xor_(live[0], live[1]), zero};
      } else {
        CellScope cell(nl, half_tag);
        return {nl.xor_(live[0], live[1]), nl.and_(live[0], live[1])};
      }
    default:
      if (!want_carry) {
        CellScope cell(nl, sum_tag);
        return {nl.xor_(nl.xor_(live[0], live[1]), live[2]), zero};
      } else {
        CellScope cell(nl, full_tag);
        NetId p = nl.xor_(live[0], live[1]);
        NetId sum = nl.xor_(p, live[2]);
        NetId carry = nl.or_(nl.and_(live[0], live[1]), nl.and_(p, live[2]));
        return {sum, carry};
      }
  }
}

// 3:2 compression of three equal-width words modulo 2^width.
inline CsaPair csa_modular(Netlist& nl, const Word& a, const Word& b, const Word& c,
                           std::size_t width) {
  CsaPair out;
  out.carry.bits.push_back(nl.constant(false));
  for (std::size_t i = 0; i < width; ++i) {
    const bool top = i + 1 == width;
    const NetId col[3] = {bit_or_zero(nl, a, i), bit_or_zero(nl, b, i), bit_or_zero(nl, c, i)};
    AdderBit r = compress_column(nl, col, !top, "full_adder", "half_adder", "sum_bit");
    out.sum.bits.push_back(r.sum);
    if (!top) out.carry.bits.push_back(r.carry);
  }
  return out;
}

}  // namespace detail

// Ripple-carry adder; operands are zero-extended, the result is `width` bits
// (carries beyond it are dropped).
inline Word build_ripple_adder(Netlist& nl, const Word& a, const Word& b, std::size_t width,
                               std::optional<NetId> cin = std::nullopt) {
  CellScope cell(nl, "ripple_adder");
  Word out;
  NetId carry = cin.value_or(NetId{});
  for (std::size_t i = 0; i < width; ++i) {
    const bool top = i + 1 == width;
    const NetId col[3] = {detail::bit_or_zero(nl, a, i), detail::bit_or_zero(nl, b, i), carry};
    AdderBit r = detail::compress_column(nl, col, !top, "rca_bit", "rca_half", "rca_sum");
    out.bits.push_back(r.sum);
    carry = r.carry;
  }
  return out;
}

inline CsaPair build_csa(Netlist& nl, const Word& a, const Word& b, const Word& c) {
  if (a.width() != b.width() || a.width() != c.width())
    throw Error("carry-save adder operands must have equal widths");
  if (a.width() == 0) throw Error("carry-save adder operands must be nonempty");
  CellScope cell(nl, "csa");
  CsaPair out;
  out.carry.bits.push_back(nl.constant(false));
  for (std::size_t i = 0; i < a.width(); ++i) {
    const NetId col[3] = {a[i], b[i], c[i]};
    AdderBit r = detail::compress_column(nl, col, true, "full_adder", "half_adder", "sum_bit");
    out.sum.bits.push_back(r.sum);
    out.carry.bits.push_back(r.carry);
  }
  return out;
}

// Sum of operands modulo 2^width: repeated 3:2 compression, then one ripple
// adder. Operands are extended to `width` according to their signedness.
inline Word build_sum_tree(Netlist& nl, std::span<const Word> operands, std::size_t width) {
  if (operands.empty()) throw Error("sum tree needs at least one operand");
  CellScope cell(nl, "csa_tree");
  std::vector<Word> level;
  for (const Word& w : operands) level.push_back(extend(nl, w, width));

  while (level.size() > 2) {
    std::vector<Word> next;
    std::size_t i = 0;
    for (; i + 3 <= level.size(); i += 3) {
      CsaPair p = detail::csa_modular(nl, level[i], level[i + 1], level[i + 2], width);
      next.push_back(std::move(p.sum));
      next.push_back(std::move(p.carry));
    }
    for (; i < level.size(); ++i) next.push_back(std::move(level[i]));
    level = std::move(next);
  }
  Word result = level.size() == 1 ? level[0] : build_ripple_adder(nl, level[0], level[1], width);
  result.sign = operands[0].sign;
  return result;
}

// Unsigned sum of equal-width operands; width grows by ceil(log2 k).
inline Word build_csa_tree(Netlist& nl, std::span<const Word> operands) {
  if (operands.empty()) throw Error("carry-save tree needs at least one operand");
  const std::size_t w = operands[0].width();
  for (const Word& op : operands)
    if (op.width() != w) throw Error("carry-save tree operands must have equal widths");
  std::vector<Word> unsigned_ops(operands.begin(), operands.end());
  for (Word& op : unsigned_ops) op.sign = Signedness::Unsigned;
  return build_sum_tree(nl, unsigned_ops, w + detail::ceil_log2(operands.size()));
}

// 4x4 Urdhva-Tiryagbhyam multiplier: sixteen crosswise partial products,
// column sums with nine full-adder cells, and a 4-bit ripple adder for
// product bits 4..7.
inline Word build_vedic_4x4(Netlist& nl, const Word& a, const Word& b) {
  if (a.width() != 4 || b.width() != 4) throw Error("Vedic 4x4 multiplier needs 4-bit operands");
  CellScope cell(nl, "vedic4x4");
  NetId p[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) p[i][j] = nl.and_(a[i], b[j]);
  const NetId zero = nl.constant(false);

  Word out;
  out.bits.resize(8);
  out.bits[0] = p[0][0];
  // column 1
  AdderBit fa1 = build_full_adder(nl, p[0][1], p[1][0], zero);
  out.bits[1] = fa1.sum;
  // column 2
  AdderBit fa2 = build_full_adder(nl, p[0][2], p[1][1], p[2][0]);
  AdderBit fa3 = build_full_adder(nl, fa2.sum, fa1.carry, zero);
  out.bits[2] = fa3.sum;
  // column 3
  AdderBit fa4 = build_full_adder(nl, p[0][3], p[1][2], p[2][1]);
  AdderBit fa5 = build_full_adder(nl, p[3][0], fa2.carry, fa3.carry);
  AdderBit fa6 = build_full_adder(nl, fa4.sum, fa5.sum, zero);
  out.bits[3] = fa6.sum;
  // columns 4 and 5 reduced to two rows
  AdderBit fa7 = build_full_adder(nl, p[1][3], p[2][2], p[3][1]);
  AdderBit fa8 = build_full_adder(nl, fa4.carry, fa5.carry, fa6.carry);
  AdderBit fa9 = build_full_adder(nl, p[2][3], p[3][2], fa7.carry);

  Word hi_a, hi_b;
  hi_a.bits = {fa7.sum, fa9.sum, p[3][3]};
  hi_b.bits = {fa8.sum, fa8.carry, fa9.carry};
  Word hi;
  {
    CellScope special(nl, "special_adder4");
    hi = build_ripple_adder(nl, hi_a, hi_b, 4);
  }
  for (int i = 0; i < 4; ++i) out.bits[4 + i] = hi[i];
  return out;
}

// n x n unsigned Vedic multiplier (n in {8, 16}) from four n/2 multipliers.
inline Word build_vedic_recursive(Netlist& nl, const Word& a, const Word& b) {
  const std::size_t n = a.width();
  if (b.width() != n) throw Error("Vedic multiplier operands must have equal widths");
  if (n == 4) return build_vedic_4x4(nl, a, b);
  if (n != 8 && n != 16)
    throw Error("unsupported Vedic multiplier width " + std::to_string(n) + " (need 4, 8 or 16)");

  CellScope cell(nl, "vedic" + std::to_string(n) + "x" + std::to_string(n));
  const std::size_t h = n / 2;
  Word al = slice(a, 0, h), ah = slice(a, h, h);
  Word bl = slice(b, 0, h), bh = slice(b, h, h);
  Word ll = build_vedic_recursive(nl, al, bl);
  Word lh = build_vedic_recursive(nl, al, bh);
  Word hl = build_vedic_recursive(nl, ah, bl);
  Word hh = build_vedic_recursive(nl, ah, bh);

  const NetId zero = nl.constant(false);
  Word outer, mid1, mid2;
  outer.bits = ll.bits;
  outer.bits.insert(outer.bits.end(), hh.bits.begin(), hh.bits.end());
  mid1.bits.assign(h, zero);
  mid1.bits.insert(mid1.bits.end(), lh.bits.begin(), lh.bits.end());
  mid2.bits.assign(h, zero);
  mid2.bits.insert(mid2.bits.end(), hl.bits.begin(), hl.bits.end());

  CsaPair partial = detail::csa_modular(nl, outer, mid1, mid2, 2 * n);
  return build_ripple_adder(nl, partial.sum, partial.carry, 2 * n);
}

// Two's-complement negation of x when `negate` is 1, modulo 2^width.
inline Word conditional_negate(Netlist& nl, const Word& x, NetId negate, std::size_t width) {
  Word flipped;
  for (std::size_t i = 0; i < width; ++i) flipped.bits.push_back(nl.xor_(detail::bit_or_zero(nl, x, i), negate));
  return build_ripple_adder(nl, flipped, Word{}, width, negate);
}

// Signed product on the unsigned Vedic core: magnitudes in, sign fixed up out.
inline Word signed_multiply(Netlist& nl, const Word& a, const Word& b) {
  const std::size_t n = a.width();
  if (b.width() != n || (n != 4 && n != 8 && n != 16))
    throw Error("signed multiplier needs equal 4-, 8- or 16-bit operands");
  CellScope cell(nl, "signed_multiplier");
  NetId sa = a.msb(), sb = b.msb();
  Word mag_a, mag_b;
  {
    CellScope abs(nl, "abs");
    mag_a = conditional_negate(nl, a, sa, n);
  }
  {
    CellScope abs(nl, "abs");
    mag_b = conditional_negate(nl, b, sb, n);
  }
  Word product = build_vedic_recursive(nl, mag_a, mag_b);
  NetId sign = nl.xor_(sa, sb);
  Word out = conditional_negate(nl, product, sign, 2 * n);
  out.sign = Signedness::TwosComplement;
  return out;
}

}  // namespace ftfir

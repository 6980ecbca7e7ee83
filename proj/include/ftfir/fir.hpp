#pragma once

// Windowed-sinc lowpass design, 16-bit coefficient quantization, the
// gate-level FIR datapath (register delay line -> one signed Vedic multiplier
// per tap -> carry-save reduction -> ripple adder -> output register) and the
// exact integer golden model it must match.

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftfir/arithmetic.hpp"
#include "ftfir/circuit.hpp"
#include "ftfir/simulate.hpp"
#include "ftfir/stream.hpp"

namespace ftfir {

inline constexpr std::size_t kSampleBits = 16;
inline constexpr std::int64_t kSampleMax = 32767;
inline constexpr std::int64_t kSampleMin = -32768;

enum class WindowKind : std::uint8_t { Rectangular, Hamming, Kaiser };

constexpr std::string_view to_string(WindowKind w) {
  switch (w) {
    case WindowKind::Rectangular: return "rectangular";
    case WindowKind::Hamming: return "hamming";
    case WindowKind::Kaiser: return "kaiser";
  }
  return "?";
}

inline WindowKind window_kind_from_string(std::string_view s) {
  if (s == "rectangular") return WindowKind::Rectangular;
  if (s == "hamming") return WindowKind::Hamming;
  if (s == "kaiser") return WindowKind::Kaiser;
  throw Error("unknown window '" + std::string(s) + "' (expected hamming, kaiser or rectangular)");
}

struct FilterSpec {
  int num_taps = 51;
  double cutoff_hz = 45.0;
  double sample_rate_hz = 360.0;
  WindowKind window = WindowKind::Hamming;
  double kaiser_beta = 5.0;
  int frac_bits = 15;

  void validate() const {
    if (num_taps < 1 || num_taps % 2 == 0)
      throw Error("tap count must be a positive odd integer, got " + std::to_string(num_taps));
    if (!(sample_rate_hz > 0.0)) throw Error("sample rate must be positive");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0))
      throw Error("cutoff must lie in (0, sample_rate/2)");
    if (frac_bits < 0 || frac_bits > 15) throw Error("fractional bits must be in [0, 15]");
    if (window == WindowKind::Kaiser && !(kaiser_beta >= 0.0))
      throw Error("Kaiser beta must be nonnegative");
  }
};

struct QuantizedCoeffs {
  std::vector<double> real;
  std::vector<std::int64_t> fixed;  // each within the signed 16-bit range
  int frac_bits = 15;

  std::size_t size() const { return fixed.size(); }
};

inline double window_value(WindowKind kind, double beta, int n, int num_taps) {
  if (num_taps == 1) return 1.0;
  const double m = num_taps - 1;
  switch (kind) {
    case WindowKind::Rectangular: return 1.0;
    case WindowKind::Hamming: return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / m);
    case WindowKind::Kaiser: {
      const double r = 2.0 * n / m - 1.0;
      return std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
             std::cyl_bessel_i(0.0, beta);
    }
  }
  return 1.0;
}

// Real lowpass taps, exactly symmetric, summing to 1.
inline std::vector<double> design_lowpass_real(const FilterSpec& spec) {
  spec.validate();
  const int n = spec.num_taps;
  const int mid = (n - 1) / 2;
  const double fc = 2.0 * spec.cutoff_hz / spec.sample_rate_hz;
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int k = 0; k <= mid; ++k) {
    const double x = fc * (k - mid);
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    h[k] = fc * sinc * window_value(spec.window, spec.kaiser_beta, k, n);
    h[n - 1 - k] = h[k];
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;
  return h;
}

// Round half away from zero to 16-bit fixed point. Magnitudes must stay
// within 32767 (the symmetric signed range). Symmetric inputs are quantized
// on one half and mirrored.
inline QuantizedCoeffs quantize(std::span<const double> coeffs, int frac_bits) {
  if (frac_bits < 0 || frac_bits > 15) throw Error("fractional bits must be in [0, 15]");
  const std::size_t n = coeffs.size();
  bool symmetric = true;
  for (std::size_t i = 0; i < n / 2; ++i) symmetric = symmetric && coeffs[i] == coeffs[n - 1 - i];

  QuantizedCoeffs q;
  q.frac_bits = frac_bits;
  q.real.assign(coeffs.begin(), coeffs.end());
  q.fixed.resize(n);
  const double scale = std::ldexp(1.0, frac_bits);
  const std::size_t todo = symmetric ? (n + 1) / 2 : n;
  for (std::size_t i = 0; i < todo; ++i) {
    const double v = std::round(coeffs[i] * scale);
    if (!std::isfinite(v) || std::fabs(v) > static_cast<double>(kSampleMax)) {
      std::ostringstream os;
      os << "coefficient " << i << " (" << coeffs[i] << ") overflows 16-bit fixed point with "
         << frac_bits << " fractional bits";
      throw Error(os.str());
    }
    q.fixed[i] = static_cast<std::int64_t>(v);
    if (symmetric) q.fixed[n - 1 - i] = q.fixed[i];
  }
  return q;
}

inline QuantizedCoeffs design_lowpass(const FilterSpec& spec) {
  auto real = design_lowpass_real(spec);
  return quantize(real, spec.frac_bits);
}

// ---- golden model -------------------------------------------------------------

// y[n] = sum_k c[k] * x[n-k], x[<0] = 0, full precision.
inline std::vector<std::int64_t> filter_behavioral(const QuantizedCoeffs& coeffs,
                                                   std::span<const std::int64_t> samples) {
  std::vector<std::int64_t> y(samples.size(), 0);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    std::int64_t acc = 0;
    for (std::size_t k = 0; k < coeffs.size() && k <= n; ++k) acc += coeffs.fixed[k] * samples[n - k];
    y[n] = acc;
  }
  return y;
}

// Arithmetic shift right by frac_bits (truncation toward negative infinity).
inline std::int64_t downscale(std::int64_t y, int frac_bits) { return y >> frac_bits; }

// ---- gate-level datapath ----------------------------------------------------------

struct FirDatapath {
  Netlist netlist;
  Word input;
  Word output;
  QuantizedCoeffs coeffs;
  // Cycles between a sample entering and its output appearing: one for the
  // first delay-line register, one for the output register.
  std::size_t latency = 2;

  std::size_t num_taps() const { return coeffs.size(); }
  std::size_t output_width() const { return output.width(); }
};

inline std::size_t fir_output_width(std::size_t num_taps) {
  return 32 + detail::ceil_log2(num_taps);
}

inline Word register_word(Netlist& nl, const Word& d, const std::string& name) {
  Word q;
  q.sign = d.sign;
  for (std::size_t i = 0; i < d.width(); ++i)
    q.bits.push_back(nl.delay(d[i], false, name + "[" + std::to_string(i) + "]"));
  return q;
}

inline FirDatapath build_fir(const QuantizedCoeffs& coeffs) {
  if (coeffs.size() == 0) throw Error("FIR needs at least one coefficient");
  for (auto c : coeffs.fixed)
    if (c < kSampleMin || c > kSampleMax) throw Error("coefficient outside 16-bit range");

  FirDatapath fir;
  fir.coeffs = coeffs;
  Netlist& nl = fir.netlist;
  fir.input = nl.add_input_word("x", kSampleBits, Signedness::TwosComplement);

  std::vector<Word> taps;
  {
    CellScope line(nl, "delay_line");
    Word prev = fir.input;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      prev = register_word(nl, prev, "z" + std::to_string(k));
      taps.push_back(prev);
    }
  }

  std::vector<Word> products;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    CellScope tap(nl, "tap");
    Word c = constant_word(nl, static_cast<std::uint64_t>(coeffs.fixed[k]), kSampleBits,
                           Signedness::TwosComplement);
    products.push_back(signed_multiply(nl, taps[k], c));
  }

  const std::size_t width = fir_output_width(coeffs.size());
  Word sum = build_sum_tree(nl, products, width);
  sum.sign = Signedness::TwosComplement;
  Word y;
  {
    CellScope out(nl, "output_register");
    y = register_word(nl, sum, "y");
  }
  nl.add_output_word("y", y);
  fir.output = y;
  nl.validate();
  return fir;
}

inline void check_samples(std::span<const std::int64_t> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i] < kSampleMin || samples[i] > kSampleMax)
      throw Error("sample " + std::to_string(i) + " (" + std::to_string(samples[i]) +
                  ") does not fit in 16-bit signed");
}

// Clocked simulation of several equal-length traces (64 per pass); each
// output is latency-aligned so it compares directly with filter_behavioral.
inline std::vector<std::vector<std::int64_t>> run_fir_batch(
    const FirDatapath& fir, std::span<const std::vector<std::int64_t>> traces) {
  for (const auto& t : traces) check_samples(t);
  Simulator sim(fir.netlist);
  WordStreamer streamer(sim, fir.input, fir.output);
  std::vector<std::vector<std::int64_t>> result;
  for (std::size_t first = 0; first < traces.size(); first += kLaneCount) {
    const std::size_t count = std::min(kLaneCount, traces.size() - first);
    auto raw = streamer.run(traces.subspan(first, count), fir.latency);
    for (auto& r : raw) result.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(fir.latency), r.end());
  }
  return result;
}

inline std::vector<std::int64_t> run_fir(const FirDatapath& fir,
                                         std::span<const std::int64_t> samples) {
  std::vector<std::vector<std::int64_t>> one{std::vector<std::int64_t>(samples.begin(), samples.end())};
  return run_fir_batch(fir, one).at(0);
}

// ---- coefficient files -----------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline nlohmann::ordered_json coeffs_to_json(const QuantizedCoeffs& q) {
  nlohmann::ordered_json doc;
  doc["format"] = "ftfir-coefficients";
  doc["version"] = 1;
  doc["total_bits"] = 16;
  doc["frac_bits"] = q.frac_bits;
  doc["coeffs_real"] = q.real;
  doc["coeffs_fixed"] = q.fixed;
  return doc;
}

// Text file with one real per line, plus a sidecar `<path>.format`
// descriptor of key=value lines (taps, total_bits, frac_bits, window,
// kaiser_beta, cutoff_hz, sample_rate_hz).
inline void save_coefficients(const std::string& path, const QuantizedCoeffs& q,
                              const FilterSpec& spec) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (double v : q.real) out << format_double(v) << "\n";
  std::ofstream fmt(path + ".format");
  if (!fmt) throw Error("cannot write " + path + ".format");
  fmt << "taps=" << q.size() << "\n"
      << "total_bits=16\n"
      << "frac_bits=" << q.frac_bits << "\n"
      << "window=" << to_string(spec.window) << "\n"
      << "kaiser_beta=" << format_double(spec.kaiser_beta) << "\n"
      << "cutoff_hz=" << format_double(spec.cutoff_hz) << "\n"
      << "sample_rate_hz=" << format_double(spec.sample_rate_hz) << "\n";
  if (!out || !fmt) throw Error("write failed for " + path);
}

inline QuantizedCoeffs load_coefficients(const std::string& path) {
  std::ifstream fmt(path + ".format");
  if (!fmt) throw Error("missing coefficient format descriptor " + path + ".format");
  int frac_bits = -1;
  long taps = -1;
  std::string line;
  while (std::getline(fmt, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "frac_bits") frac_bits = std::stoi(value);
    if (key == "taps") taps = std::stol(value);
  }
  if (frac_bits < 0) throw Error(path + ".format: missing frac_bits");

  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::vector<double> real;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || p != line.data() + line.size())
      throw Error(path + ":" + std::to_string(lineno) + ": not a number");
    real.push_back(v);
  }
  if (taps >= 0 && static_cast<std::size_t>(taps) != real.size())
    throw Error(path + ": descriptor says " + std::to_string(taps) + " taps, file has " +
                std::to_string(real.size()));
  return quantize(real, frac_bits);
}

}  // namespace ftfir

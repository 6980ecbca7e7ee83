#pragma once

// Synthetic ECG, additive noise at a prescribed SNR, trace files, quality
// metrics, and the end-to-end denoising pipeline through a replicated FIR.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftfir/fir.hpp"
#include "ftfir/redundancy.hpp"
#include "ftfir/rng.hpp"
#include "ftfir/voters.hpp"

namespace ftfir {

enum class TraceFormat : std::uint8_t { Real, Fixed16 };

// Real samples use full scale 1.0. Fixed16 samples hold raw integer codes
// with `frac_bits` fractional bits.
struct SignalTrace {
  std::vector<double> samples;
  double sample_rate_hz = 360.0;
  TraceFormat format = TraceFormat::Real;
  int frac_bits = 15;

  std::size_t size() const { return samples.size(); }
};

// ---- synthetic ECG -----------------------------------------------------------------

struct EcgWave {
  double offset_s;  // relative to the R peak
  double amplitude;
  double width_s;   // Gaussian sigma
};

// P, Q, R, S, T
inline constexpr std::array<EcgWave, 5> kEcgWaves = {{
    {-0.200, 0.15, 0.025},
    {-0.035, -0.12, 0.010},
    {0.000, 1.00, 0.012},
    {0.035, -0.22, 0.010},
    {0.280, 0.30, 0.050},
}};

inline constexpr double kEcgPeak = 0.9;
inline constexpr double kBeatJitter = 0.02;  // +-2% RR interval

inline SignalTrace gen_ecg(double sample_rate_hz, double duration_s, double heart_rate_bpm,
                           std::uint64_t seed) {
  if (!(sample_rate_hz > 0.0) || !(heart_rate_bpm > 0.0))
    throw Error("sample rate and heart rate must be positive");
  const double rr = 60.0 / heart_rate_bpm;
  if (!(duration_s > rr)) throw Error("duration must exceed one beat interval");

  const auto n = static_cast<std::size_t>(std::floor(duration_s * sample_rate_hz));
  SignalTrace tr;
  tr.sample_rate_hz = sample_rate_hz;
  tr.samples.assign(n, 0.0);

  StreamRng rng(seed, 0);
  std::vector<double> beats;
  for (double t = 0.4 * rr; t < duration_s + rr; t += rr * (1.0 + kBeatJitter * (2.0 * rng.uniform01() - 1.0)))
    beats.push_back(t);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    double v = 0.0;
    for (double b : beats)
      for (const auto& w : kEcgWaves) {
        const double d = t - b - w.offset_s;
        if (std::fabs(d) < 6.0 * w.width_s) v += w.amplitude * std::exp(-d * d / (2.0 * w.width_s * w.width_s));
      }
    tr.samples[i] = v;
  }
  double peak = 0.0;
  for (double v : tr.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0)
    for (double& v : tr.samples) v *= kEcgPeak / peak;
  return tr;
}

// ---- noise ------------------------------------------------------------------------

enum class NoiseKind : std::uint8_t { WhiteGaussian, Powerline, BaselineWander };

constexpr std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::WhiteGaussian: return "white";
    case NoiseKind::Powerline: return "powerline";
    case NoiseKind::BaselineWander: return "baseline";
  }
  return "?";
}

inline NoiseKind noise_kind_from_string(std::string_view s) {
  if (s == "white") return NoiseKind::WhiteGaussian;
  if (s == "powerline") return NoiseKind::Powerline;
  if (s == "baseline") return NoiseKind::BaselineWander;
  throw Error("unknown noise kind '" + std::string(s) + "' (expected white, powerline or baseline)");
}

struct NoiseSpec {
  NoiseKind kind = NoiseKind::WhiteGaussian;
  double freq_hz = 50.0;  // powerline / baseline wander only
  double target_snr_db = 10.0;  // +infinity: no noise
  std::uint64_t seed = 1;
};

inline double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Adds noise rescaled so the realized SNR equals the target.
inline SignalTrace add_noise(const SignalTrace& trace, const NoiseSpec& spec) {
  if (trace.samples.empty()) throw Error("empty trace");
  if (spec.kind != NoiseKind::WhiteGaussian &&
      !(spec.freq_hz > 0.0 && spec.freq_hz < trace.sample_rate_hz / 2.0))
    throw Error("noise frequency must lie in (0, sample_rate/2)");
  if (std::isinf(spec.target_snr_db) && spec.target_snr_db > 0) return trace;
  const double ps = mean_square(trace.samples);
  if (ps == 0.0) throw Error("SNR undefined for a silent trace");

  StreamRng rng(spec.seed, 1);
  std::vector<double> noise(trace.size());
  if (spec.kind == NoiseKind::WhiteGaussian) {
    for (double& v : noise) v = rng.gaussian();
  } else {
    const double phase = 2.0 * std::numbers::pi * rng.uniform01();
    for (std::size_t i = 0; i < noise.size(); ++i)
      noise[i] = std::sin(2.0 * std::numbers::pi * spec.freq_hz * static_cast<double>(i) / trace.sample_rate_hz + phase);
  }
  const double pn = mean_square(noise);
  if (pn == 0.0) throw Error("generated noise has zero power");
  const double k = std::sqrt(ps / (pn * std::pow(10.0, spec.target_snr_db / 10.0)));

  SignalTrace out = trace;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += k * noise[i];
  return out;
}

// ---- metrics ----------------------------------------------------------------------

inline void check_comparable(const SignalTrace& a, const SignalTrace& b) {
  if (a.size() != b.size()) throw Error("traces differ in length");
  if (a.sample_rate_hz != b.sample_rate_hz) throw Error("traces differ in sample rate");
}

// 10 log10(sum ref^2 / sum (ref - test)^2); +infinity for identical traces.
inline double snr_db(const SignalTrace& reference, const SignalTrace& test) {
  check_comparable(reference, test);
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    sig += reference.samples[i] * reference.samples[i];
    const double d = reference.samples[i] - test.samples[i];
    err += d * d;
  }
  if (sig == 0.0) throw Error("SNR undefined for an all-zero reference");
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / err);
}

inline double mse(const SignalTrace& reference, const SignalTrace& test) {
  check_comparable(reference, test);
  if (reference.size() == 0) throw Error("empty trace");
  double err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.samples[i] - test.samples[i];
    err += d * d;
  }
  return err / static_cast<double>(reference.size());
}

// ---- fixed point --------------------------------------------------------------------

inline std::int64_t to_fixed16(double v, int frac_bits) {
  const double q = std::round(std::ldexp(v, frac_bits));
  return static_cast<std::int64_t>(std::clamp(q, static_cast<double>(kSampleMin), static_cast<double>(kSampleMax)));
}

// Saturating round-half-away-from-zero quantization.
inline SignalTrace quantize_trace(const SignalTrace& t, int frac_bits = 15) {
  if (t.format == TraceFormat::Fixed16) return t;
  SignalTrace q = t;
  q.format = TraceFormat::Fixed16;
  q.frac_bits = frac_bits;
  for (double& v : q.samples) v = static_cast<double>(to_fixed16(v, frac_bits));
  return q;
}

inline SignalTrace dequantize_trace(const SignalTrace& t) {
  if (t.format == TraceFormat::Real) return t;
  SignalTrace r = t;
  r.format = TraceFormat::Real;
  for (double& v : r.samples) v = std::ldexp(v, -t.frac_bits);
  return r;
}

// ---- files --------------------------------------------------------------------------

// CSV, one sample per line, after a one-line header
//   sample_rate_hz=<value>[ format=real|fixed16 frac_bits=<f>]
inline std::string trace_to_csv(const SignalTrace& t) {
  std::ostringstream os;
  os << "sample_rate_hz=" << format_double(t.sample_rate_hz);
  if (t.format == TraceFormat::Fixed16) os << " format=fixed16 frac_bits=" << t.frac_bits;
  os << "\n";
  for (double v : t.samples) {
    if (t.format == TraceFormat::Fixed16)
      os << static_cast<std::int64_t>(v) << "\n";
    else
      os << format_double(v) << "\n";
  }
  return os.str();
}

inline void save_trace(const SignalTrace& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << trace_to_csv(t);
  if (!out) throw Error("write failed for " + path);
}

inline SignalTrace parse_trace_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  SignalTrace t;
  if (!std::getline(in, line) || line.rfind("sample_rate_hz=", 0) != 0)
    throw Error(origin + ":1: missing header sample_rate_hz=<value>");
  {
    std::istringstream hs(line);
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw Error(origin + ":1: malformed header field '" + tok + "'");
      const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
      try {
        if (key == "sample_rate_hz") t.sample_rate_hz = std::stod(value);
        else if (key == "format") {
          if (value == "fixed16") t.format = TraceFormat::Fixed16;
          else if (value == "real") t.format = TraceFormat::Real;
          else throw Error(origin + ":1: unknown format '" + value + "'");
        } else if (key == "frac_bits") t.frac_bits = std::stoi(value);
        else throw Error(origin + ":1: unknown header field '" + key + "'");
      } catch (const std::logic_error&) {
        throw Error(origin + ":1: bad value for " + key);
      }
    }
    if (!(t.sample_rate_hz > 0.0)) throw Error(origin + ":1: sample rate must be positive");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || p != line.data() + line.size())
      throw Error(origin + ":" + std::to_string(lineno) + ": not a number");
    if (t.format == TraceFormat::Fixed16 &&
        (v != std::floor(v) || v < kSampleMin || v > kSampleMax))
      throw Error(origin + ":" + std::to_string(lineno) + ": not a 16-bit sample");
    t.samples.push_back(v);
  }
  if (t.samples.empty()) throw Error(origin + ": empty trace");
  return t;
}

inline SignalTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str(), path);
}

// ---- denoising pipeline ----------------------------------------------------------------

enum class Fusion : std::uint8_t { BitwiseVote, Median5 };

constexpr std::string_view to_string(Fusion f) {
  return f == Fusion::BitwiseVote ? "bitwise-vote" : "median5";
}

inline Fusion fusion_from_string(std::string_view s) {
  if (s == "bitwise-vote") return Fusion::BitwiseVote;
  if (s == "median5") return Fusion::Median5;
  throw Error("unknown fusion '" + std::string(s) + "' (expected bitwise-vote or median5)");
}

struct DenoiseResult {
  SignalTrace clean;
  SignalTrace noisy;     // single measurement channel, real
  SignalTrace denoised;  // real, group delay removed
  double snr_in_db = 0.0;
  double snr_out_db = 0.0;
  double improvement_db = 0.0;
  double mse = 0.0;
  std::size_t window_begin = 0;  // metrics cover [window_begin, window_end)
  std::size_t window_end = 0;
};

inline constexpr int kTraceFracBits = 15;

inline SignalTrace window_of(const SignalTrace& t, std::size_t begin, std::size_t end) {
  SignalTrace w = t;
  w.samples.assign(t.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                   t.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return w;
}

// Runs one denoising experiment per noise spec (all in one simulation pass
// per 64 runs) through an already replicated FIR. Inputs are quantized to
// Q1.15; the full-width filter output is shifted back by the coefficient
// fraction bits, and the linear-phase group delay (taps-1)/2 is removed.
// Metrics skip the first and last group-delay samples where the filter
// window overlaps the zero padding. With Median5 fusion, five
// independently seeded measurement channels are median-fused per sample
// before filtering; the reported noisy trace is channel 0.
inline std::vector<DenoiseResult> denoise_with_system(const ReplicaSystem& sys, const QuantizedCoeffs& coeffs,
                                                      const SignalTrace& clean_in,
                                                      std::span<const NoiseSpec> noises, Fusion fusion,
                                                      const FaultOverlay& faults = {}) {
  const SignalTrace clean = dequantize_trace(clean_in);
  const std::size_t delay = (coeffs.size() - 1) / 2;
  if (clean.size() <= 2 * delay + 1) throw Error("trace too short for the filter length");

  std::vector<DenoiseResult> results(noises.size());
  std::vector<std::vector<std::int64_t>> inputs;
  for (std::size_t r = 0; r < noises.size(); ++r) {
    DenoiseResult& res = results[r];
    res.clean = clean;
    std::vector<std::int64_t> x(clean.size() + delay, 0);
    if (fusion == Fusion::BitwiseVote) {
      res.noisy = add_noise(clean, noises[r]);
      for (std::size_t i = 0; i < clean.size(); ++i) x[i] = to_fixed16(res.noisy.samples[i], kTraceFracBits);
    } else {
      std::array<SignalTrace, 5> ch;
      for (std::size_t k = 0; k < 5; ++k) {
        NoiseSpec s = noises[r];
        s.seed = splitmix64(noises[r].seed + 0x100 * (k + 1));
        ch[k] = add_noise(clean, k == 0 ? noises[r] : s);
      }
      res.noisy = ch[0];
      for (std::size_t i = 0; i < clean.size(); ++i) {
        std::array<std::int64_t, 5> v{};
        for (std::size_t k = 0; k < 5; ++k) v[k] = to_fixed16(ch[k].samples[i], kTraceFracBits);
        x[i] = median5(v);
      }
    }
    inputs.push_back(std::move(x));
  }

  const auto outputs = run_system_batch(sys, inputs, faults);
  for (std::size_t r = 0; r < noises.size(); ++r) {
    DenoiseResult& res = results[r];
    res.denoised = clean;
    for (std::size_t i = 0; i < clean.size(); ++i)
      res.denoised.samples[i] =
          std::ldexp(static_cast<double>(downscale(outputs[r][i + delay], coeffs.frac_bits)), -kTraceFracBits);
    res.window_begin = delay;
    res.window_end = clean.size() - delay;
    const SignalTrace ref = window_of(clean, res.window_begin, res.window_end);
    res.snr_in_db = snr_db(ref, window_of(res.noisy, res.window_begin, res.window_end));
    const SignalTrace out = window_of(res.denoised, res.window_begin, res.window_end);
    res.snr_out_db = snr_db(ref, out);
    res.improvement_db = res.snr_out_db - res.snr_in_db;
    res.mse = mse(ref, out);
  }
  return results;
}

inline std::vector<DenoiseResult> denoise_pipeline(const SignalTrace& clean, std::span<const NoiseSpec> noises,
                                                   const FilterSpec& filter, VoterKind voter, Fusion fusion,
                                                   const FaultOverlay& faults = {}) {
  const QuantizedCoeffs coeffs = design_lowpass(filter);
  const ReplicaSystem sys = replicate(build_fir(coeffs), voter);
  return denoise_with_system(sys, coeffs, clean, noises, fusion, faults);
}

inline DenoiseResult denoise_pipeline(const SignalTrace& clean, const NoiseSpec& noise, const FilterSpec& filter,
                                      VoterKind voter, Fusion fusion, const FaultOverlay& faults = {}) {
  return denoise_pipeline(clean, std::span<const NoiseSpec>(&noise, 1), filter, voter, fusion, faults).at(0);
}

// CSV row set: config,fusion,snr_in_db,snr_out_db,improvement_db,mse
struct MetricsRow {
  std::string config;
  std::string fusion;
  double snr_in_db;
  double snr_out_db;
  double improvement_db;
  double mse;
};

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << "config,fusion,snr_in_db,snr_out_db,improvement_db,mse\n";
  for (const auto& r : rows)
    os << r.config << "," << r.fusion << "," << format_double(r.snr_in_db) << ","
       << format_double(r.snr_out_db) << "," << format_double(r.improvement_db) << ","
       << format_double(r.mse) << "\n";
  return os.str();
}

inline nlohmann::ordered_json metrics_to_json(const std::vector<MetricsRow>& rows) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    a.push_back({{"config", r.config},
                 {"fusion", r.fusion},
                 {"snr_in_db", r.snr_in_db},
                 {"snr_out_db", r.snr_out_db},
                 {"improvement_db", r.improvement_db},
                 {"mse", r.mse}});
  return a;
}

}  // namespace ftfir

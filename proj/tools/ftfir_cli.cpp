// ftfir: command-line front end for building, exercising and measuring the
// five redundant FIR configurations.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftfir/ftfir.hpp"

namespace fs = std::filesystem;
using namespace ftfir;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct Options {
  std::string config_file;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  // filter
  int taps = 0;  // 0: per-command default
  double cutoff_hz = 45.0;
  double fs_hz = 360.0;
  std::string window = "hamming";
  double kaiser_beta = 5.0;
  int fixed_frac = 15;
  std::string coeffs;

  std::string config = "majority5";

  // denoise
  std::string noise = "white";
  double noise_freq_hz = 50.0;
  double snr_db = 10.0;
  std::string in;
  bool synthetic = false;
  double duration_s = 10.0;
  double heart_rate = 72.0;
  std::string fusion = "bitwise-vote";
  int fault_replica = 0;
  std::size_t fault_net = 0;
  std::string fault_mode = "flip";

  // inject
  std::string mode = "exhaustive-single";
  std::size_t cycle = 4;
  std::uint64_t trials = 1000;
  double prob = 0.1;
  std::string failure = "net-flip";
  std::string pair_patterns = "adversarial";
  std::size_t stimulus_cycles = 32;

  // resources
  bool all_configs = false;

  // export
  std::string format = "json";

  // reliability
  std::string scheme = "both";
  std::size_t points = 101;
};

void add_output(CLI::App* c, Options& o) {
  c->add_option("--out-dir", o.out_dir, "Output directory (created if missing)");
  c->add_option("--config-file", o.config_file, "Text file of key=value lines mirroring the long flags");
}

void add_filter(CLI::App* c, Options& o, bool with_coeffs, int default_taps) {
  c->add_option("--taps", o.taps, "Number of taps (odd)")->default_str(std::to_string(default_taps));
  c->add_option("--cutoff-hz", o.cutoff_hz, "Lowpass cutoff in Hz");
  c->add_option("--fs-hz", o.fs_hz, "Sample rate in Hz");
  c->add_option("--window", o.window, "Window: hamming, kaiser or rectangular");
  c->add_option("--kaiser-beta", o.kaiser_beta, "Kaiser window beta");
  c->add_option("--fixed-frac", o.fixed_frac, "Fractional bits of the 16-bit coefficients");
  if (with_coeffs)
    c->add_option("--coeffs", o.coeffs, "Coefficient file written by 'design' (overrides the filter flags)");
}

std::vector<VoterKind> voters_of(const std::string& s) {
  if (s == "all") return {kAllVoterKinds.begin(), kAllVoterKinds.end()};
  return {voter_kind_from_string(s)};
}

FilterSpec filter_of(const Options& o, int default_taps) {
  FilterSpec f;
  f.num_taps = o.taps > 0 ? o.taps : default_taps;
  f.cutoff_hz = o.cutoff_hz;
  f.sample_rate_hz = o.fs_hz;
  f.window = window_kind_from_string(o.window);
  f.kaiser_beta = o.kaiser_beta;
  f.frac_bits = o.fixed_frac;
  f.validate();
  return f;
}

QuantizedCoeffs coeffs_of(const Options& o, const FilterSpec& f) {
  return o.coeffs.empty() ? design_lowpass(f) : load_coefficients(o.coeffs);
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir);
  const fs::path probe = fs::path(dir) / ".ftfir-write-test";
  {
    std::ofstream p(probe);
    if (!p) throw Error("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed for " + p.string());
}

// Random 16-bit stimulus drawn from the run seed.
std::vector<std::int64_t> stimulus(std::uint64_t seed, std::size_t n) {
  StreamRng rng(seed, 0x5717);
  std::vector<std::int64_t> x(n);
  for (auto& v : x) v = static_cast<std::int16_t>(rng.next() & 0xffff);
  return x;
}

struct Run {
  fs::path dir;
  std::vector<std::string> outputs;
  void emit(const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    outputs.push_back(name);
  }
};

void write_manifest(Run& run, const CLI::App* cmd, const Options& o) {
  nlohmann::ordered_json m;
  m["tool"] = "ftfir";
  m["version"] = kToolVersion;
  m["command"] = cmd->get_name();
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (key == "help" || key == "config-file") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().empty() ? "true" : opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    cfg[key] = value;
  }
  m["config"] = std::move(cfg);
  m["seed"] = o.seed;
  m["outputs"] = run.outputs;
  write_file(run.dir / "manifest.json", m.dump(2) + "\n");
}

// ---- commands ------------------------------------------------------------------------

void cmd_design(const Options& o, Run& run) {
  const FilterSpec f = filter_of(o, 51);
  const QuantizedCoeffs q = design_lowpass(f);
  save_coefficients((run.dir / "coefficients.txt").string(), q, f);
  run.outputs.push_back("coefficients.txt");
  run.outputs.push_back("coefficients.txt.format");
  run.emit("coefficients.json", coeffs_to_json(q).dump(2) + "\n");
  std::cout << "designed " << q.size() << "-tap " << to_string(f.window) << " lowpass, "
            << format_double(f.cutoff_hz) << " Hz at " << format_double(f.sample_rate_hz) << " Hz, Q"
            << (16 - q.frac_bits) << "." << q.frac_bits << "\n";
}

void cmd_denoise(const Options& o, Run& run) {
  FilterSpec f = filter_of(o, 51);
  if (!o.in.empty() && o.synthetic) throw Error("--in and --synthetic are mutually exclusive");
  SignalTrace clean = o.in.empty() ? gen_ecg(o.fs_hz, o.duration_s, o.heart_rate, o.seed)
                                   : dequantize_trace(load_trace(o.in));
  if (clean.sample_rate_hz != f.sample_rate_hz) {
    f.sample_rate_hz = clean.sample_rate_hz;
    f.validate();
  }
  const QuantizedCoeffs q = coeffs_of(o, f);

  NoiseSpec noise;
  noise.kind = noise_kind_from_string(o.noise);
  noise.freq_hz = o.noise_freq_hz;
  noise.target_snr_db = o.snr_db;
  noise.seed = o.seed;
  const Fusion fusion = fusion_from_string(o.fusion);
  const std::vector<NoiseSpec> noises{noise};

  if (o.fault_replica < 0 || o.fault_replica > static_cast<int>(kReplicas))
    throw Error("--fault-replica must be in 1..5 (0 disables fault injection)");
  FaultMode fmode = FaultMode::Flip;
  if (o.fault_mode == "stuck0") fmode = FaultMode::Stuck0;
  else if (o.fault_mode == "stuck1") fmode = FaultMode::Stuck1;
  else if (o.fault_mode != "flip") throw Error("unknown fault mode '" + o.fault_mode + "' (expected flip, stuck0 or stuck1)");

  const FirDatapath fir = build_fir(q);
  std::vector<MetricsRow> rows;
  bool wrote_inputs = false;
  for (VoterKind k : voters_of(o.config)) {
    const ReplicaSystem sys = replicate(fir, k);
    FaultOverlay ov;
    if (o.fault_replica > 0) {
      const auto& nets = sys.replica_nets[static_cast<std::size_t>(o.fault_replica - 1)];
      if (o.fault_net >= nets.size())
        throw Error("--fault-net must be below " + std::to_string(nets.size()));
      ov.faults.push_back({nets[o.fault_net], 0, std::numeric_limits<std::uint64_t>::max(), fmode});
    }
    const DenoiseResult r = denoise_with_system(sys, q, clean, noises, fusion, ov).at(0);
    if (!wrote_inputs) {
      run.emit("clean.csv", trace_to_csv(r.clean));
      run.emit("noisy.csv", trace_to_csv(r.noisy));
      wrote_inputs = true;
    }
    run.emit("denoised_" + std::string(to_string(k)) + ".csv", trace_to_csv(r.denoised));
    rows.push_back({std::string(to_string(k)), std::string(to_string(fusion)), r.snr_in_db, r.snr_out_db,
                    r.improvement_db, r.mse});
  }
  run.emit("metrics.csv", metrics_csv(rows));
  run.emit("metrics.json", metrics_to_json(rows).dump(2) + "\n");
  std::cout << metrics_csv(rows);
}

void cmd_inject(const Options& o, Run& run) {
  const FilterSpec f = filter_of(o, 7);
  const FirDatapath fir = build_fir(design_lowpass(f));
  const auto stim = stimulus(o.seed, o.stimulus_cycles);
  if (o.pair_patterns != "adversarial" && o.pair_patterns != "complement")
    throw Error("unknown --pair-patterns '" + o.pair_patterns + "' (expected adversarial or complement)");
  if (o.mode != "exhaustive-single" && o.mode != "exhaustive-double" && o.mode != "monte-carlo")
    throw Error("unknown mode '" + o.mode + "' (expected exhaustive-single, exhaustive-double or monte-carlo)");
  const FailureMode failure = failure_mode_from_string(o.failure);

  std::vector<MaskingReport> reports;
  for (VoterKind k : voters_of(o.config)) {
    const ReplicaSystem sys = replicate(fir, k);
    MaskingReport r;
    if (o.mode == "exhaustive-single")
      r = enumerate_single_faults(sys, stim, o.cycle);
    else if (o.mode == "exhaustive-double")
      r = enumerate_double_faults(sys, stim, o.cycle, o.pair_patterns == "adversarial");
    else
      r = monte_carlo_campaign(sys, stim, o.prob, o.trials, o.seed, failure);
    const std::string name(to_string(k));
    run.emit("replicas_" + name + ".csv", report_replica_csv(r));
    if (!r.pairs.empty()) run.emit("pairs_" + name + ".csv", report_pairs_csv(r));
    run.emit("report_" + name + ".json", report_to_json(r).dump(2) + "\n");
    reports.push_back(std::move(r));
  }
  const std::string summary = report_summary_csv(reports);
  run.emit("summary.csv", summary);
  std::cout << summary;
}

void cmd_resources(const Options& o, Run& run, bool config_given) {
  if (o.all_configs && config_given) throw Error("--all-configs and --config are mutually exclusive");
  const FilterSpec f = filter_of(o, 7);
  const FirDatapath fir = build_fir(design_lowpass(f));
  if (o.all_configs) {
    const ComparisonTable t = compare_with_reference(resources_for_fir(fir));
    const std::string csv = comparison_csv(t);
    run.emit("resources.csv", csv);
    nlohmann::ordered_json j;
    j["base_ff_equal"] = t.base_ff_equal;
    j["richer_voters"] = t.richer_voters;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows)
      rows.push_back({{"config", to_string(r.config)},
                      {"ff", r.ours.total.flip_flops},
                      {"total_gates", r.ours.total.total_gates},
                      {"voter_gates", r.ours.voter.total_gates},
                      {"fa_cells", r.ours.total.full_adder_cells},
                      {"paper_lut", r.reference.lut},
                      {"paper_ff", r.reference.ff},
                      {"paper_carry", r.reference.carry}});
    j["rows"] = std::move(rows);
    run.emit("resources.json", j.dump(2) + "\n");
    std::cout << csv;
    return;
  }
  const VoterKind k = voter_kind_from_string(o.config);
  const ConfigResources cr = config_resources(replicate(fir, k));
  const ReferenceRow& p = reference_row(k);
  std::ostringstream os;
  const ResourceCount& c = cr.total;
  os << "config,ff,xor,xnor,and,or,not,mux2,fa_cells,paper_lut,paper_ff,paper_carry\n"
     << to_string(k) << "," << c.flip_flops << "," << c.gates(GateKind::Xor) << "," << c.gates(GateKind::Xnor)
     << "," << c.gates(GateKind::And) << "," << c.gates(GateKind::Or) << "," << c.gates(GateKind::Not) << ","
     << c.mux2 << "," << c.full_adder_cells << "," << p.lut << "," << p.ff << "," << p.carry << "\n";
  run.emit("resources.csv", os.str());
  std::cout << os.str();
}

void cmd_export(const Options& o, Run& run) {
  ExportFormat fmt;
  if (o.format == "json") fmt = ExportFormat::Json;
  else if (o.format == "dot") fmt = ExportFormat::Dot;
  else throw Error("unknown format '" + o.format + "' (expected json or dot)");
  const FilterSpec f = filter_of(o, 7);
  const FirDatapath fir = build_fir(design_lowpass(f));
  for (VoterKind k : voters_of(o.config)) {
    const ReplicaSystem sys = replicate(fir, k);
    const std::string name = "netlist_" + std::string(to_string(k)) + "." + o.format;
    run.emit(name, export_netlist(sys.netlist, fmt));
    std::cout << name << ": " << sys.netlist.gates().size() << " gates, " << sys.netlist.registers().size()
              << " registers\n";
  }
}

void cmd_reliability(const Options& o, Run& run) {
  std::vector<RedundancyScheme> schemes;
  if (o.scheme == "both") schemes = {RedundancyScheme::Tmr, RedundancyScheme::Majority5};
  else if (o.scheme == "tmr") schemes = {RedundancyScheme::Tmr};
  else if (o.scheme == "majority5mr") schemes = {RedundancyScheme::Majority5};
  else throw Error("unknown scheme '" + o.scheme + "' (expected tmr, majority5mr or both)");
  for (RedundancyScheme s : schemes) {
    const ReliabilityCurve c = reliability_curve(s, o.points);
    run.emit("reliability_" + std::string(to_string(s)) + ".csv", curve_csv(c));
  }
  std::cout << "R=0.9: tmr " << format_double(analytic_reliability(RedundancyScheme::Tmr, 0.9)) << ", majority5mr "
            << format_double(analytic_reliability(RedundancyScheme::Majority5, 0.9)) << "\n";
}

// ---- config file -----------------------------------------------------------------------

std::optional<std::string> find_config_file(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config-file" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config-file=", 0) == 0) return a.substr(14);
  }
  return std::nullopt;
}

// key=value lines become "--key=value" arguments placed before the real
// ones, so flags given on the command line win.
std::vector<std::string> config_file_args(const std::string& path, const CLI::App* cmd) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "config-file" || key == "help" || cmd->get_option_no_throw("--" + key) == nullptr)
      throw Error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for command " +
                  cmd->get_name());
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Fault-tolerant FIR simulator: redundant voter configurations, fault campaigns, ECG denoising",
               "ftfir"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CLI::App* design = app.add_subcommand("design", "Design and quantize the lowpass coefficients");
  add_filter(design, o, false, 51);
  add_output(design, o);

  const std::string voter_help = "Voter: majority5, xor5, xnor5, cascaded_tmr5, mux41_5 or all";
  CLI::App* denoise = app.add_subcommand("denoise", "Run the ECG denoising experiment through redundant filters");
  add_filter(denoise, o, true, 51);
  denoise->add_option("--config", o.config, voter_help);
  denoise->add_option("--noise", o.noise, "Noise kind: white, powerline or baseline");
  denoise->add_option("--noise-freq-hz", o.noise_freq_hz, "Powerline / baseline wander frequency");
  denoise->add_option("--snr-db", o.snr_db, "Input SNR in dB");
  denoise->add_option("--seed", o.seed, "Seed for the synthetic ECG and the noise");
  denoise->add_option("--in", o.in, "Clean input trace CSV (default: synthetic ECG)");
  denoise->add_flag("--synthetic", o.synthetic, "Use a synthetic ECG (the default)");
  denoise->add_option("--duration-s", o.duration_s, "Synthetic ECG duration");
  denoise->add_option("--heart-rate", o.heart_rate, "Synthetic ECG heart rate in bpm");
  denoise->add_option("--fusion", o.fusion, "Input fusion: bitwise-vote or median5");
  denoise->add_option("--fault-replica", o.fault_replica, "Replica (1-5) holding a permanent fault; 0 for none");
  denoise->add_option("--fault-net", o.fault_net, "Index of the faulty net within the replica");
  denoise->add_option("--fault-mode", o.fault_mode, "Fault: flip, stuck0 or stuck1");
  add_output(denoise, o);

  CLI::App* inject = app.add_subcommand("inject", "Run a fault-injection campaign");
  add_filter(inject, o, false, 7);
  inject->add_option("--config", o.config, voter_help);
  inject->add_option("--mode", o.mode, "Campaign: exhaustive-single, exhaustive-double or monte-carlo");
  inject->add_option("--cycle", o.cycle, "Injection cycle for exhaustive campaigns");
  inject->add_option("--trials", o.trials, "Monte Carlo trials");
  inject->add_option("--prob", o.prob, "Monte Carlo per-replica failure probability");
  inject->add_option("--failure", o.failure, "Monte Carlo failure model: net-flip or forced-wrong");
  inject->add_option("--pair-patterns", o.pair_patterns, "Double faults: adversarial or complement");
  inject->add_option("--stimulus-cycles", o.stimulus_cycles, "Length of the random stimulus");
  inject->add_option("--seed", o.seed, "Seed for stimulus and Monte Carlo draws");
  add_output(inject, o);

  CLI::App* resources = app.add_subcommand("resources", "Count primitives and compare with the reference table");
  add_filter(resources, o, false, 7);
  resources->add_option("--config", o.config, "Single voter configuration");
  resources->add_flag("--all-configs", o.all_configs, "Report all five configurations");
  add_output(resources, o);

  CLI::App* exp = app.add_subcommand("export", "Export the replicated netlist");
  add_filter(exp, o, false, 7);
  exp->add_option("--config", o.config, voter_help);
  exp->add_option("--format", o.format, "json or dot");
  add_output(exp, o);

  CLI::App* rel = app.add_subcommand("reliability", "Analytic TMR / 5MR reliability curves");
  rel->add_option("--scheme", o.scheme, "tmr, majority5mr or both");
  rel->add_option("--points", o.points, "Number of module-reliability samples");
  add_output(rel, o);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (auto cf = find_config_file(argc, argv); cf && !args.empty()) {
      CLI::App* cmd = app.get_subcommand_no_throw(args.front());
      if (cmd == nullptr) throw CLI::ExtrasError({args.front()});
      auto extra = config_file_args(*cf, cmd);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ftfir: error: " << e.what() << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  } catch (const std::exception& e) {
    std::cerr << "ftfir: error: " << e.what() << "\n";
    return 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    Run run{prepare_dir(o.out_dir), {}};
    if (cmd == design) cmd_design(o, run);
    else if (cmd == denoise) cmd_denoise(o, run);
    else if (cmd == inject) cmd_inject(o, run);
    else if (cmd == resources) cmd_resources(o, run, resources->get_option("--config")->count() > 0);
    else if (cmd == exp) cmd_export(o, run);
    else cmd_reliability(o, run);
    write_manifest(run, cmd, o);
  } catch (const std::exception& e) {
    std::cerr << "ftfir: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

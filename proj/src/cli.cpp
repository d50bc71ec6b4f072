// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "dnp/enhancement.hpp"
#include "dnp/metrics.hpp"
#include "dnp/prior_mask.hpp"
#include "dnp/synth.hpp"
#include "dnp/train_trace.hpp"
#include "dnp/wav.hpp"

namespace dnp {
namespace {

namespace fs = std::filesystem;

void add_net_flags(CLI::App& cmd, WaveUnetConfig& net) {
  cmd.add_option("--layers", net.num_layers, "Encoder/decoder levels")->capture_default_str();
  cmd.add_option("--filters", net.filters_per_layer, "Channels added per level")->capture_default_str();
  cmd.add_option("--down-kernel", net.down_kernel, "Encoder kernel width")->capture_default_str();
  cmd.add_option("--up-kernel", net.up_kernel, "Decoder kernel width")->capture_default_str();
  cmd.add_option("--slope", net.leaky_slope, "Leaky ReLU negative slope")->capture_default_str();
}

void add_mask_flags(CLI::App& cmd, MaskConfig& cfg) {
  cmd.add_option("--iters", cfg.iterations, "Training iterations t")->capture_default_str();
  cmd.add_option("--lr", cfg.lr, "Adam learning rate")->capture_default_str();
  add_net_flags(cmd, cfg.net);
  cmd.add_option("--pct-low", cfg.pct_low, "Lower clipping percentile")->capture_default_str();
  cmd.add_option("--pct-high", cfg.pct_high, "Upper clipping percentile")->capture_default_str();
  cmd.add_option("--eps", cfg.eps, "Relative difference guard")->capture_default_str();
  cmd.add_option("--frame", cfg.stft.frame_len, "STFT frame length in samples (32 ms)")->capture_default_str();
  cmd.add_option("--hop", cfg.stft.hop, "STFT hop in samples (8 ms)")->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Job seed for weights and network input")->capture_default_str();
}

void add_enhance_flags(CLI::App& cmd, EnhanceConfig& cfg) {
  cmd.add_option("--xi-max", cfg.xi_max, "Upper clamp of the a-priori SNR")->capture_default_str();
  cmd.add_option("--highpass", cfg.highpass_hz, "Highpass cutoff in Hz")->capture_default_str();
}

EnhanceConfig aligned(EnhanceConfig cfg, const MaskConfig& mask) {
  cfg.stft = mask.stft;
  cfg.pad_multiple = mask.net.length_multiple();
  return cfg;
}

MaskEstimate run_mask(const AudioClip& y, const MaskConfig& cfg, bool verbose, std::ostream& err) {
  if (verbose) err << "estimating mask: " << cfg.iterations << " iterations on " << y.size() << " samples\n";
  MaskEstimate est = estimate_mask(y, cfg);
  if (verbose) err << "final loss " << est.trace.losses.back() << '\n';
  return est;
}

struct DenoiseJob {
  std::string input, output, clean;
  std::string mask_path, trace_path, noisy_spec_path, enhanced_spec_path;
  MaskConfig mask;
  EnhanceConfig enhance;
  bool verbose = false;
};

void cmd_denoise(const DenoiseJob& job, std::ostream& out, std::ostream& err) {
  const AudioClip y = read_wav(job.input);
  std::optional<AudioClip> clean;
  if (!job.clean.empty()) {
    clean = read_wav(job.clean);
    if (clean->size() != y.size()) throw ArgumentError("denoise: --clean has a different length than the input");
  }
  const MaskEstimate est = run_mask(y, job.mask, job.verbose, err);
  const EnhanceConfig ecfg = aligned(job.enhance, job.mask);
  const AudioClip enhanced = enhance(y, est.mask, ecfg);
  write_wav(enhanced, job.output);

  if (!job.mask_path.empty()) export_matrix(est.mask.data, job.mask_path);
  if (!job.trace_path.empty()) write_loss_csv(est.trace, job.trace_path);
  if (!job.noisy_spec_path.empty()) export_matrix(magnitude(stft(y, job.mask.stft)), job.noisy_spec_path);
  if (!job.enhanced_spec_path.empty())
    export_matrix(magnitude(stft(enhanced, job.mask.stft)), job.enhanced_spec_path);
  if (clean) out << ScoreReport::csv_header() << '\n' << score(*clean, read_wav(job.output)).to_csv() << '\n';
}

struct ProfileJob {
  std::string out_dir = ".";
  std::string kind = "harmonic";
  double duration = 16384.0 / kPipelineRate;
  double snr_db = 5.0;
  std::uint64_t noise_seed = 2;
  MaskConfig mask;
  bool verbose = false;
};

SynthKind parse_kind(const std::string& name, double tone_hz, double f0, int harmonics, double start_hz, double end_hz) {
  if (name == "tone") return Tone{tone_hz};
  if (name == "harmonic") return HarmonicStack{f0, harmonics};
  if (name == "chirp") return Chirp{start_hz, end_hz};
  if (name == "noise") return WhiteNoise{};
  throw ArgumentError("unknown signal kind '" + name + "'");
}

void cmd_profile(const ProfileJob& job, std::ostream& out, std::ostream& err) {
  const AudioClip clean = synthesize(parse_kind(job.kind, 1000.0, 125.0, 8, 100.0, 4000.0), job.duration, job.mask.seed);
  const AudioClip raw_noise = synthesize(WhiteNoise{}, job.duration, job.noise_seed);
  const AudioClip noisy = mix_at_snr(clean, raw_noise, job.snr_db);
  // Noise-only target at the clean signal's power.
  const AudioClip noise{raw_noise.samples * std::sqrt(mean_power(clean) / mean_power(raw_noise)), kPipelineRate};

  WaveUnetConfig net = job.mask.net;
  net.seed = job.mask.seed;
  fs::create_directories(job.out_dir);
  const std::pair<const char*, const AudioClip*> targets[] = {{"clean", &clean}, {"noisy", &noisy}, {"noise", &noise}};
  for (const auto& [label, target] : targets) {
    if (job.verbose) err << "fitting " << label << '\n';
    const TrainTrace trace = fit_trace(*target, net, job.mask.iterations, 0, job.mask.lr);
    const fs::path path = fs::path(job.out_dir) / (std::string("loss_") + label + ".csv");
    write_loss_csv(trace, path);
    out << label << ',' << trace.losses.back() << ',' << path.string() << '\n';
  }
}

struct BaselinesJob {
  std::string noisy, clean, output;
  MaskConfig mask;
  EnhanceConfig enhance;
  int average_every = 250;
  int noise_frames = 6;
  bool verbose = false;
};

void cmd_baselines(const BaselinesJob& job, std::ostream& out, std::ostream& err) {
  if (job.mask.sample_every < 1) throw ArgumentError("baselines: --sample-every must be >= 1");
  if (job.average_every < 1 || job.average_every % job.mask.sample_every != 0)
    throw ArgumentError("baselines: --average-every must be a positive multiple of --sample-every");
  const AudioClip y = read_wav(job.noisy);
  const AudioClip clean = read_wav(job.clean);
  if (clean.size() != y.size()) throw ArgumentError("baselines: clean and noisy lengths differ");

  const MaskEstimate est = run_mask(y, job.mask, job.verbose, err);
  const TrainTrace averaged = thin_snapshots(est.trace, job.average_every);
  if (averaged.snapshots.empty()) throw ArgumentError("baselines: --iters is below --average-every");

  std::ostringstream table;
  table << "method," << ScoreReport::csv_header() << '\n';
  table << "noisy," << score(clean, y).to_csv() << '\n';
  table << "best," << score(clean, hindsight_best(est.trace, clean)).to_csv() << '\n';
  table << "averaged," << score(clean, averaged_output(averaged)).to_csv() << '\n';
  table << "wiener," << score(clean, wiener_baseline(y, job.noise_frames, aligned(job.enhance, job.mask))).to_csv()
        << '\n';
  table << "ours," << score(clean, enhance(y, est.mask, aligned(job.enhance, job.mask))).to_csv() << '\n';

  if (job.output.empty()) {
    out << table.str();
  } else {
    std::ofstream file(job.output);
    if (!(file << table.str())) throw IoError("cannot write '" + job.output + "'");
  }
}

struct SynthJob {
  std::string output, clean_out;
  std::string kind = "harmonic";
  double duration = 2.0;
  double tone_hz = 1000.0, f0 = 125.0, start_hz = 100.0, end_hz = 4000.0;
  int harmonics = 8;
  std::uint64_t seed = 1, noise_seed = 2;
  std::optional<double> snr_db;
};

void cmd_synth(const SynthJob& job, std::ostream&, std::ostream&) {
  const AudioClip clean =
      synthesize(parse_kind(job.kind, job.tone_hz, job.f0, job.harmonics, job.start_hz, job.end_hz), job.duration, job.seed);
  if (!job.clean_out.empty()) write_wav(clean, job.clean_out);
  if (!job.snr_db) {
    write_wav(clean, job.output);
    return;
  }
  write_wav(mix_at_snr(clean, synthesize(WhiteNoise{}, job.duration, job.noise_seed), *job.snr_db), job.output);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised speech denoising with a deep network prior", "dnp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  DenoiseJob denoise;
  auto* dn = app.add_subcommand("denoise", "Estimate a mask from a noisy WAV and write the enhanced WAV");
  dn->add_option("input", denoise.input, "Noisy 16 kHz WAV")->required();
  dn->add_option("output", denoise.output, "Enhanced WAV (16-bit PCM)")->required();
  add_mask_flags(*dn, denoise.mask);
  add_enhance_flags(*dn, denoise.enhance);
  dn->add_option("--clean", denoise.clean, "Clean reference; prints a score line");
  dn->add_option("--export-mask", denoise.mask_path, "Mask as .csv or .pgm");
  dn->add_option("--export-trace", denoise.trace_path, "Loss trace CSV");
  dn->add_option("--export-noisy-spec", denoise.noisy_spec_path, "Noisy magnitude spectrogram (.csv/.pgm)");
  dn->add_option("--export-enhanced-spec", denoise.enhanced_spec_path, "Enhanced magnitude spectrogram (.csv/.pgm)");
  dn->add_flag("-v,--verbose", denoise.verbose, "Progress on stderr");

  ProfileJob profile;
  profile.mask.seed = 1;
  auto* pr = app.add_subcommand("profile", "Loss curves for a clean, a noisy and a noise-only target");
  pr->add_option("--out-dir", profile.out_dir, "Directory for loss_{clean,noisy,noise}.csv")->capture_default_str();
  pr->add_option("--kind", profile.kind, "Clean signal: harmonic, tone, chirp")->capture_default_str();
  pr->add_option("--duration", profile.duration, "Seconds")->capture_default_str();
  pr->add_option("--snr", profile.snr_db, "SNR of the noisy target in dB")->capture_default_str();
  pr->add_option("--noise-seed", profile.noise_seed, "White noise seed")->capture_default_str();
  pr->add_option("--iters", profile.mask.iterations, "Training iterations t")->capture_default_str();
  pr->add_option("--lr", profile.mask.lr, "Adam learning rate")->capture_default_str();
  add_net_flags(*pr, profile.mask.net);
  pr->add_option("--seed", profile.mask.seed, "Shared seed for the clean signal and all three fits")
      ->capture_default_str();
  pr->add_flag("-v,--verbose", profile.verbose, "Progress on stderr");

  BaselinesJob baselines;
  baselines.mask.sample_every = 10;
  auto* bl = app.add_subcommand("baselines", "Score noisy, best, averaged, wiener and the mask method");
  bl->add_option("noisy", baselines.noisy, "Noisy 16 kHz WAV")->required();
  bl->add_option("clean", baselines.clean, "Clean reference WAV")->required();
  add_mask_flags(*bl, baselines.mask);
  add_enhance_flags(*bl, baselines.enhance);
  bl->add_option("--sample-every", baselines.mask.sample_every, "Snapshot interval for the best output")
      ->capture_default_str();
  bl->add_option("--average-every", baselines.average_every, "Snapshot interval for the averaged output")
      ->capture_default_str();
  bl->add_option("--noise-frames", baselines.noise_frames, "Leading noise frames for the Wiener baseline")
      ->capture_default_str();
  bl->add_option("-o,--out", baselines.output, "CSV path (default: stdout)");
  bl->add_flag("-v,--verbose", baselines.verbose, "Progress on stderr");

  SynthJob synth;
  auto* sy = app.add_subcommand("synth", "Write a synthetic test signal, optionally mixed with white noise");
  sy->add_option("output", synth.output, "Output WAV")->required();
  sy->add_option("--kind", synth.kind, "harmonic, tone, chirp or noise")->capture_default_str();
  sy->add_option("--duration", synth.duration, "Seconds")->capture_default_str();
  sy->add_option("--seed", synth.seed, "Signal seed")->capture_default_str();
  sy->add_option("--freq", synth.tone_hz, "Tone frequency in Hz")->capture_default_str();
  sy->add_option("--f0", synth.f0, "Harmonic stack fundamental in Hz")->capture_default_str();
  sy->add_option("--harmonics", synth.harmonics, "Harmonic count")->capture_default_str();
  sy->add_option("--start-hz", synth.start_hz, "Chirp start frequency")->capture_default_str();
  sy->add_option("--end-hz", synth.end_hz, "Chirp end frequency")->capture_default_str();
  sy->add_option("--snr", synth.snr_db, "Mix with white noise at this SNR in dB");
  sy->add_option("--noise-seed", synth.noise_seed, "White noise seed")->capture_default_str();
  sy->add_option("--clean-out", synth.clean_out, "Also write the clean signal here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dnp: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  // Configuration checks map to the usage exit code.
  try {
    if (*dn) {
      denoise.mask.validate();
    } else if (*pr) {
      profile.mask.validate();
      parse_kind(profile.kind, 1.0, 1.0, 1, 1.0, 1.0);
    } else if (*bl) {
      baselines.mask.validate();
    } else if (*sy) {
      parse_kind(synth.kind, 1.0, 1.0, 1, 1.0, 1.0);
    }
  } catch (const ArgumentError& e) {
    err << "dnp: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*dn) cmd_denoise(denoise, out, err);
    if (*pr) cmd_profile(profile, out, err);
    if (*bl) cmd_baselines(baselines, out, err);
    if (*sy) cmd_synth(synth, out, err);
  } catch (const std::exception& e) {
    err << "dnp: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace dnp

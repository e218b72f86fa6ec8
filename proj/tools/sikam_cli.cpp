#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "sikam/bench.hpp"
#include "sikam/error.hpp"
#include "sikam/eval.hpp"
#include "sikam/kam.hpp"
#include "sikam/timefreq.hpp"
#include "sikam/wav.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sikam;
using sikam::cli::RunManifest;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadArguments = 2, kIoFailure = 3, kInfeasible = 4 };

// Command-line values; only those given override the manifest.
struct SeparateFlags {
  std::optional<std::string> config, input, output_dir, reference, variant, support;
  std::optional<int> k, delta, p, drop_head;
  std::optional<uint64_t> seed;
  bool no_clamp = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string transform_policy(WindowPolicy p) { return p == WindowPolicy::Fixed ? "fixed" : "per_bin"; }

RunManifest resolve_manifest(const SeparateFlags& f) {
  RunManifest m;
  if (f.config) cli::load_manifest(*f.config, m);
  if (f.input) m.input = *f.input;
  if (f.output_dir) m.output_dir = *f.output_dir;
  if (f.reference) m.reference = *f.reference;
  if (f.variant) m.separation.variant = parse_variant(*f.variant);
  if (f.support) m.support = cli::parse_support(*f.support);
  if (f.k) m.separation.k = *f.k;
  if (f.delta) m.separation.delta = *f.delta;
  if (f.p) m.separation.p = *f.p;
  if (f.drop_head) m.separation.drop_head = *f.drop_head;
  if (f.seed) m.seed = *f.seed;
  if (f.no_clamp) m.separation.clamp_shift = false;
  if (m.input.empty()) throw InvalidArgument("no input given (--input or 'input' in the manifest)");
  return m;
}

json neighbor_stats(const std::vector<NeighborSet>& sets) {
  size_t count = 0, shifted = 0;
  double dist = 0.0, abs_shift = 0.0;
  int max_shift = 0;
  for (const auto& s : sets) {
    for (const auto& n : s.neighbors) {
      ++count;
      dist += n.distance;
      abs_shift += std::abs(n.shift);
      max_shift = std::max(max_shift, std::abs(n.shift));
      if (n.shift != 0) ++shifted;
    }
  }
  json j;
  j["target_frames"] = sets.size();
  j["neighbors_per_frame"] = sets.empty() ? 0 : sets.front().neighbors.size();
  j["mean_distance"] = count ? dist / static_cast<double>(count) : 0.0;
  j["mean_abs_shift"] = count ? abs_shift / static_cast<double>(count) : 0.0;
  j["max_abs_shift"] = max_shift;
  j["shifted_fraction"] = count ? static_cast<double>(shifted) / static_cast<double>(count) : 0.0;
  return j;
}

int run_separate(const SeparateFlags& flags) {
  const auto m = resolve_manifest(flags);
  const auto audio = read_wav(m.input);
  if (audio.num_frames() == 0) throw InvalidArgument("input has no samples");

  TransformParams params = m.transform;
  params.sample_rate = audio.sample_rate;
  params.validate();
  const double duration = static_cast<double>(audio.num_frames()) / audio.sample_rate;

  std::vector<ComplexSpectrogram> spects;
  for (const auto& ch : audio.channels) spects.push_back(forward_logfreq(ch, params));
  const int frames = spects.front().num_frames();

  std::set<int> support_set;
  for (const auto& [a, b] : m.support) {
    if (b > duration) {
      std::ostringstream os;
      os << "support range " << a << ':' << b << " extends past the end of the input (" << duration << " s)";
      throw InvalidArgument(os.str());
    }
    for (const int t : frames_overlapping_seconds(params, frames, a, b)) support_set.insert(t);
  }
  SeparationConfig sep = m.separation;
  sep.support.assign(support_set.begin(), support_set.end());

  const auto start = std::chrono::steady_clock::now();
  const auto results = separate_channels(spects, sep);
  const auto sep_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  AudioBuffer source{audio.sample_rate, {}}, interference{audio.sample_rate, {}};
  double recon_err = 0.0;
  for (size_t c = 0; c < results.size(); ++c) {
    source.channels.push_back(inverse_logfreq(results[c].source));
    interference.channels.push_back(inverse_logfreq(results[c].interference));
    for (size_t i = 0; i < audio.num_frames(); ++i)
      recon_err = std::max(recon_err, std::abs(source.channels[c][i] + interference.channels[c][i] -
                                               audio.channels[c][i]));
  }

  make_dir(m.output_dir);
  write_wav(m.output_dir / "source.wav", source);
  write_wav(m.output_dir / "interference.wav", interference);

  json report;
  report["input"] = {{"path", m.input.filename().string()},
                     {"sample_rate", audio.sample_rate},
                     {"channels", audio.num_channels()},
                     {"samples", audio.num_frames()}};
  report["transform"] = {{"bins_per_octave", params.bins_per_octave},
                         {"f_min", params.f_min},
                         {"f_max", params.max_frequency()},
                         {"hop", params.hop},
                         {"window_length", params.window_length},
                         {"window_policy", transform_policy(params.window_policy)},
                         {"bins", params.num_bins()},
                         {"frames", frames}};
  const int effective_p = sep.variant == Variant::SpecmurtPruned
                              ? std::min(sep.surplus(), frames - static_cast<int>(sep.support.size()) - sep.k)
                              : 0;
  report["separation"] = {{"variant", std::string(to_string(sep.variant))},
                          {"k", sep.k},
                          {"delta", sep.delta},
                          {"p", effective_p},
                          {"drop_head", sep.drop_head},
                          {"clamp_shift", sep.clamp_shift},
                          {"deconv_epsilon", sep.deconv_epsilon},
                          {"seed", m.seed}};
  report["support"] = {{"seconds", cli::format_support(m.support)}, {"frames", sep.support}};
  report["neighbors"] = neighbor_stats(results.front().neighbors);
  report["reconstruction_max_abs_error"] = recon_err;

  std::optional<double> mean_nsdr;
  // SDR is measured on the support, so there is nothing to report without one.
  if (!m.reference.empty() && !sep.support.empty()) {
    const auto ref = read_wav(m.reference);
    if (ref.num_channels() != audio.num_channels() || ref.num_frames() != audio.num_frames())
      throw InvalidArgument("reference does not match the input's channels and length");
    json per_channel = json::array();
    double acc = 0.0;
    for (int c = 0; c < audio.num_channels(); ++c) {
      const auto& r = ref.channels[static_cast<size_t>(c)];
      const double sdr_mix = sdr(r, audio.channels[static_cast<size_t>(c)], sep.support, params);
      const double sdr_est = sdr(r, source.channels[static_cast<size_t>(c)], sep.support, params);
      per_channel.push_back({{"sdr_mixture", sdr_mix}, {"sdr_estimate", sdr_est}, {"nsdr", sdr_est - sdr_mix}});
      acc += sdr_est - sdr_mix;
    }
    mean_nsdr = acc / audio.num_channels();
    report["metrics"] = {{"channels", per_channel}, {"nsdr", *mean_nsdr}};
  }
  write_text(m.output_dir / "report.json", report.dump(2) + "\n");

  // Wall-clock numbers live apart from the report so that reruns produce
  // identical report bytes.
  StageTimings t;
  for (const auto& r : results) {
    t.specmurt_precompute_s += r.timings.specmurt_precompute_s;
    t.similarity_s += r.timings.similarity_s;
    t.estimation_s += r.timings.estimation_s;
  }
  json timings = {{"specmurt_precompute_s", t.specmurt_precompute_s},
                  {"similarity_s", t.similarity_s},
                  {"estimation_s", t.estimation_s},
                  {"separation_total_s", sep_s}};
  write_text(m.output_dir / "timings.json", timings.dump(2) + "\n");

  std::printf("variant %s, K=%d, delta=%d, %zu support frames of %d\n", std::string(to_string(sep.variant)).c_str(),
              sep.k, sep.delta, sep.support.size(), frames);
  if (mean_nsdr) std::printf("NSDR %.2f dB\n", *mean_nsdr);
  std::printf("wrote %s\n", (m.output_dir / "source.wav").string().c_str());
  return kOk;
}

struct EvalFlags {
  std::string output_dir = ".";
  std::string content = "all";
  std::vector<std::string> variants;
  int k = GridConfig{}.k;
  int delta = 48;
  int p = -1;
  uint64_t seed = 1;
  double snr = 12.0;
  int every = 1;
};

int run_eval(const EvalFlags& f) {
  std::vector<Content> contents;
  if (f.content == "melody" || f.content == "all") contents.push_back(Content::Melody);
  if (f.content == "chords" || f.content == "all") contents.push_back(Content::Chords);
  if (contents.empty()) throw InvalidArgument("--content must be melody, chords or all");
  std::vector<Variant> variants;
  for (const auto& v : f.variants) variants.push_back(parse_variant(v));
  if (variants.empty())
    variants = {Variant::Baseline, Variant::ShiftExhaustive, Variant::Specmurt, Variant::SpecmurtPruned};
  if (f.every < 1) throw InvalidArgument("--every must be >= 1");

  GridConfig config;
  config.k = f.k;
  config.delta = f.delta;
  config.p = f.p;
  config.seed = f.seed;
  config.snr_db = f.snr;
  if (config.k < 1 || config.delta < 0) throw InvalidArgument("K must be >= 1 and delta >= 0");

  const auto corpus = desk_corpus();
  const auto grid = desk_grid(corpus, contents);
  std::vector<SceneSpec> scenes;
  for (size_t i = 0; i < grid.size(); i += static_cast<size_t>(f.every)) scenes.push_back(grid[i]);
  const auto rows = run_grid(corpus, scenes, variants, config);
  const auto table = summarize(rows);

  const fs::path dir(f.output_dir);
  make_dir(dir);
  std::ostringstream csv, summary;
  write_csv(csv, rows);
  write_summary(summary, table);
  write_text(dir / "results.csv", csv.str());
  write_text(dir / "summary.txt", summary.str());
  std::cout << scenes.size() << " scenes, " << rows.size() << " rows\n" << summary.str();

  auto has = [&](Variant v) { return std::find(variants.begin(), variants.end(), v) != variants.end(); };
  if (has(Variant::Baseline)) {
    const double rep = table.mean(Variant::Baseline, Content::Melody, Placement::Repeated);
    const double not_rep = table.mean(Variant::Baseline, Content::Melody, Placement::NotRepeated);
    if (!std::isnan(rep) && !std::isnan(not_rep))
      std::printf("baseline melody: not repeated below repeated: %s\n", not_rep < rep ? "yes" : "no");
    if (has(Variant::ShiftExhaustive) && !std::isnan(not_rep)) {
      const double gain = table.mean(Variant::ShiftExhaustive, Content::Melody, Placement::NotRepeated) - not_rep;
      std::printf("shift over baseline, melody not repeated: %+.2f dB\n", gain);
    }
  }
  return kOk;
}

struct BenchFlags {
  std::string sizes = "232:400:12,232:400:24,232:800:12";
  std::vector<std::string> variants;
  int k = 10;
  int repeats = 3;
  uint64_t seed = 1;
  std::string output;
};

std::vector<BenchSize> parse_sizes(const std::string& text) {
  std::vector<BenchSize> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    BenchSize s;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> s.bins >> c1 >> s.frames >> c2 >> s.delta) || c1 != ':' || c2 != ':' || !is.eof())
      throw InvalidArgument("size '" + item + "' is not F:T:delta");
    if (s.bins < 8 || s.frames < 2 || s.delta < 0 || s.delta > s.bins)
      throw InvalidArgument("size '" + item + "' out of range");
    out.push_back(s);
  }
  if (out.empty()) throw InvalidArgument("no sizes given");
  return out;
}

int run_bench(const BenchFlags& f) {
  const auto sizes = parse_sizes(f.sizes);
  std::vector<Variant> variants;
  for (const auto& v : f.variants) variants.push_back(parse_variant(v));
  if (variants.empty())
    variants = {Variant::Baseline, Variant::ShiftExhaustive, Variant::Specmurt, Variant::SpecmurtPruned};
  std::vector<BenchRow> rows;
  for (const auto v : variants)
    for (const auto& s : sizes) {
      if (f.k >= s.frames) throw InfeasibleConfig("K must be smaller than T for every size");
      rows.push_back(bench_variant(s, v, f.k, f.seed, f.repeats));
    }

  std::ostringstream os;
  write_bench_table(os, rows);
  os << "\nscaling (time ratio and log-log slope between sizes differing in one parameter)\n";
  char buf[256];
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.size(); ++j) {
      const auto& a = rows[i];
      const auto& b = rows[j];
      if (a.variant != b.variant) continue;
      const bool in_t = a.size.frames < b.size.frames && a.size.delta == b.size.delta;
      const bool in_d = a.size.delta < b.size.delta && a.size.frames == b.size.frames;
      if (!(in_t || in_d) || a.size.bins != b.size.bins) continue;
      std::snprintf(buf, sizeof buf,
                    "%-16s %-5s %4d -> %-4d similarity x%.2f (slope %.2f)  total x%.2f (slope %.2f)\n",
                    std::string(to_string(a.variant)).c_str(), in_t ? "T" : "delta",
                    in_t ? a.size.frames : a.size.delta, in_t ? b.size.frames : b.size.delta,
                    b.similarity_s / a.similarity_s, scaling_slope(a, b, false), b.total_s() / a.total_s(),
                    scaling_slope(a, b, true));
      os << buf;
    }
  std::cout << os.str();
  if (!f.output.empty()) write_text(f.output, os.str());
  return kOk;
}

int run_demo(const std::string& output_dir, uint64_t seed) {
  const auto corpus = desk_corpus();
  GridConfig config;
  config.seed = seed;
  const auto scene = build_scene(corpus, {0, 0, InterferenceKind::Cough, Placement::NotRepeated}, config);
  const fs::path dir(output_dir);
  make_dir(dir);
  const double sr = config.params.sample_rate;
  write_wav(dir / "mixture.wav", {sr, {scene.mixture}});
  write_wav(dir / "reference.wav", {sr, {scene.clean}});
  std::ostringstream os;
  os.precision(17);
  os << "# " << scene.id << "\n"
     << "input = mixture.wav\n"
     << "reference = reference.wav\n"
     << "support = " << scene.interference_begin / sr << ':' << (scene.interference_end - 1) / sr << "\n"
     << "k = " << config.k << "\n"
     << "delta = " << config.delta << "\n";
  write_text(dir / "manifest.txt", os.str());
  std::printf("wrote %s (%s)\n", (dir / "manifest.txt").string().c_str(), scene.id.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference reduction with shift-invariant kernel additive modelling"};
  app.require_subcommand(1);

  SeparateFlags sf;
  auto* separate_cmd = app.add_subcommand("separate", "Separate a recording given the interfered time ranges");
  separate_cmd->add_option("--config", sf.config, "key = value manifest; flags override it");
  separate_cmd->add_option("--input", sf.input, "Input WAV (16-bit or float, mono or stereo)");
  separate_cmd->add_option("--output-dir", sf.output_dir, "Directory for source.wav, interference.wav, report.json");
  separate_cmd->add_option("--reference", sf.reference, "Clean reference WAV; adds SDR/NSDR to the report");
  separate_cmd->add_option("--variant", sf.variant, "baseline | shift | specmurt | specmurt-pruned");
  separate_cmd->add_option("--k", sf.k, "Neighbours per frame");
  separate_cmd->add_option("--delta", sf.delta, "Maximum shift in bins");
  separate_cmd->add_option("--p", sf.p, "Pruning surplus (default 2K)");
  separate_cmd->add_option("--drop-head", sf.drop_head, "Leading specmurt coefficients to ignore");
  separate_cmd->add_flag("--no-clamp", sf.no_clamp, "Do not clamp deconvolution shifts to [-delta, delta]");
  separate_cmd->add_option("--support", sf.support, "Interfered ranges in seconds: start:end[,start:end...]");
  separate_cmd->add_option("--seed", sf.seed, "Random seed recorded in the report");

  EvalFlags ef;
  auto* eval_cmd = app.add_subcommand("eval", "Run the synthetic repeated / not repeated grid");
  eval_cmd->add_option("--output-dir", ef.output_dir, "Directory for results.csv and summary.txt")->capture_default_str();
  eval_cmd->add_option("--content", ef.content, "melody | chords | all")->capture_default_str();
  eval_cmd->add_option("--variant", ef.variants, "Variants to run (repeatable; default all)");
  eval_cmd->add_option("--k", ef.k, "Neighbours per frame, capped at half the pool")->capture_default_str();
  eval_cmd->add_option("--delta", ef.delta, "Maximum shift in bins")->capture_default_str();
  eval_cmd->add_option("--p", ef.p, "Pruning surplus (negative: 2K)")->capture_default_str();
  eval_cmd->add_option("--seed", ef.seed, "Seed for the interference clips")->capture_default_str();
  eval_cmd->add_option("--snr", ef.snr, "Mixing SNR in dB")->capture_default_str();
  eval_cmd->add_option("--every", ef.every, "Use every n-th scene of the grid")->capture_default_str();

  BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "Time the neighbour search and estimation stages");
  bench_cmd->add_option("--sizes", bf.sizes, "Comma-separated F:T:delta triples")->capture_default_str();
  bench_cmd->add_option("--variant", bf.variants, "Variants to time (repeatable; default all)");
  bench_cmd->add_option("--k", bf.k, "Neighbours per frame")->capture_default_str();
  bench_cmd->add_option("--repeats", bf.repeats, "Runs per cell; the fastest is kept")->capture_default_str();
  bench_cmd->add_option("--seed", bf.seed, "Seed for the random spectrogram")->capture_default_str();
  bench_cmd->add_option("--output", bf.output, "Also write the table to this file");

  std::string demo_dir = "demo";
  uint64_t demo_seed = 1;
  auto* demo_cmd = app.add_subcommand("demo", "Write a synthetic not-repeated test scene with its manifest");
  demo_cmd->add_option("--output-dir", demo_dir, "Directory for the scene")->capture_default_str();
  demo_cmd->add_option("--seed", demo_seed, "Seed for the interference clip")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*separate_cmd) return run_separate(sf);
    if (*eval_cmd) return run_eval(ef);
    if (*bench_cmd) return run_bench(bf);
    if (*demo_cmd) return run_demo(demo_dir, demo_seed);
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadArguments;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoFailure;
  } catch (const InfeasibleConfig& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}

#include "sikam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "sikam/error.hpp"

namespace sikam {
namespace {

bool same_pitches(const Segment& a, const Segment& b) {
  auto pa = a.pitches, pb = b.pitches;
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  return pa == pb;
}

int cell_index(Content c, Placement p) {
  return 2 * (c == Content::Melody ? 0 : 1) + (p == Placement::Repeated ? 0 : 1);
}

Piece melody(std::string name, std::initializer_list<int> notes, double duration_s) {
  Piece p{std::move(name), Content::Melody, {}};
  for (const int n : notes) p.segments.push_back({{n}, duration_s});
  return p;
}

Piece progression(std::string name, std::initializer_list<std::vector<int>> chords,
                  double duration_s) {
  Piece p{std::move(name), Content::Chords, {}};
  for (const auto& c : chords) p.segments.push_back({c, duration_s});
  return p;
}

}  // namespace

int choose_segment(const Piece& piece, Placement placement) {
  const int n = static_cast<int>(piece.segments.size());
  const double middle = (n - 1) / 2.0;
  int best = -1;
  for (int i = 0; i < n; ++i) {
    int occurrences = 0;
    for (int j = 0; j < n; ++j)
      if (same_pitches(piece.segments[static_cast<size_t>(i)], piece.segments[static_cast<size_t>(j)]))
        ++occurrences;
    const bool ok = placement == Placement::Repeated ? occurrences > 1 : occurrences == 1;
    if (!ok) continue;
    if (best < 0 || std::abs(i - middle) < std::abs(best - middle)) best = i;
  }
  if (best < 0)
    throw InvalidArgument("piece '" + piece.name + "' has no " +
                          std::string(to_string(placement)) + " segment");
  return best;
}

SyntheticScene build_scene(const Piece& piece, const RenderedPiece& rendered,
                           std::span<const double> clip, Placement placement, double snr_db,
                           const TransformParams& params) {
  const int seg = choose_segment(piece, placement);
  const auto [seg_begin, seg_end] = rendered.segment_ranges.at(static_cast<size_t>(seg));
  if (clip.size() >= seg_end - seg_begin)
    throw InvalidArgument("interference clip must be shorter than the segment it overlays");

  SyntheticScene scene;
  scene.placement = placement;
  scene.content = piece.content;
  scene.segment_index = seg;
  scene.params = params;
  scene.clean = rendered.samples;
  const size_t begin = seg_begin + (seg_end - seg_begin - clip.size()) / 2;
  const size_t end = begin + clip.size();

  double e_clean = 0.0, e_clip = 0.0;
  for (size_t i = 0; i < clip.size(); ++i) {
    e_clean += scene.clean[begin + i] * scene.clean[begin + i];
    e_clip += clip[i] * clip[i];
  }
  if (!(e_clip > 0.0)) throw InvalidArgument("interference clip is silent");
  if (!(e_clean > 0.0)) throw InvalidArgument("segment under the interference is silent");
  const double gain = std::sqrt(e_clean / (e_clip * std::pow(10.0, snr_db / 10.0)));

  scene.interference.assign(scene.clean.size(), 0.0);
  for (size_t i = 0; i < clip.size(); ++i) scene.interference[begin + i] = gain * clip[i];
  scene.mixture.resize(scene.clean.size());
  for (size_t i = 0; i < scene.clean.size(); ++i)
    scene.mixture[i] = scene.clean[i] + scene.interference[i];

  // Support from the extent of nonzero interference samples.
  size_t first = end, last = begin;
  for (size_t i = begin; i < end; ++i) {
    if (scene.interference[i] != 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  scene.interference_begin = first;
  scene.interference_end = last + 1;
  scene.support = frames_overlapping(params, params.num_frames(scene.clean.size()), first, last + 1);
  return scene;
}

std::pair<size_t, size_t> frame_sample_range(const TransformParams& params,
                                             std::span<const int> frames, size_t signal_length) {
  if (frames.empty()) return {0, signal_length};
  const auto [lo, hi] = std::minmax_element(frames.begin(), frames.end());
  const long half_hop = params.hop / 2;
  const long begin = std::max(0L, static_cast<long>(*lo) * params.hop - half_hop);
  const long end = std::min(static_cast<long>(signal_length),
                            static_cast<long>(*hi) * params.hop + (params.hop - half_hop));
  return {static_cast<size_t>(begin), static_cast<size_t>(std::max(begin, end))};
}

double sdr(std::span<const double> reference, std::span<const double> estimate, size_t begin,
           size_t end) {
  if (reference.size() != estimate.size()) throw InvalidArgument("sdr: length mismatch");
  if (end > reference.size() || begin > end) throw InvalidArgument("sdr: invalid sample range");
  double e_ref = 0.0, e_err = 0.0;
  for (size_t i = begin; i < end; ++i) {
    const double d = reference[i] - estimate[i];
    e_ref += reference[i] * reference[i];
    e_err += d * d;
  }
  if (!(e_ref > 0.0)) throw InvalidArgument("sdr: reference is all zero on the segment");
  if (e_err < 1e-20 * e_ref) return kSdrCeilingDb;
  return std::min(kSdrCeilingDb, 10.0 * std::log10(e_ref / e_err));
}

double sdr(std::span<const double> reference, std::span<const double> estimate,
           std::span<const int> frames, const TransformParams& params) {
  const auto [begin, end] = frame_sample_range(params, frames, reference.size());
  return sdr(reference, estimate, begin, end);
}

double nsdr(std::span<const double> reference, std::span<const double> mixture,
            std::span<const double> estimate, std::span<const int> frames,
            const TransformParams& params) {
  return sdr(reference, estimate, frames, params) - sdr(reference, mixture, frames, params);
}

int scaled_k(int k, int num_frames, int support_size) {
  const int pool = num_frames - support_size;
  return std::max(1, std::min(k, pool / 2));
}

std::vector<EvalResult> run_scene(const SyntheticScene& scene, std::span<const Variant> variants,
                                  const GridConfig& config) {
  const auto spect = forward_logfreq(scene.mixture, config.params);
  SeparationConfig sep;
  sep.k = scaled_k(config.k, spect.num_frames(), static_cast<int>(scene.support.size()));
  sep.delta = config.delta;
  sep.p = config.p < 0 ? 2 * sep.k : config.p;
  sep.drop_head = config.drop_head;
  sep.clamp_shift = config.clamp_shift;
  sep.support = scene.support;

  const double sdr_mix = sdr(scene.clean, scene.mixture, scene.support, config.params);
  std::vector<EvalResult> out;
  for (const auto v : variants) {
    sep.variant = v;
    const auto result = separate(spect, sep);
    const auto estimate = inverse_logfreq(result.source);
    EvalResult r;
    r.scene_id = scene.id;
    r.content = scene.content;
    r.placement = scene.placement;
    r.variant = v;
    r.sdr_mixture = sdr_mix;
    r.sdr_estimate = sdr(scene.clean, estimate, scene.support, config.params);
    r.nsdr = r.sdr_estimate - r.sdr_mixture;
    out.push_back(std::move(r));
  }
  return out;
}

DeskCorpus desk_corpus() {
  DeskCorpus c;
  constexpr double note = 0.4;
  constexpr double chord = 0.7;
  c.pieces = {
      melody("melody1", {60, 62, 64, 60, 62, 64, 65, 67, 69, 67, 65, 64, 62, 60}, note),
      melody("melody2", {67, 67, 69, 71, 72, 71, 69, 67, 64, 66, 67, 69, 67, 62}, note),
      melody("melody3", {57, 60, 64, 69, 64, 60, 57, 59, 62, 65, 62, 59, 57, 52}, note),
      melody("melody4", {62, 65, 69, 65, 62, 64, 67, 71, 74, 71, 67, 64, 62, 61}, note),
      melody("melody5", {64, 64, 65, 67, 67, 65, 64, 71, 60, 60, 62, 64, 62, 62}, note),
      // C F G C Am F G C
      progression("chords1",
                  {{60, 64, 67}, {60, 65, 69}, {59, 62, 67}, {60, 64, 67},
                   {57, 60, 64}, {60, 65, 69}, {59, 62, 67}, {60, 64, 67}},
                  chord),
      // Am Dm E Am F G C Am
      progression("chords2",
                  {{57, 60, 64}, {57, 62, 65}, {56, 59, 64}, {57, 60, 64},
                   {57, 60, 65}, {59, 62, 67}, {60, 64, 67}, {57, 60, 64}},
                  chord),
      // G D Em C G D C G
      progression("chords3",
                  {{55, 59, 62}, {57, 62, 66}, {55, 59, 64}, {55, 60, 64},
                   {55, 59, 62}, {57, 62, 66}, {55, 60, 64}, {55, 59, 62}},
                  chord),
      // D G A D Bm G A D
      progression("chords4",
                  {{57, 62, 66}, {59, 62, 67}, {57, 61, 64}, {57, 62, 66},
                   {59, 62, 66}, {59, 62, 67}, {57, 61, 64}, {57, 62, 66}},
                  chord),
      // F Bb C F Dm Gm C F
      progression("chords5",
                  {{57, 60, 65}, {58, 62, 65}, {55, 60, 64}, {57, 60, 65},
                   {57, 62, 65}, {55, 58, 62}, {55, 60, 64}, {57, 60, 65}},
                  chord),
  };
  c.timbres = {
      {"saw", 10, AmplitudeLaw::InverseK, 0.0},
      {"square", 15, AmplitudeLaw::OddInverseK, 0.0},
      {"mellow", 6, AmplitudeLaw::InverseKSquared, 0.0},
      {"pluck", 12, AmplitudeLaw::InverseK, 2.5},
  };
  return c;
}

std::vector<SceneSpec> desk_grid(const DeskCorpus& corpus, std::span<const Content> contents) {
  std::vector<SceneSpec> specs;
  constexpr InterferenceKind kinds[] = {InterferenceKind::Cough, InterferenceKind::DoorSlam,
                                        InterferenceKind::ChairDrag, InterferenceKind::Drop};
  for (int p = 0; p < static_cast<int>(corpus.pieces.size()); ++p) {
    const auto content = corpus.pieces[static_cast<size_t>(p)].content;
    if (std::find(contents.begin(), contents.end(), content) == contents.end()) continue;
    for (const auto placement : {Placement::Repeated, Placement::NotRepeated})
      for (int t = 0; t < static_cast<int>(corpus.timbres.size()); ++t)
        for (const auto kind : kinds) specs.push_back({p, t, kind, placement});
  }
  return specs;
}

SyntheticScene build_scene(const DeskCorpus& corpus, const SceneSpec& spec, const GridConfig& config) {
  const auto& piece = corpus.pieces.at(static_cast<size_t>(spec.piece));
  const auto& timbre = corpus.timbres.at(static_cast<size_t>(spec.timbre));
  const uint64_t seed = config.seed * 1000003ULL + static_cast<uint64_t>(spec.piece) * 7919ULL +
                        static_cast<uint64_t>(spec.timbre) * 101ULL +
                        static_cast<uint64_t>(spec.interference) * 11ULL +
                        (spec.placement == Placement::Repeated ? 0ULL : 1ULL);
  const auto rendered = render_piece(piece, timbre, config.params.sample_rate);
  const auto clip = make_interference(spec.interference, config.params.sample_rate, seed);
  auto scene = build_scene(piece, rendered, clip, spec.placement, config.snr_db, config.params);
  scene.id = piece.name + "/" + timbre.name + "/" + std::string(to_string(spec.interference)) + "/" +
             std::string(to_string(spec.placement));
  return scene;
}

std::vector<EvalResult> run_grid(const DeskCorpus& corpus, std::span<const SceneSpec> scenes,
                                 std::span<const Variant> variants, const GridConfig& config) {
  std::vector<EvalResult> out;
  out.reserve(scenes.size() * variants.size());
  for (const auto& spec : scenes) {
    const auto scene = build_scene(corpus, spec, config);
    auto rows = run_scene(scene, variants, config);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

double SummaryTable::mean(Variant v, Content c, Placement p) const {
  for (size_t i = 0; i < variants.size(); ++i)
    if (variants[i] == v) return mean_nsdr[i][static_cast<size_t>(cell_index(c, p))];
  return std::numeric_limits<double>::quiet_NaN();
}

SummaryTable summarize(std::span<const EvalResult> results) {
  SummaryTable table;
  std::vector<std::array<double, 4>> sums;
  for (const auto& r : results) {
    auto it = std::find(table.variants.begin(), table.variants.end(), r.variant);
    size_t row = static_cast<size_t>(it - table.variants.begin());
    if (it == table.variants.end()) {
      table.variants.push_back(r.variant);
      sums.push_back({0, 0, 0, 0});
      table.counts.push_back({0, 0, 0, 0});
      row = table.variants.size() - 1;
    }
    const auto cell = static_cast<size_t>(cell_index(r.content, r.placement));
    sums[row][cell] += r.nsdr;
    table.counts[row][cell] += 1;
  }
  table.mean_nsdr.resize(sums.size());
  for (size_t i = 0; i < sums.size(); ++i)
    for (size_t c = 0; c < 4; ++c)
      table.mean_nsdr[i][c] = table.counts[i][c] > 0 ? sums[i][c] / table.counts[i][c]
                                                     : std::numeric_limits<double>::quiet_NaN();
  return table;
}

void write_csv(std::ostream& os, std::span<const EvalResult> results) {
  os << "scene_id,content,placement,variant,sdr_mix,sdr_est,nsdr\n";
  char buf[160];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", r.sdr_mixture, r.sdr_estimate, r.nsdr);
    os << r.scene_id << ',' << to_string(r.content) << ',' << to_string(r.placement) << ','
       << to_string(r.variant) << ',' << buf << '\n';
  }
}

void write_summary(std::ostream& os, const SummaryTable& table) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %-25s %-25s\n", "", "Melody", "Chords");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-16s %12s %12s %12s %12s\n", "NSDR [dB]", "Repeated",
                "Not rep.", "Repeated", "Not rep.");
  os << buf;
  for (size_t i = 0; i < table.variants.size(); ++i) {
    const auto& m = table.mean_nsdr[i];
    std::snprintf(buf, sizeof buf, "%-16s %12.2f %12.2f %12.2f %12.2f\n",
                  std::string(to_string(table.variants[i])).c_str(), m[0], m[1], m[2], m[3]);
    os << buf;
  }
}

}  // namespace sikam

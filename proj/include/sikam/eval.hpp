#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sikam/kam.hpp"
#include "sikam/timefreq.hpp"

namespace sikam {

// ---------------------------------------------------------------------------
// Additive synthesis
// ---------------------------------------------------------------------------

enum class AmplitudeLaw {
  InverseK,         // a_k = 1 / k
  InverseKSquared,  // a_k = 1 / k^2
  OddInverseK,      // odd harmonics only, 1 / k
};

struct NoteOptions {
  int n_partials = 1;
  AmplitudeLaw law = AmplitudeLaw::InverseK;
  double sample_rate = 44100.0;
  // Linear attack and release ramps, at least 10 ms.
  double ramp_s = 0.01;
  // Exponential amplitude decay rate in 1/s; 0 for a sustained tone.
  double decay_rate = 0.0;
  double amplitude = 1.0;
};

// Sum of n_partials sinusoids at k * f0. Throws InvalidArgument when the
// highest partial reaches sample_rate / 2.
std::vector<double> synthesize_note(double f0, double duration_s, const NoteOptions& options);

double midi_to_hz(int midi);

struct Timbre {
  std::string name;
  int n_partials = 10;
  AmplitudeLaw law = AmplitudeLaw::InverseK;
  double decay_rate = 0.0;
};

enum class Content { Melody, Chords };
enum class Placement { Repeated, NotRepeated };

std::string_view to_string(Content c);
std::string_view to_string(Placement p);

struct Segment {
  std::vector<int> pitches;  // MIDI numbers sounding together
  double duration_s = 0.4;
};

struct Piece {
  std::string name;
  Content content = Content::Melody;
  std::vector<Segment> segments;
};

struct RenderedPiece {
  std::vector<double> samples;
  std::vector<std::pair<size_t, size_t>> segment_ranges;  // [begin, end) per segment
};

RenderedPiece render_piece(const Piece& piece, const Timbre& timbre, double sample_rate);

// ---------------------------------------------------------------------------
// Interference stand-ins
// ---------------------------------------------------------------------------

enum class InterferenceKind { Cough, DoorSlam, ChairDrag, Drop };

std::string_view to_string(InterferenceKind k);
std::vector<double> make_interference(InterferenceKind kind, double sample_rate, uint64_t seed);

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

struct SyntheticScene {
  std::string id;
  std::vector<double> clean;
  std::vector<double> interference;
  std::vector<double> mixture;
  // Frames of the log-frequency transform touched by the interference.
  std::vector<int> support;
  Placement placement = Placement::Repeated;
  Content content = Content::Melody;
  int segment_index = 0;
  size_t interference_begin = 0;
  size_t interference_end = 0;
  TransformParams params;
};

// Index of the segment the interference is centred on: for Repeated, a
// segment whose pitch set recurs elsewhere; for NotRepeated, one whose pitch
// set is unique. The candidate nearest the middle of the piece wins.
// Throws InvalidArgument when no segment qualifies.
int choose_segment(const Piece& piece, Placement placement);

// Overlays the clip centred on the chosen segment, scaled so that
// 10 log10(E_clean / E_interference) = snr_db over the overlapped samples.
SyntheticScene build_scene(const Piece& piece, const RenderedPiece& rendered,
                           std::span<const double> clip, Placement placement, double snr_db,
                           const TransformParams& params);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline constexpr double kSdrCeilingDb = 100.0;

// Samples owned by the given frames: [first*hop - hop/2, last*hop + hop/2),
// clipped to the signal.
std::pair<size_t, size_t> frame_sample_range(const TransformParams& params,
                                             std::span<const int> frames, size_t signal_length);

// 10 log10( sum ref^2 / sum (ref - est)^2 ) over [begin, end), capped at
// kSdrCeilingDb. Throws InvalidArgument if the reference is all zero there.
double sdr(std::span<const double> reference, std::span<const double> estimate, size_t begin,
           size_t end);
double sdr(std::span<const double> reference, std::span<const double> estimate,
           std::span<const int> frames, const TransformParams& params);

double nsdr(std::span<const double> reference, std::span<const double> mixture,
            std::span<const double> estimate, std::span<const int> frames,
            const TransformParams& params);

// ---------------------------------------------------------------------------
// Experimental grid
// ---------------------------------------------------------------------------

struct EvalResult {
  std::string scene_id;
  Content content = Content::Melody;
  Placement placement = Placement::Repeated;
  Variant variant = Variant::Baseline;
  double sdr_mixture = 0.0;
  double sdr_estimate = 0.0;
  double nsdr = 0.0;
};

struct GridConfig {
  TransformParams params;
  int k = 40;
  int delta = 48;
  // Negative selects 2 * K.
  int p = -1;
  int drop_head = 1;
  bool clamp_shift = true;
  double snr_db = 12.0;
  uint64_t seed = 1;
};

// Effective K for a scene: min(config K, floor(pool / 2)).
int scaled_k(int k, int num_frames, int support_size);

std::vector<EvalResult> run_scene(const SyntheticScene& scene, std::span<const Variant> variants,
                                  const GridConfig& config);

struct SceneSpec {
  int piece = 0;
  int timbre = 0;
  InterferenceKind interference = InterferenceKind::Cough;
  Placement placement = Placement::Repeated;
};

struct DeskCorpus {
  std::vector<Piece> pieces;
  std::vector<Timbre> timbres;
};

// Five melodies, five chord progressions and four timbres.
DeskCorpus desk_corpus();

// Every (piece, timbre, interference, placement) combination for the pieces
// whose content is listed.
std::vector<SceneSpec> desk_grid(const DeskCorpus& corpus, std::span<const Content> contents);

SyntheticScene build_scene(const DeskCorpus& corpus, const SceneSpec& spec, const GridConfig& config);

std::vector<EvalResult> run_grid(const DeskCorpus& corpus, std::span<const SceneSpec> scenes,
                                 std::span<const Variant> variants, const GridConfig& config);

// Mean NSDR per variant and (content, placement) cell; NaN for empty cells.
struct SummaryTable {
  std::vector<Variant> variants;
  // [variant][cell], cell = 2 * content + placement
  std::vector<std::array<double, 4>> mean_nsdr;
  std::vector<std::array<int, 4>> counts;

  double mean(Variant v, Content c, Placement p) const;
};

SummaryTable summarize(std::span<const EvalResult> results);
void write_csv(std::ostream& os, std::span<const EvalResult> results);
void write_summary(std::ostream& os, const SummaryTable& table);

}  // namespace sikam

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sikam/error.hpp"
#include "sikam/eval.hpp"

namespace sikam {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Biquad {
  double b0, b1, b2, a1, a2;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;

  double process(double x) {
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

enum class FilterType { Lowpass, Highpass, Bandpass };

Biquad make_biquad(FilterType type, double freq, double q, double sample_rate) {
  const double w0 = kTwoPi * freq / sample_rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  double b0 = 0, b1 = 0, b2 = 0;
  switch (type) {
    case FilterType::Lowpass: b0 = (1 - cw) / 2; b1 = 1 - cw; b2 = (1 - cw) / 2; break;
    case FilterType::Highpass: b0 = (1 + cw) / 2; b1 = -(1 + cw); b2 = (1 + cw) / 2; break;
    case FilterType::Bandpass: b0 = alpha; b1 = 0; b2 = -alpha; break;
  }
  return {b0 / a0, b1 / a0, b2 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
}

std::vector<double> white_noise(size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

size_t samples_for(double seconds, double sample_rate) {
  return static_cast<size_t>(std::lround(seconds * sample_rate));
}

}  // namespace

double midi_to_hz(int midi) { return 440.0 * std::exp2((midi - 69) / 12.0); }

std::vector<double> synthesize_note(double f0, double duration_s, const NoteOptions& options) {
  if (!(f0 > 0.0)) throw InvalidArgument("synthesize_note: f0 must be positive");
  if (options.n_partials < 1) throw InvalidArgument("synthesize_note: need at least one partial");
  if (!(duration_s > 0.0)) throw InvalidArgument("synthesize_note: duration must be positive");
  const double sr = options.sample_rate;
  if (!(f0 * options.n_partials < sr / 2.0))
    throw InvalidArgument("synthesize_note: partial " + std::to_string(options.n_partials) + " at " +
                          std::to_string(f0 * options.n_partials) + " Hz aliases");

  const size_t n = samples_for(duration_s, sr);
  std::vector<double> out(n, 0.0);
  for (int k = 1; k <= options.n_partials; ++k) {
    double a = 0.0;
    switch (options.law) {
      case AmplitudeLaw::InverseK: a = 1.0 / k; break;
      case AmplitudeLaw::InverseKSquared: a = 1.0 / (static_cast<double>(k) * k); break;
      case AmplitudeLaw::OddInverseK: a = (k % 2 == 1) ? 1.0 / k : 0.0; break;
    }
    if (a == 0.0) continue;
    const double w = kTwoPi * k * f0 / sr;
    for (size_t i = 0; i < n; ++i) out[i] += a * std::sin(w * static_cast<double>(i));
  }

  const size_t ramp = std::max<size_t>(1, samples_for(std::max(options.ramp_s, 0.01), sr));
  for (size_t i = 0; i < n; ++i) {
    double env = options.amplitude;
    if (options.decay_rate > 0.0) env *= std::exp(-options.decay_rate * static_cast<double>(i) / sr);
    if (i < ramp) env *= static_cast<double>(i) / ramp;
    if (n - 1 - i < ramp) env *= static_cast<double>(n - 1 - i) / ramp;
    out[i] *= env;
  }
  return out;
}

std::string_view to_string(Content c) { return c == Content::Melody ? "melody" : "chords"; }

std::string_view to_string(Placement p) {
  return p == Placement::Repeated ? "repeated" : "not_repeated";
}

std::string_view to_string(InterferenceKind k) {
  switch (k) {
    case InterferenceKind::Cough: return "cough";
    case InterferenceKind::DoorSlam: return "door_slam";
    case InterferenceKind::ChairDrag: return "chair_drag";
    case InterferenceKind::Drop: return "drop";
  }
  return "unknown";
}

RenderedPiece render_piece(const Piece& piece, const Timbre& timbre, double sample_rate) {
  RenderedPiece out;
  NoteOptions opts;
  opts.n_partials = timbre.n_partials;
  opts.law = timbre.law;
  opts.sample_rate = sample_rate;
  opts.decay_rate = timbre.decay_rate;
  for (const auto& seg : piece.segments) {
    const size_t begin = out.samples.size();
    const size_t len = samples_for(seg.duration_s, sample_rate);
    out.samples.resize(begin + len, 0.0);
    opts.amplitude = seg.pitches.empty() ? 0.0 : 0.5 / std::sqrt(static_cast<double>(seg.pitches.size()));
    for (const int pitch : seg.pitches) {
      const auto note = synthesize_note(midi_to_hz(pitch), seg.duration_s, opts);
      for (size_t i = 0; i < std::min(len, note.size()); ++i) out.samples[begin + i] += note[i];
    }
    out.segment_ranges.emplace_back(begin, begin + len);
  }
  return out;
}

std::vector<double> make_interference(InterferenceKind kind, double sample_rate, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  switch (kind) {
    case InterferenceKind::Cough: {
      // Two formant-like noise bands with a fast attack and a decaying tail.
      const size_t n = samples_for(0.28, sample_rate);
      const auto noise = white_noise(n, rng);
      auto bp1 = make_biquad(FilterType::Bandpass, 450.0, 2.0, sample_rate);
      auto bp2 = make_biquad(FilterType::Bandpass, 1600.0, 1.5, sample_rate);
      out.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double env = std::min(1.0, t / 0.015) * std::exp(-t / 0.08);
        out[i] = env * (bp1.process(noise[i]) + 0.7 * bp2.process(noise[i]));
      }
      break;
    }
    case InterferenceKind::DoorSlam: {
      // Low thump with a broadband click at impact.
      const size_t n = samples_for(0.3, sample_rate);
      const auto noise = white_noise(n, rng);
      auto lp = make_biquad(FilterType::Lowpass, 250.0, 0.7, sample_rate);
      out.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double body = std::exp(-t / 0.07) *
                            (std::sin(kTwoPi * 68.0 * t) + 0.6 * std::sin(kTwoPi * 115.0 * t));
        const double click = std::exp(-t / 0.004) * noise[i];
        out[i] = body + 2.0 * lp.process(noise[i]) * std::exp(-t / 0.05) + 0.5 * click;
      }
      break;
    }
    case InterferenceKind::ChairDrag: {
      // High-passed noise, amplitude-modulated like a scrape.
      const size_t n = samples_for(0.32, sample_rate);
      const auto noise = white_noise(n, rng);
      auto hp = make_biquad(FilterType::Highpass, 900.0, 0.7, sample_rate);
      std::uniform_real_distribution<double> rate(22.0, 35.0);
      const double mod = rate(rng);
      out.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double edge = std::min({1.0, t / 0.02, (0.32 - t) / 0.02});
        const double am = 0.55 + 0.45 * std::sin(kTwoPi * mod * t);
        out[i] = std::max(edge, 0.0) * am * hp.process(noise[i]);
      }
      break;
    }
    case InterferenceKind::Drop: {
      // A few decaying clicks as the object bounces.
      const size_t n = samples_for(0.26, sample_rate);
      const auto noise = white_noise(n, rng);
      const double onsets[] = {0.0, 0.085, 0.15, 0.2};
      const double gains[] = {1.0, 0.6, 0.4, 0.25};
      out.assign(n, 0.0);
      for (int b = 0; b < 4; ++b) {
        const auto start = samples_for(onsets[b], sample_rate);
        for (size_t i = start; i < n; ++i) {
          const double t = static_cast<double>(i - start) / sample_rate;
          out[i] += gains[b] * std::exp(-t / 0.006) * noise[i];
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace sikam

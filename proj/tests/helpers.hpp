#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "sikam/kam.hpp"

namespace testing {

inline std::vector<double> sine(double freq, double seconds, double sr = 44100.0, double amp = 1.0) {
  std::vector<double> out(static_cast<size_t>(seconds * sr));
  for (size_t n = 0; n < out.size(); ++n)
    out[n] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / sr);
  return out;
}

inline std::vector<double> white_noise(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = g(rng);
  return out;
}

inline double rms(std::span<const double> x, size_t begin = 0, size_t end = 0) {
  if (end == 0) end = x.size();
  double acc = 0.0;
  for (size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

inline int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

inline sikam::MagSpectrogram mag_from(const Eigen::MatrixXd& m) {
  sikam::MagSpectrogram out;
  out.data = m;
  return out;
}

inline sikam::MagSpectrogram mag_from_columns(const std::vector<std::vector<double>>& cols) {
  sikam::MagSpectrogram out;
  out.data.resize(static_cast<Eigen::Index>(cols.front().size()), static_cast<Eigen::Index>(cols.size()));
  for (size_t t = 0; t < cols.size(); ++t)
    for (size_t f = 0; f < cols[t].size(); ++f)
      out.data(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t)) = cols[t][f];
  return out;
}

inline std::vector<int> range(int n) {
  std::vector<int> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = i;
  return out;
}

}  // namespace testing

#include "oracles.hpp"

namespace testing {

// Frame 0 is a harmonic tone at bin ~90 with additive noise; frame i >= 1 is
// the tone transposed by pitch_offset[i] bins (d in [-24, 24], d != 0), each
// with its own small timbre and noise perturbation so that the ranking is
// not decided by ties.
struct TranspositionSuite {
  sikam::MagSpectrogram mag;
  std::vector<int> pitch_offset;
};

inline std::vector<double> perturbed_tone(int bins, double p0, std::mt19937_64& rng, double noise) {
  std::uniform_real_distribution<double> amp(0.8, 1.2);
  std::uniform_real_distribution<double> u(0.0, noise);
  std::vector<double> col(static_cast<size_t>(bins), 0.0);
  for (int h = 1; h <= 8; ++h) {
    const double a = amp(rng) / h;
    const double pos = p0 + 24.0 * std::log2(h);
    for (int f = 0; f < bins; ++f) {
      const double d = (f - pos) / 1.2;
      col[static_cast<size_t>(f)] += a * std::exp(-0.5 * d * d);
    }
  }
  for (auto& v : col) v += u(rng);
  return col;
}

inline TranspositionSuite transposition_suite(uint64_t seed, int bins = 240) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  const double base = 90.0 + jitter(rng);
  TranspositionSuite s;
  std::vector<std::vector<double>> cols{perturbed_tone(bins, base, rng, 0.05)};
  s.pitch_offset.push_back(0);
  for (int d = -24; d <= 24; ++d) {
    if (d == 0) continue;
    cols.push_back(perturbed_tone(bins, base + d, rng, 0.02));
    s.pitch_offset.push_back(d);
  }
  s.mag = mag_from_columns(cols);
  return s;
}

}  // namespace testing

namespace testing {

// Harmonic column and its transposed copy with additive noise at the given
// SNR, clipped at zero. Returns (target, candidate).
struct DeconvPair {
  std::vector<double> y;
  std::vector<double> z;
};

inline DeconvPair deconv_pair(std::mt19937_64& rng, int bins = 240, double snr_db = 20.0) {
  std::uniform_real_distribution<double> pos(30.0, 110.0);
  std::uniform_int_distribution<int> shift(-24, 24);
  std::uniform_real_distribution<double> width(0.8, 1.6);
  std::uniform_int_distribution<int> partials(3, 10);
  const double p0 = pos(rng), w = width(rng);
  const int np = partials(rng);
  DeconvPair out{oracle::harmonic_column(bins, p0, w, np), oracle::harmonic_column(bins, p0 + shift(rng), w, np)};
  double energy = 0.0;
  for (double v : out.z) energy += v * v;
  std::normal_distribution<double> g(0.0, std::sqrt(energy / bins / std::pow(10.0, snr_db / 10.0)));
  for (auto& v : out.z) v = std::max(0.0, v + g(rng));
  return out;
}

}  // namespace testing

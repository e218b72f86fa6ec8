#include "sikam/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "sikam/error.hpp"
#include "sikam/shiftkam.hpp"
#include "sikam/specmurt.hpp"

namespace sikam {
namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

MagSpectrogram bench_spectrogram(int bins, int frames, uint64_t seed) {
  if (bins < 8 || frames < 2) throw InvalidArgument("bench_spectrogram: size too small");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pitch(0.1 * bins, 0.5 * bins);
  std::uniform_real_distribution<double> noise(0.0, 0.02);
  MagSpectrogram mag;
  mag.data.resize(bins, frames);
  for (int t = 0; t < frames; ++t) {
    const double p0 = pitch(rng);
    for (int f = 0; f < bins; ++f) {
      double v = noise(rng);
      for (int h = 1; h <= 8; ++h) {
        const double pos = p0 + 24.0 * std::log2(h);
        const double d = (f - pos) / 1.2;
        v += std::exp(-0.5 * d * d) / h;
      }
      mag.data(f, t) = v;
    }
  }
  return mag;
}

BenchRow bench_variant(const BenchSize& size, Variant variant, int k, uint64_t seed, int repeats) {
  if (repeats < 1) throw InvalidArgument("bench_variant: repeats must be >= 1");
  if (k < 1 || k >= size.frames) throw InvalidArgument("bench_variant: K must lie in [1, T)");
  const auto mag = bench_spectrogram(size.bins, size.frames, seed);
  std::vector<int> all(static_cast<size_t>(size.frames));
  std::iota(all.begin(), all.end(), 0);
  const int surplus = variant == Variant::SpecmurtPruned ? std::min(2 * k, size.frames - 1 - k) : 0;

  BenchRow row{size, variant, k, std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()};
  volatile double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    std::vector<NeighborSet> nsets;
    nsets.reserve(all.size());
    const auto start = Clock::now();
    switch (variant) {
      case Variant::Baseline:
        for (const int t : all) nsets.push_back(knn_baseline(mag, t, all, k));
        break;
      case Variant::ShiftExhaustive:
        for (const int t : all) nsets.push_back(knn_shift_exhaustive(mag, t, all, k, size.delta));
        break;
      case Variant::Specmurt:
      case Variant::SpecmurtPruned: {
        const SpecmurtCache cache(mag, 1);
        for (const int t : all)
          nsets.push_back(knn_specmurt_pruned(mag, cache, t, all, k, surplus, size.delta));
        break;
      }
    }
    const auto mid = Clock::now();
    for (const auto& nset : nsets) sink = sink + median_estimate(mag, nset)(0);
    const auto end = Clock::now();
    row.similarity_s = std::min(row.similarity_s, std::chrono::duration<double>(mid - start).count());
    row.estimation_s = std::min(row.estimation_s, std::chrono::duration<double>(end - mid).count());
  }
  return row;
}

double scaling_slope(const BenchRow& a, const BenchRow& b, bool use_total) {
  const double ta = use_total ? a.total_s() : a.similarity_s;
  const double tb = use_total ? b.total_s() : b.similarity_s;
  const auto& sa = a.size;
  const auto& sb = b.size;
  if (a.variant != b.variant || sa.bins != sb.bins) return std::numeric_limits<double>::quiet_NaN();
  if (sa.frames != sb.frames && sa.delta == sb.delta)
    return std::log(tb / ta) / std::log(static_cast<double>(sb.frames) / sa.frames);
  if (sa.delta != sb.delta && sa.frames == sb.frames)
    return std::log(tb / ta) /
           std::log(static_cast<double>(2 * sb.delta + 1) / (2 * sa.delta + 1));
  return std::numeric_limits<double>::quiet_NaN();
}

void write_bench_table(std::ostream& os, std::span<const BenchRow> rows) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %6s %6s %6s %5s %14s %14s %14s\n", "variant", "F", "T",
                "delta", "K", "similarity_s", "estimation_s", "total_s");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-16s %6d %6d %6d %5d %14.6f %14.6f %14.6f\n",
                  std::string(to_string(r.variant)).c_str(), r.size.bins, r.size.frames,
                  r.size.delta, r.k, r.similarity_s, r.estimation_s, r.total_s());
    os << buf;
  }
}

}  // namespace sikam

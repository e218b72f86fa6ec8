#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sikam/kam.hpp"

namespace sikam {

struct BenchSize {
  int bins = 232;
  int frames = 200;
  int delta = 12;
};

struct BenchRow {
  BenchSize size;
  Variant variant = Variant::Baseline;
  int k = 0;
  // Neighbour search for every frame against all others (for the specmurt
  // variants this includes the specmurt transform and shift estimation).
  double similarity_s = 0.0;
  // Median estimation for every frame.
  double estimation_s = 0.0;
  double total_s() const { return similarity_s + estimation_s; }
};

// Random harmonic magnitude frames with noise, reproducible from the seed.
MagSpectrogram bench_spectrogram(int bins, int frames, uint64_t seed);

// Runs the kernel of `variant` with every frame as the target. Timings are
// the minimum over `repeats` runs.
BenchRow bench_variant(const BenchSize& size, Variant variant, int k, uint64_t seed, int repeats = 3);

// Log-log slope of time against the single parameter that differs between
// two rows (T or delta); NaN when they differ in anything else.
double scaling_slope(const BenchRow& a, const BenchRow& b, bool use_total);

void write_bench_table(std::ostream& os, std::span<const BenchRow> rows);

}  // namespace sikam

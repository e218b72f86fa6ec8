#include "sikam/shiftkam.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "sikam/error.hpp"

namespace sikam {

std::vector<double> shift_frame(std::span<const double> col, int delta) {
  const int n = static_cast<int>(col.size());
  if (std::abs(delta) > n) throw InvalidArgument("shift_frame: |delta| exceeds the column length");
  std::vector<double> out(col.size(), 0.0);
  for (int f = 0; f < n; ++f) {
    const int src = f + delta;
    if (src >= 0 && src < n) out[static_cast<size_t>(f)] = col[static_cast<size_t>(src)];
  }
  return out;
}

double shifted_squared_distance(std::span<const double> target, std::span<const double> candidate,
                                int delta) {
  if (target.size() != candidate.size())
    throw InvalidArgument("shifted_squared_distance: length mismatch");
  const int n = static_cast<int>(target.size());
  // Bins f with f + delta inside the column compare against the candidate,
  // the rest against zero. Summed in ascending f for every delta.
  const int lo = std::clamp(-delta, 0, n);
  const int hi = std::clamp(n - delta, lo, n);
  double acc = 0.0;
  for (int f = 0; f < lo; ++f) acc += target[static_cast<size_t>(f)] * target[static_cast<size_t>(f)];
  for (int f = lo; f < hi; ++f) {
    const double d = target[static_cast<size_t>(f)] - candidate[static_cast<size_t>(f + delta)];
    acc += d * d;
  }
  for (int f = hi; f < n; ++f) acc += target[static_cast<size_t>(f)] * target[static_cast<size_t>(f)];
  return acc;
}

Neighbor best_shift(std::span<const double> target, std::span<const double> candidate,
                    int candidate_frame, int max_shift) {
  Neighbor best{candidate_frame, 0, shifted_squared_distance(target, candidate, 0)};
  for (int m = 1; m <= max_shift; ++m) {
    for (const int delta : {-m, m}) {
      const Neighbor nb{candidate_frame, delta, shifted_squared_distance(target, candidate, delta)};
      if (neighbor_less(nb, best)) best = nb;
    }
  }
  return best;
}

NeighborSet knn_shift_exhaustive(const MagSpectrogram& mag, int target,
                                 std::span<const int> candidates, int k, int max_shift) {
  if (target < 0 || target >= mag.num_frames()) throw InvalidArgument("target frame out of range");
  if (k < 1) throw InvalidArgument("K must be >= 1");
  if (max_shift < 0 || max_shift > mag.num_bins())
    throw InvalidArgument("max shift must lie in [0, F]");
  const auto bins = static_cast<size_t>(mag.num_bins());
  const std::span<const double> tcol(mag.data.col(target).data(), bins);
  std::vector<Neighbor> all;
  all.reserve(candidates.size());
  for (const int c : candidates) {
    if (c == target) continue;
    if (c < 0 || c >= mag.num_frames()) throw InvalidArgument("candidate frame out of range");
    all.push_back(best_shift(tcol, {mag.data.col(c).data(), bins}, c, max_shift));
  }
  if (static_cast<int>(all.size()) < k)
    throw InfeasibleConfig("fewer candidate frames (" + std::to_string(all.size()) +
                           ") than K = " + std::to_string(k));
  std::partial_sort(all.begin(), all.begin() + k, all.end(), neighbor_less);
  all.resize(static_cast<size_t>(k));
  return {target, std::move(all)};
}

}  // namespace sikam

#include "sikam/specmurt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sikam/error.hpp"
#include "sikam/fft.hpp"
#include "sikam/shiftkam.hpp"

namespace sikam {
namespace {

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

int kept_coeffs(int bins, int drop_head) {
  if (drop_head < 0) throw InvalidArgument("drop_head must be >= 0");
  const int kept = bins / 2 + 1 - drop_head;
  if (kept < 1) throw InvalidArgument("drop_head leaves no specmurt coefficients");
  return kept;
}

void specmurt_into(const RealFft& fft, std::span<const double> col, int drop_head,
                   std::span<double> out, std::vector<cdouble>& scratch) {
  fft.forward(col, scratch);
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::abs(scratch[i + static_cast<size_t>(drop_head)]);
}

}  // namespace

SpecmurtFrame specmurt_transform(std::span<const double> col, int drop_head) {
  const int bins = static_cast<int>(col.size());
  if (bins < 1) throw InvalidArgument("specmurt_transform: empty column");
  const int kept = kept_coeffs(bins, drop_head);
  const auto fft = real_fft(bins);
  std::vector<cdouble> scratch(static_cast<size_t>(fft->spectrum_size()));
  SpecmurtFrame frame{std::vector<double>(static_cast<size_t>(kept)), drop_head};
  specmurt_into(*fft, col, drop_head, frame.coeffs, scratch);
  return frame;
}

SpecmurtCache::SpecmurtCache(const MagSpectrogram& mag, int drop_head) : drop_head_(drop_head) {
  const int bins = mag.num_bins();
  const int kept = kept_coeffs(bins, drop_head);
  const auto fft = real_fft(bins);
  std::vector<cdouble> scratch(static_cast<size_t>(fft->spectrum_size()));
  coeffs_.resize(kept, mag.num_frames());
  for (int t = 0; t < mag.num_frames(); ++t) {
    specmurt_into(*fft, {mag.data.col(t).data(), static_cast<size_t>(bins)}, drop_head,
                  {coeffs_.col(t).data(), static_cast<size_t>(kept)}, scratch);
  }
}

std::vector<RankedFrame> knn_specmurt(const SpecmurtCache& cache, int target,
                                      std::span<const int> candidates, int count) {
  if (target < 0 || target >= cache.num_frames()) throw InvalidArgument("target frame out of range");
  if (count < 1) throw InvalidArgument("count must be >= 1");
  const auto tvec = cache.frame(target);
  std::vector<RankedFrame> all;
  all.reserve(candidates.size());
  for (const int c : candidates) {
    if (c == target) continue;
    if (c < 0 || c >= cache.num_frames()) throw InvalidArgument("candidate frame out of range");
    all.push_back({c, squared_distance(tvec, cache.frame(c))});
  }
  if (static_cast<int>(all.size()) < count)
    throw InfeasibleConfig("fewer candidates (" + std::to_string(all.size()) + ") than requested (" +
                           std::to_string(count) + ")");
  const auto less = [](const RankedFrame& a, const RankedFrame& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.frame < b.frame;
  };
  std::partial_sort(all.begin(), all.begin() + count, all.end(), less);
  all.resize(static_cast<size_t>(count));
  return all;
}

std::vector<RankedFrame> knn_specmurt(const MagSpectrogram& mag, int target,
                                      std::span<const int> candidates, int count, int drop_head) {
  return knn_specmurt(SpecmurtCache(mag, drop_head), target, candidates, count);
}

ShiftEstimate estimate_shift_deconv(std::span<const double> y, std::span<const double> z,
                                    double epsilon) {
  if (y.size() != z.size() || y.empty()) throw InvalidArgument("estimate_shift_deconv: length mismatch");
  if (all_zero(y)) throw InvalidArgument("estimate_shift_deconv: target column is all zero");
  if (all_zero(z)) throw InvalidArgument("estimate_shift_deconv: candidate column is all zero");
  const int n = static_cast<int>(y.size());
  const auto fft = complex_fft(n);

  std::vector<cdouble> yin(y.begin(), y.end()), zin(z.begin(), z.end());
  std::vector<cdouble> iy(static_cast<size_t>(n)), iz(static_cast<size_t>(n));
  fft->backward(yin, iy);
  fft->backward(zin, iz);

  double zmax = 0.0;
  for (const auto& v : iz) zmax = std::max(zmax, std::abs(v));
  if (!(zmax > 0.0)) throw InvalidArgument("estimate_shift_deconv: candidate column is numerically zero");
  const double eps2 = (epsilon * zmax) * (epsilon * zmax);

  std::vector<cdouble> ratio(static_cast<size_t>(n)), h(static_cast<size_t>(n));
  for (size_t i = 0; i < ratio.size(); ++i) ratio[i] = iy[i] * std::conj(iz[i]) / (std::norm(iz[i]) + eps2);
  fft->forward(ratio, h);
  // Undo the unnormalized transform pair so that y == z gives h(0) = 1.
  for (auto& v : h) v /= static_cast<double>(n);

  int peak = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(h[static_cast<size_t>(i)]) > std::abs(h[static_cast<size_t>(peak)])) peak = i;
  double second = 0.0;
  bool have_second = false;
  for (int i = 0; i < n; ++i) {
    const int dist = std::min(std::abs(i - peak), n - std::abs(i - peak));
    if (dist <= 1) continue;
    second = std::max(second, std::abs(h[static_cast<size_t>(i)]));
    have_second = true;
  }

  // The peak sits at lag -delta: y(f) = z(f + delta) puts h's impulse at -delta.
  const int lag = peak < (n + 1) / 2 ? peak : peak - n;
  ShiftEstimate est;
  est.delta = -lag;
  if (est.delta >= (n + 1) / 2) est.delta -= n;  // keep within [-F/2, F/2)
  est.peak_value = std::abs(h[static_cast<size_t>(peak)]);
  est.peak_ratio = !have_second ? std::numeric_limits<double>::infinity()
                   : second > 0.0 ? est.peak_value / second
                                  : std::numeric_limits<double>::infinity();
  return est;
}

NeighborSet knn_specmurt_pruned(const MagSpectrogram& mag, const SpecmurtCache& cache, int target,
                                std::span<const int> candidates, int k, int p, int max_shift,
                                const AlignmentOptions& options) {
  if (k < 1) throw InvalidArgument("K must be >= 1");
  if (p < 0) throw InvalidArgument("P must be >= 0");
  if (max_shift < 0) throw InvalidArgument("max shift must be >= 0");
  const auto pool = knn_specmurt(cache, target, candidates, k + p);

  const auto bins = static_cast<size_t>(mag.num_bins());
  const std::span<const double> tcol(mag.data.col(target).data(), bins);
  const bool target_silent = all_zero(tcol);
  std::vector<Neighbor> aligned;
  aligned.reserve(pool.size());
  for (const auto& cand : pool) {
    const std::span<const double> ccol(mag.data.col(cand.frame).data(), bins);
    int delta = 0;
    if (!target_silent && !all_zero(ccol)) {
      delta = estimate_shift_deconv(tcol, ccol, options.deconv_epsilon).delta;
      if (options.clamp_shift) delta = std::clamp(delta, -max_shift, max_shift);
    }
    aligned.push_back({cand.frame, delta, shifted_squared_distance(tcol, ccol, delta)});
  }
  std::partial_sort(aligned.begin(), aligned.begin() + k, aligned.end(), neighbor_less);
  aligned.resize(static_cast<size_t>(k));
  return {target, std::move(aligned)};
}

}  // namespace sikam

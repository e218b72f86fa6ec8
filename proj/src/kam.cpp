#include "sikam/kam.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "sikam/error.hpp"

namespace sikam {

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.frame != b.frame) return a.frame < b.frame;
  const int abs_a = std::abs(a.shift), abs_b = std::abs(b.shift);
  if (abs_a != abs_b) return abs_a < abs_b;
  return a.shift < b.shift;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::ShiftExhaustive: return "shift";
    case Variant::Specmurt: return "specmurt";
    case Variant::SpecmurtPruned: return "specmurt-pruned";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "baseline") return Variant::Baseline;
  if (name == "shift" || name == "shift_exhaustive" || name == "shift-exhaustive")
    return Variant::ShiftExhaustive;
  if (name == "specmurt") return Variant::Specmurt;
  if (name == "specmurt-pruned" || name == "specmurt_pruned") return Variant::SpecmurtPruned;
  throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

void SeparationConfig::validate(int num_bins, int num_frames) const {
  if (k < 1) throw InvalidArgument("K must be >= 1");
  if (delta < 0) throw InvalidArgument("delta must be >= 0");
  if (delta > num_bins) throw InvalidArgument("delta must not exceed the number of bins");
  if (drop_head < 0) throw InvalidArgument("drop_head must be >= 0");
  if (drop_head >= num_bins / 2 + 1) throw InvalidArgument("drop_head leaves no specmurt coefficients");
  for (size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= num_frames)
      throw InvalidArgument("support frame " + std::to_string(support[i]) + " out of range");
    if (i > 0 && support[i] <= support[i - 1])
      throw InvalidArgument("support must be strictly ascending");
  }
  const int pool = num_frames - static_cast<int>(support.size());
  if (!support.empty() && pool < k)
    throw InfeasibleConfig("candidate pool (" + std::to_string(pool) + " frames) is smaller than K = " +
                           std::to_string(k));
}

std::vector<int> candidate_pool(int num_frames, std::span<const int> support) {
  std::vector<int> pool;
  pool.reserve(static_cast<size_t>(num_frames));
  size_t s = 0;
  for (int t = 0; t < num_frames; ++t) {
    while (s < support.size() && support[s] < t) ++s;
    if (s < support.size() && support[s] == t) continue;
    pool.push_back(t);
  }
  return pool;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("squared_distance: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

namespace {

std::span<const double> column(const MagSpectrogram& mag, int t) {
  return {mag.data.col(t).data(), static_cast<size_t>(mag.data.rows())};
}

}  // namespace

NeighborSet knn_baseline(const MagSpectrogram& mag, int target, std::span<const int> candidates,
                         int k) {
  if (target < 0 || target >= mag.num_frames()) throw InvalidArgument("target frame out of range");
  if (k < 1) throw InvalidArgument("K must be >= 1");
  const auto tcol = column(mag, target);
  std::vector<Neighbor> all;
  all.reserve(candidates.size());
  for (const int c : candidates) {
    if (c == target) continue;
    if (c < 0 || c >= mag.num_frames()) throw InvalidArgument("candidate frame out of range");
    all.push_back({c, 0, squared_distance(tcol, column(mag, c))});
  }
  if (static_cast<int>(all.size()) < k)
    throw InfeasibleConfig("fewer candidates (" + std::to_string(all.size()) + ") than K = " +
                           std::to_string(k));
  std::partial_sort(all.begin(), all.begin() + k, all.end(), neighbor_less);
  all.resize(static_cast<size_t>(k));
  return {target, std::move(all)};
}

Eigen::VectorXd median_estimate(const MagSpectrogram& mag, const NeighborSet& nset) {
  if (nset.neighbors.empty()) throw InvalidArgument("median_estimate: empty neighbour set");
  const int bins = mag.num_bins();
  const size_t k = nset.neighbors.size();
  const size_t mid = (k - 1) / 2;
  Eigen::VectorXd out(bins);
  std::vector<double> values(k);
  for (int f = 0; f < bins; ++f) {
    for (size_t i = 0; i < k; ++i) {
      const auto& nb = nset.neighbors[i];
      const int src = f + nb.shift;
      values[i] = (src >= 0 && src < bins) ? mag.data(src, nb.frame) : 0.0;
    }
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    out(f) = values[mid];
  }
  return out;
}

Eigen::MatrixXd build_soft_mask(const Eigen::MatrixXd& source_estimate,
                                const Eigen::MatrixXd& mixture_mag) {
  if (source_estimate.rows() != mixture_mag.rows() || source_estimate.cols() != mixture_mag.cols())
    throw InvalidArgument("build_soft_mask: dimension mismatch");
  if (source_estimate.size() > 0 &&
      (!(source_estimate.minCoeff() >= 0.0) || !(mixture_mag.minCoeff() >= 0.0)))
    throw InvalidArgument("build_soft_mask: magnitudes must be nonnegative");
  Eigen::MatrixXd mask(source_estimate.rows(), source_estimate.cols());
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      const double s = source_estimate(i, j);
      const double n = std::max(mixture_mag(i, j) - s, 0.0);
      const double den = n + s;
      mask(i, j) = den > 0.0 ? s / den : 0.0;
    }
  }
  return mask;
}

}  // namespace sikam

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sikam/timefreq.hpp"

namespace sikam {

struct Neighbor {
  int frame = 0;
  // Read offset in bins: neighbour value for output bin f is mag(f + shift, frame).
  int shift = 0;
  // Squared Euclidean distance to the target frame after shifting.
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Ascending (distance, frame, |shift|, shift).
bool neighbor_less(const Neighbor& a, const Neighbor& b);

struct NeighborSet {
  int target_frame = 0;
  std::vector<Neighbor> neighbors;  // sorted by neighbor_less, size K

  int size() const { return static_cast<int>(neighbors.size()); }
};

enum class Variant {
  Baseline,         // K-NN over whole frames, no shifts
  ShiftExhaustive,  // K-NN over all shifts in [-delta, delta]
  Specmurt,         // specmurt pre-selection of K frames + deconvolution alignment
  SpecmurtPruned,   // specmurt pre-selection of K + P frames, re-ranked after alignment
};

std::string_view to_string(Variant v);
// Accepts "baseline", "shift", "shift_exhaustive", "specmurt", "specmurt-pruned",
// "specmurt_pruned".
Variant parse_variant(std::string_view name);

struct SeparationConfig {
  int k = 300;
  int delta = 48;
  // Pruning surplus; negative selects 2 * k.
  int p = -1;
  Variant variant = Variant::Baseline;
  // Interfered frame indices.
  std::vector<int> support;
  // Leading specmurt coefficients ignored in the similarity search.
  int drop_head = 1;
  // Clamp deconvolution shifts to [-delta, delta].
  bool clamp_shift = true;
  // Regularization of the deconvolution, relative to max |IF(Z)|.
  double deconv_epsilon = 1e-2;

  int surplus() const { return p < 0 ? 2 * k : p; }

  // Throws InvalidArgument / InfeasibleConfig.
  void validate(int num_bins, int num_frames) const;
};

// Frames outside the support, ascending.
std::vector<int> candidate_pool(int num_frames, std::span<const int> support);

// Sum of squared differences; both columns must have the same length.
double squared_distance(std::span<const double> a, std::span<const double> b);

NeighborSet knn_baseline(const MagSpectrogram& mag, int target, std::span<const int> candidates,
                         int k);

// Per-bin lower median over the neighbours, shifts applied with zero padding.
Eigen::VectorXd median_estimate(const MagSpectrogram& mag, const NeighborSet& nset);

// S / (N + S) with N = max(X - S, 0); 0 where N + S = 0.
Eigen::MatrixXd build_soft_mask(const Eigen::MatrixXd& source_estimate,
                                const Eigen::MatrixXd& mixture_mag);

struct StageTimings {
  double specmurt_precompute_s = 0.0;
  double similarity_s = 0.0;
  double estimation_s = 0.0;
};

struct SeparationResult {
  ComplexSpectrogram source;
  ComplexSpectrogram interference;
  Eigen::MatrixXd mask;  // F x T, ones outside the support
  std::vector<NeighborSet> neighbors;  // one per support frame, in support order
  StageTimings timings;
};

// Neighbour sets for every support frame of a magnitude spectrogram.
std::vector<NeighborSet> find_neighbors(const MagSpectrogram& mag, const SeparationConfig& config,
                                        StageTimings* timings = nullptr);

SeparationResult separate(const ComplexSpectrogram& spect, const SeparationConfig& config);

// Multichannel separation: neighbour sets are searched once on the
// channel-mean magnitude and shared; estimates and masks are per channel.
std::vector<SeparationResult> separate_channels(std::span<const ComplexSpectrogram> channels,
                                                const SeparationConfig& config);

}  // namespace sikam

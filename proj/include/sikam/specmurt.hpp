#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sikam/kam.hpp"

namespace sikam {

// Modulus of the DFT of one log-frequency magnitude column, coefficients
// drop_head .. floor(F/2). Invariant to circular translation of the column.
struct SpecmurtFrame {
  std::vector<double> coeffs;
  int dropped_head = 0;
};

SpecmurtFrame specmurt_transform(std::span<const double> col, int drop_head = 1);

// Specmurt vectors of every frame, computed once.
class SpecmurtCache {
 public:
  SpecmurtCache(const MagSpectrogram& mag, int drop_head);

  int drop_head() const { return drop_head_; }
  int num_coeffs() const { return static_cast<int>(coeffs_.rows()); }
  int num_frames() const { return static_cast<int>(coeffs_.cols()); }
  std::span<const double> frame(int t) const {
    return {coeffs_.col(t).data(), static_cast<size_t>(coeffs_.rows())};
  }

 private:
  int drop_head_;
  Eigen::MatrixXd coeffs_;
};

struct RankedFrame {
  int frame = 0;
  double distance = 0.0;
};

// `count` candidates closest to the target in the specmurt domain, ascending
// (distance, frame). The target itself is never returned.
std::vector<RankedFrame> knn_specmurt(const SpecmurtCache& cache, int target,
                                      std::span<const int> candidates, int count);
std::vector<RankedFrame> knn_specmurt(const MagSpectrogram& mag, int target,
                                      std::span<const int> candidates, int count, int drop_head = 1);

struct ShiftEstimate {
  // shift_frame(z, delta) aligns z with y.
  int delta = 0;
  double peak_value = 0.0;
  // Peak over the largest value outside the peak's immediate neighbours.
  double peak_ratio = 0.0;
};

// Fast deconvolution y = h * z through the Fourier domain,
// h = F( IF(y) conj(IF(z)) / (|IF(z)|^2 + eps^2) ) with eps = epsilon * max|IF(z)|.
// The peak of |h| is read as a signed circular lag in [-F/2, F/2).
ShiftEstimate estimate_shift_deconv(std::span<const double> y, std::span<const double> z,
                                    double epsilon = 1e-2);

struct AlignmentOptions {
  bool clamp_shift = true;
  double deconv_epsilon = 1e-2;
};

// Specmurt pre-selection of k + p frames, deconvolution alignment of each,
// then the k best by true shifted distance. p = 0 gives the unpruned variant.
NeighborSet knn_specmurt_pruned(const MagSpectrogram& mag, const SpecmurtCache& cache, int target,
                                std::span<const int> candidates, int k, int p, int max_shift,
                                const AlignmentOptions& options = {});

}  // namespace sikam

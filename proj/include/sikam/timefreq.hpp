#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sikam {

using cdouble = std::complex<double>;

enum class WindowPolicy {
  // Each log bin integrates the linear bins within one log-bin spacing.
  Fixed,
  // Bandwidth grows as alpha * f + gamma, as in constant-Q toolboxes.
  PerBin,
};

struct TransformParams {
  double sample_rate = 44100.0;
  int bins_per_octave = 24;
  double f_min = 27.5;
  // 0 selects sample_rate / 2.
  double f_max = 0.0;
  int hop = 512;
  int window_length = 4096;
  WindowPolicy window_policy = WindowPolicy::Fixed;
  // Bandwidth offset in Hz; only used by WindowPolicy::PerBin.
  double gamma = 20.0;

  double max_frequency() const { return f_max > 0.0 ? f_max : sample_rate / 2.0; }
  // ceil(bins_per_octave * log2(f_max / f_min))
  int num_bins() const;
  int num_linear_bins() const { return window_length / 2 + 1; }
  double bin_frequency(int k) const;
  int num_frames(size_t signal_length) const;
  // Throws InvalidArgument.
  void validate() const;

  bool operator==(const TransformParams&) const = default;
};

// Fixed sparse mapping from the linear STFT grid onto the geometric grid,
// together with its pseudo-inverse and a normalized transpose that carries
// masks back to the linear grid. Built once per TransformParams and shared.
class LogFrequencyMap {
 public:
  struct Tap {
    int index;
    double weight;
  };

  explicit LogFrequencyMap(const TransformParams& params);

  static std::shared_ptr<const LogFrequencyMap> get(const TransformParams& params);

  const TransformParams& params() const { return params_; }
  int num_log_bins() const { return static_cast<int>(rows_.size()); }
  int num_linear_bins() const { return static_cast<int>(columns_.size()); }

  // Linear-grid taps feeding log bin k.
  std::span<const Tap> row(int k) const { return rows_[static_cast<size_t>(k)]; }

  // F x N_lin -> F x T
  Eigen::MatrixXcd to_log(const Eigen::MatrixXcd& linear) const;
  // Least-squares lift of log coefficients onto the linear grid.
  Eigen::MatrixXcd lift(const Eigen::MatrixXcd& log) const;
  // Weighted average of the log-bin mask values that feed each linear bin.
  // A mask of ones maps to exactly ones.
  Eigen::MatrixXd back_map_mask(const Eigen::MatrixXd& mask) const;

  Eigen::MatrixXd dense() const;
  const Eigen::MatrixXd& pseudo_inverse() const { return pinv_; }

 private:
  TransformParams params_;
  std::vector<std::vector<Tap>> rows_;     // per log bin
  std::vector<std::vector<Tap>> columns_;  // per linear bin, log-bin taps for back-mapping
  Eigen::MatrixXd pinv_;                   // N_lin x F
};

// Log-frequency coefficients plus the linear-grid detail that the log grid
// cannot represent. inverse_logfreq(forward_logfreq(x)) == x up to rounding.
struct ComplexSpectrogram {
  TransformParams params;
  Eigen::MatrixXcd data;      // F x T
  Eigen::MatrixXcd residual;  // N_lin x T
  std::vector<double> frame_times;
  size_t signal_length = 0;

  int num_bins() const { return static_cast<int>(data.rows()); }
  int num_frames() const { return static_cast<int>(data.cols()); }
};

struct MagSpectrogram {
  TransformParams params;
  Eigen::MatrixXd data;  // F x T, nonnegative

  int num_bins() const { return static_cast<int>(data.rows()); }
  int num_frames() const { return static_cast<int>(data.cols()); }
};

// Periodic Hann window, frames centred on t * hop with zero padding at the
// signal edges; each frame is rotated to zero phase before the FFT.
Eigen::MatrixXcd stft(std::span<const double> signal, const TransformParams& params);
std::vector<double> istft(const Eigen::MatrixXcd& linear, const TransformParams& params,
                          size_t signal_length);

ComplexSpectrogram forward_logfreq(std::span<const double> signal, const TransformParams& params);
std::vector<double> inverse_logfreq(const ComplexSpectrogram& spect);

MagSpectrogram magnitude(const ComplexSpectrogram& spect);

// Elementwise mask on the log coefficients; the residual is masked with the
// back-mapped mask. Entries must lie in [0, 1].
ComplexSpectrogram apply_mask(const ComplexSpectrogram& spect, const Eigen::MatrixXd& mask);
std::vector<double> apply_mask_and_resynthesize(const ComplexSpectrogram& spect,
                                                const Eigen::MatrixXd& mask);

// Frames whose analysis window has nonzero weight on any sample in
// [begin, end). Sorted ascending.
std::vector<int> frames_overlapping(const TransformParams& params, int num_frames, size_t begin,
                                    size_t end);
// Frames touched by [begin_s, end_s] given in seconds.
std::vector<int> frames_overlapping_seconds(const TransformParams& params, int num_frames,
                                            double begin_s, double end_s);

}  // namespace sikam

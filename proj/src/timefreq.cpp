#include "sikam/timefreq.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "sikam/error.hpp"
#include "sikam/fft.hpp"

namespace sikam {
namespace {

// Spectrum of the zero-phase Hann window at an offset of nu linear bins,
// normalized to 1 at nu = 0. Exact at integer offsets.
double hann_kernel(double nu) {
  const double a = std::abs(nu);
  if (a < 1e-9) return 1.0;
  if (std::abs(a - 1.0) < 1e-9) return 0.5;
  const double x = std::numbers::pi * nu;
  return std::sin(x) / (x * (1.0 - nu * nu));
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

void check_mask(const ComplexSpectrogram& spect, const Eigen::MatrixXd& mask) {
  if (mask.rows() != spect.data.rows() || mask.cols() != spect.data.cols())
    throw InvalidArgument("mask dimensions do not match the spectrogram");
  if (mask.size() > 0 && (!(mask.minCoeff() >= 0.0) || !(mask.maxCoeff() <= 1.0)))
    throw InvalidArgument("mask entries must lie in [0, 1]");
}

}  // namespace

int TransformParams::num_bins() const {
  return static_cast<int>(std::ceil(bins_per_octave * std::log2(max_frequency() / f_min) - 1e-9));
}

double TransformParams::bin_frequency(int k) const {
  return f_min * std::exp2(static_cast<double>(k) / bins_per_octave);
}

int TransformParams::num_frames(size_t signal_length) const {
  if (signal_length == 0) return 0;
  return static_cast<int>((signal_length - 1) / static_cast<size_t>(hop)) + 1;
}

void TransformParams::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample_rate must be positive");
  if (bins_per_octave < 1) throw InvalidArgument("bins_per_octave must be >= 1");
  if (!(f_min > 0.0)) throw InvalidArgument("f_min must be positive");
  if (max_frequency() > sample_rate / 2.0 + 1e-9)
    throw InvalidArgument("f_max must not exceed sample_rate / 2");
  if (!(max_frequency() > f_min)) throw InvalidArgument("f_max must exceed f_min");
  if (window_length < 8 || window_length % 2 != 0)
    throw InvalidArgument("window_length must be even and >= 8");
  if (hop < 1 || hop > window_length / 4)
    throw InvalidArgument("hop must lie in [1, window_length / 4]");
  if (window_policy == WindowPolicy::PerBin && gamma < 0.0)
    throw InvalidArgument("gamma must be nonnegative");
}

LogFrequencyMap::LogFrequencyMap(const TransformParams& params) : params_(params) {
  params.validate();
  const int num_log = params.num_bins();
  const int num_lin = params.num_linear_bins();
  const double df = params.sample_rate / params.window_length;
  const double bpo = params.bins_per_octave;
  const double alpha = std::exp2(1.0 / bpo) - std::exp2(-1.0 / bpo);

  rows_.resize(static_cast<size_t>(num_log));
  for (int k = 0; k < num_log; ++k) {
    const double fc = params.bin_frequency(k);
    const double centre = fc / df;
    auto& taps = rows_[static_cast<size_t>(k)];

    // Triangular response, one log-bin wide on either side (or the per-bin
    // bandwidth), over the linear bins it covers.
    for (int j = 1; j < num_lin; ++j) {
      double w = 0.0;
      if (params.window_policy == WindowPolicy::Fixed) {
        w = 1.0 - std::abs(bpo * std::log2(j * df / fc));
      } else {
        const double half_width = 0.5 * (alpha * fc + params.gamma);
        w = 1.0 - std::abs(j * df - fc) / half_width;
      }
      if (w > 0.0) taps.push_back({j, w});
    }
    // Where the geometric grid is finer than the linear one, interpolate.
    if (taps.size() < 2) {
      taps.clear();
      const int j0 = std::min(static_cast<int>(std::floor(centre)), num_lin - 2);
      const double a = centre - j0;
      taps.push_back({j0, 1.0 - a});
      taps.push_back({j0 + 1, a});
    }
    // Unit response to a sinusoid at the bin's centre frequency.
    double response = 0.0;
    for (const auto& tap : taps) response += tap.weight * hann_kernel(tap.index - centre);
    for (auto& tap : taps) tap.weight /= response;
  }

  columns_.resize(static_cast<size_t>(num_lin));
  for (int k = 0; k < num_log; ++k)
    for (const auto& tap : rows_[static_cast<size_t>(k)])
      if (tap.weight > 0.0) columns_[static_cast<size_t>(tap.index)].push_back({k, tap.weight});
  for (int j = 0; j < num_lin; ++j) {
    auto& col = columns_[static_cast<size_t>(j)];
    if (!col.empty()) continue;
    const double f = j * df;
    const int nearest = f <= params.f_min ? 0 : num_log - 1;
    col.push_back({nearest, 1.0});
  }

  const Eigen::MatrixXd m = dense();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() > 0 ? 1e-8 * sv(0) : 0.0;
  Eigen::VectorXd inv_sv = sv;
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > tol ? 1.0 / sv(i) : 0.0;
  pinv_ = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

std::shared_ptr<const LogFrequencyMap> LogFrequencyMap::get(const TransformParams& params) {
  static std::mutex m;
  static std::vector<std::shared_ptr<const LogFrequencyMap>> cache;
  std::lock_guard lock(m);
  for (const auto& entry : cache)
    if (entry->params() == params) return entry;
  cache.push_back(std::make_shared<const LogFrequencyMap>(params));
  return cache.back();
}

Eigen::MatrixXd LogFrequencyMap::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(num_log_bins(), num_linear_bins());
  for (int k = 0; k < num_log_bins(); ++k)
    for (const auto& tap : row(k)) m(k, tap.index) += tap.weight;
  return m;
}

Eigen::MatrixXcd LogFrequencyMap::to_log(const Eigen::MatrixXcd& linear) const {
  if (linear.rows() != num_linear_bins())
    throw InvalidArgument("to_log: expected " + std::to_string(num_linear_bins()) + " rows");
  Eigen::MatrixXcd out(num_log_bins(), linear.cols());
  for (Eigen::Index t = 0; t < linear.cols(); ++t) {
    for (int k = 0; k < num_log_bins(); ++k) {
      cdouble acc = 0.0;
      for (const auto& tap : row(k)) acc += tap.weight * linear(tap.index, t);
      out(k, t) = acc;
    }
  }
  return out;
}

Eigen::MatrixXcd LogFrequencyMap::lift(const Eigen::MatrixXcd& log) const {
  if (log.rows() != num_log_bins())
    throw InvalidArgument("lift: expected " + std::to_string(num_log_bins()) + " rows");
  const Eigen::MatrixXd re = pinv_ * log.real();
  const Eigen::MatrixXd im = pinv_ * log.imag();
  Eigen::MatrixXcd out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

Eigen::MatrixXd LogFrequencyMap::back_map_mask(const Eigen::MatrixXd& mask) const {
  if (mask.rows() != num_log_bins())
    throw InvalidArgument("back_map_mask: expected " + std::to_string(num_log_bins()) + " rows");
  Eigen::MatrixXd out(num_linear_bins(), mask.cols());
  for (Eigen::Index t = 0; t < mask.cols(); ++t) {
    for (int j = 0; j < num_linear_bins(); ++j) {
      double num = 0.0, den = 0.0;
      for (const auto& tap : columns_[static_cast<size_t>(j)]) {
        num += tap.weight * mask(tap.index, t);
        den += tap.weight;
      }
      out(j, t) = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

Eigen::MatrixXcd stft(std::span<const double> signal, const TransformParams& params) {
  params.validate();
  const int n = params.window_length;
  const int half = n / 2;
  if (signal.size() < static_cast<size_t>(n))
    throw InvalidArgument("signal shorter than one analysis window (" + std::to_string(n) +
                          " samples)");
  const int frames = params.num_frames(signal.size());
  const auto fft = real_fft(n);
  const auto window = hann_window(n);
  const auto len = static_cast<long>(signal.size());

  Eigen::MatrixXcd out(params.num_linear_bins(), frames);
  std::vector<double> rotated(static_cast<size_t>(n));
  for (int t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * params.hop - half;
    for (int i = 0; i < n; ++i) {
      const long s = start + i;
      const double v = (s >= 0 && s < len) ? signal[static_cast<size_t>(s)] * window[static_cast<size_t>(i)] : 0.0;
      rotated[static_cast<size_t>((i + half) % n)] = v;
    }
    fft->forward(rotated, std::span<cdouble>(out.col(t).data(), static_cast<size_t>(out.rows())));
  }
  return out;
}

std::vector<double> istft(const Eigen::MatrixXcd& linear, const TransformParams& params,
                          size_t signal_length) {
  params.validate();
  const int n = params.window_length;
  const int half = n / 2;
  if (linear.rows() != params.num_linear_bins() ||
      linear.cols() != params.num_frames(signal_length))
    throw InvalidArgument("istft: spectrogram shape does not match the signal length");
  const auto fft = real_fft(n);
  const auto window = hann_window(n);
  const auto len = static_cast<long>(signal_length);

  std::vector<double> out(signal_length, 0.0), weight(signal_length, 0.0);
  std::vector<double> rotated(static_cast<size_t>(n));
  for (Eigen::Index t = 0; t < linear.cols(); ++t) {
    fft->inverse(std::span<const cdouble>(linear.col(t).data(), static_cast<size_t>(linear.rows())),
                 rotated);
    const long start = static_cast<long>(t) * params.hop - half;
    for (int i = 0; i < n; ++i) {
      const long s = start + i;
      if (s < 0 || s >= len) continue;
      const double w = window[static_cast<size_t>(i)];
      out[static_cast<size_t>(s)] += w * rotated[static_cast<size_t>((i + half) % n)] / n;
      weight[static_cast<size_t>(s)] += w * w;
    }
  }
  for (size_t s = 0; s < signal_length; ++s) out[s] = weight[s] > 1e-12 ? out[s] / weight[s] : 0.0;
  return out;
}

ComplexSpectrogram forward_logfreq(std::span<const double> signal, const TransformParams& params) {
  const Eigen::MatrixXcd linear = stft(signal, params);
  const auto map = LogFrequencyMap::get(params);
  ComplexSpectrogram spect;
  spect.params = params;
  spect.data = map->to_log(linear);
  spect.residual = linear - map->lift(spect.data);
  spect.signal_length = signal.size();
  spect.frame_times.resize(static_cast<size_t>(linear.cols()));
  for (Eigen::Index t = 0; t < linear.cols(); ++t)
    spect.frame_times[static_cast<size_t>(t)] =
        static_cast<double>(t) * params.hop / params.sample_rate;
  return spect;
}

std::vector<double> inverse_logfreq(const ComplexSpectrogram& spect) {
  const auto& p = spect.params;
  p.validate();
  const int frames = p.num_frames(spect.signal_length);
  if (spect.data.rows() != p.num_bins() || spect.data.cols() != frames ||
      spect.residual.rows() != p.num_linear_bins() || spect.residual.cols() != frames)
    throw InvalidArgument("inverse_logfreq: spectrogram dimensions do not match its parameters");
  const auto map = LogFrequencyMap::get(p);
  const Eigen::MatrixXcd linear = map->lift(spect.data) + spect.residual;
  return istft(linear, p, spect.signal_length);
}

MagSpectrogram magnitude(const ComplexSpectrogram& spect) {
  return MagSpectrogram{spect.params, spect.data.cwiseAbs()};
}

ComplexSpectrogram apply_mask(const ComplexSpectrogram& spect, const Eigen::MatrixXd& mask) {
  check_mask(spect, mask);
  const auto map = LogFrequencyMap::get(spect.params);
  ComplexSpectrogram out = spect;
  out.data = spect.data.cwiseProduct(mask.cast<cdouble>());
  out.residual = spect.residual.cwiseProduct(map->back_map_mask(mask).cast<cdouble>());
  return out;
}

std::vector<double> apply_mask_and_resynthesize(const ComplexSpectrogram& spect,
                                                const Eigen::MatrixXd& mask) {
  return inverse_logfreq(apply_mask(spect, mask));
}

std::vector<int> frames_overlapping(const TransformParams& params, int num_frames, size_t begin,
                                    size_t end) {
  std::vector<int> frames;
  if (begin >= end) return frames;
  const long half = params.window_length / 2;
  const auto b = static_cast<long>(begin);
  const auto e = static_cast<long>(end);
  // Frame t has nonzero window weight on samples t*hop - half + [1, N-1].
  for (int t = 0; t < num_frames; ++t) {
    const long first = static_cast<long>(t) * params.hop - half + 1;
    const long last = static_cast<long>(t) * params.hop + half - 1;
    if (first <= e - 1 && last >= b) frames.push_back(t);
  }
  return frames;
}

std::vector<int> frames_overlapping_seconds(const TransformParams& params, int num_frames,
                                            double begin_s, double end_s) {
  if (!(end_s >= begin_s) || begin_s < 0.0)
    throw InvalidArgument("invalid time range");
  // Tolerate rounding in the seconds -> samples conversion.
  constexpr double slack = 1e-6;
  const auto begin = static_cast<size_t>(std::ceil(begin_s * params.sample_rate - slack));
  const auto end = static_cast<size_t>(std::floor(end_s * params.sample_rate + slack)) + 1;
  return frames_overlapping(params, num_frames, begin, end);
}

}  // namespace sikam

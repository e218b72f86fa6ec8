#include <algorithm>
#include <chrono>
#include <optional>

#include "sikam/error.hpp"
#include "sikam/kam.hpp"
#include "sikam/shiftkam.hpp"
#include "sikam/specmurt.hpp"

namespace sikam {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<NeighborSet> find_neighbors(const MagSpectrogram& mag, const SeparationConfig& config,
                                        StageTimings* timings) {
  config.validate(mag.num_bins(), mag.num_frames());
  std::vector<NeighborSet> out;
  if (config.support.empty()) return out;
  const auto pool = candidate_pool(mag.num_frames(), config.support);
  const int pool_size = static_cast<int>(pool.size());

  std::optional<SpecmurtCache> cache;
  if (config.variant == Variant::Specmurt || config.variant == Variant::SpecmurtPruned) {
    const auto start = Clock::now();
    cache.emplace(mag, config.drop_head);
    if (timings) timings->specmurt_precompute_s += seconds_since(start);
  }
  // The surplus is bounded by what the pool can supply beyond K.
  const int surplus =
      config.variant == Variant::SpecmurtPruned ? std::min(config.surplus(), pool_size - config.k) : 0;
  const AlignmentOptions align{config.clamp_shift, config.deconv_epsilon};

  const auto start = Clock::now();
  out.reserve(config.support.size());
  for (const int target : config.support) {
    switch (config.variant) {
      case Variant::Baseline:
        out.push_back(knn_baseline(mag, target, pool, config.k));
        break;
      case Variant::ShiftExhaustive:
        out.push_back(knn_shift_exhaustive(mag, target, pool, config.k, config.delta));
        break;
      case Variant::Specmurt:
      case Variant::SpecmurtPruned:
        out.push_back(
            knn_specmurt_pruned(mag, *cache, target, pool, config.k, surplus, config.delta, align));
        break;
    }
  }
  if (timings) timings->similarity_s += seconds_since(start);
  return out;
}

std::vector<SeparationResult> separate_channels(std::span<const ComplexSpectrogram> channels,
                                                const SeparationConfig& config) {
  if (channels.empty()) throw InvalidArgument("separate: no channels");
  const auto& first = channels.front();
  for (const auto& ch : channels) {
    if (ch.data.rows() != first.data.rows() || ch.data.cols() != first.data.cols() ||
        !(ch.params == first.params))
      throw InvalidArgument("separate: channel spectrograms differ in shape or parameters");
  }

  std::vector<MagSpectrogram> mags;
  mags.reserve(channels.size());
  for (const auto& ch : channels) mags.push_back(magnitude(ch));
  MagSpectrogram mean = mags.front();
  if (mags.size() > 1) {
    for (size_t c = 1; c < mags.size(); ++c) mean.data += mags[c].data;
    mean.data /= static_cast<double>(mags.size());
  }

  StageTimings timings;
  const auto nsets = find_neighbors(mean, config, &timings);

  std::vector<SeparationResult> results;
  results.reserve(channels.size());
  for (size_t c = 0; c < channels.size(); ++c) {
    const auto start = Clock::now();
    const auto& mag = mags[c];
    Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(mag.num_bins(), mag.num_frames());
    for (const auto& nset : nsets) {
      const Eigen::VectorXd estimate = median_estimate(mag, nset);
      mask.col(nset.target_frame) = build_soft_mask(estimate, mag.data.col(nset.target_frame));
    }
    SeparationResult r;
    r.source = apply_mask(channels[c], mask);
    r.interference = channels[c];
    r.interference.data -= r.source.data;
    r.interference.residual -= r.source.residual;
    r.mask = std::move(mask);
    r.neighbors = nsets;
    r.timings = timings;
    r.timings.estimation_s = std::chrono::duration<double>(Clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

SeparationResult separate(const ComplexSpectrogram& spect, const SeparationConfig& config) {
  auto results = separate_channels(std::span<const ComplexSpectrogram>(&spect, 1), config);
  return std::move(results.front());
}

}  // namespace sikam

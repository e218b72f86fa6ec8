#pragma once

#include <filesystem>
#include <vector>

namespace sikam {

enum class SampleFormat { Pcm16, Float32 };

// Deinterleaved audio; channels[c][n] in [-1, 1] nominal range.
struct AudioBuffer {
  double sample_rate = 44100.0;
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  size_t num_frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

// Reads RIFF/WAVE files holding 16-bit integer or 32-bit float PCM, mono or
// stereo. Anything else raises IoError.
AudioBuffer read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               SampleFormat format = SampleFormat::Float32);

}  // namespace sikam

#include "sikam/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "sikam/error.hpp"

namespace sikam {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::vector<char>& buf, size_t pos) {
  T value;
  std::memcpy(&value, buf.data() + pos, sizeof(T));
  return value;
}

template <typename T>
void write_le(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw IoError(path.string() + ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_pos = 0, data_size = 0;
  for (size_t pos = 12; pos + 8 <= buf.size();) {
    const auto size = read_le<uint32_t>(buf, pos + 4);
    const size_t body = pos + 8;
    if (body + size > buf.size()) throw IoError(path.string() + ": truncated chunk");
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw IoError(path.string() + ": short fmt chunk");
      format = read_le<uint16_t>(buf, body);
      channels = read_le<uint16_t>(buf, body + 2);
      rate = read_le<uint32_t>(buf, body + 4);
      bits = read_le<uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && size >= 26) format = read_le<uint16_t>(buf, body + 24);
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_pos = body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data_pos == 0) throw IoError(path.string() + ": missing fmt or data chunk");
  if (channels != 1 && channels != 2)
    throw IoError(path.string() + ": only mono or stereo is supported");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw IoError(path.string() + ": only 16-bit PCM or 32-bit float samples are supported");

  const size_t bytes_per_sample = bits / 8;
  const size_t frames = data_size / (bytes_per_sample * channels);
  AudioBuffer audio;
  audio.sample_rate = rate;
  audio.channels.assign(channels, std::vector<double>(frames));
  for (size_t n = 0; n < frames; ++n) {
    for (size_t c = 0; c < channels; ++c) {
      const size_t at = data_pos + (n * channels + c) * bytes_per_sample;
      audio.channels[c][n] =
          pcm16 ? read_le<int16_t>(buf, at) / 32768.0 : static_cast<double>(read_le<float>(buf, at));
    }
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio, SampleFormat format) {
  const auto channels = static_cast<uint16_t>(audio.num_channels());
  if (channels != 1 && channels != 2) throw InvalidArgument("write_wav: mono or stereo only");
  const size_t frames = audio.num_frames();
  for (const auto& ch : audio.channels)
    if (ch.size() != frames) throw InvalidArgument("write_wav: channel lengths differ");

  const bool pcm16 = format == SampleFormat::Pcm16;
  const uint16_t bits = pcm16 ? 16 : 32;
  const uint32_t block_align = channels * bits / 8;
  const auto data_size = static_cast<uint32_t>(frames * block_align);
  const auto rate = static_cast<uint32_t>(std::lround(audio.sample_rate));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("RIFF", 4);
  write_le<uint32_t>(out, 36 + data_size);
  out.write("WAVEfmt ", 8);
  write_le<uint32_t>(out, 16);
  write_le<uint16_t>(out, pcm16 ? kFormatPcm : kFormatFloat);
  write_le<uint16_t>(out, channels);
  write_le<uint32_t>(out, rate);
  write_le<uint32_t>(out, rate * block_align);
  write_le<uint16_t>(out, static_cast<uint16_t>(block_align));
  write_le<uint16_t>(out, bits);
  out.write("data", 4);
  write_le<uint32_t>(out, data_size);
  for (size_t n = 0; n < frames; ++n) {
    for (uint16_t c = 0; c < channels; ++c) {
      const double v = audio.channels[c][n];
      if (pcm16) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        write_le<int16_t>(out, static_cast<int16_t>(scaled));
      } else {
        write_le<float>(out, static_cast<float>(v));
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace sikam

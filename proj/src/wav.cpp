// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace dnp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_fmt(const std::uint8_t* p, std::uint32_t size) {
  if (size < 16) throw ParseError("wav: 'fmt ' chunk is too short (" + std::to_string(size) + " bytes)");
  FormatChunk fmt;
  fmt.format = le16(p);
  fmt.channels = le16(p + 2);
  fmt.sample_rate = le32(p + 4);
  fmt.bits = le16(p + 14);
  if (fmt.format == kFormatExtensible) {
    if (size < 40) throw ParseError("wav: extensible 'fmt ' chunk is too short");
    // The first two bytes of the sub-format GUID carry the actual codec.
    fmt.format = le16(p + 24);
  }
  if (fmt.channels == 0) throw ParseError("wav: 'fmt ' chunk declares zero channels");
  return fmt;
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0)
    throw ParseError("wav: missing 'RIFF' chunk header");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) throw ParseError("wav: 'RIFF' chunk is not of form 'WAVE'");

  std::optional<FormatChunk> fmt;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id(reinterpret_cast<const char*>(bytes.data() + pos), 4);
    const std::uint32_t size = le32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (id == "fmt ") {
      if (size > available) throw ParseError("wav: 'fmt ' chunk extends past end of file");
      fmt = parse_fmt(bytes.data() + body, size);
    } else if (id == "data") {
      // Writers that stream sometimes leave the size unpatched; take what is there.
      data = bytes.data() + body;
      data_size = static_cast<std::uint32_t>(std::min<std::size_t>(size, available));
      if (fmt) break;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt) throw ParseError("wav: no 'fmt ' chunk");
  if (!data) throw ParseError("wav: no 'data' chunk");

  const bool pcm16 = fmt->format == kFormatPcm && fmt->bits == 16;
  const bool float32 = fmt->format == kFormatFloat && fmt->bits == 32;
  if (!pcm16 && !float32)
    throw UnsupportedFormatError("wav: unsupported codec (format tag " + std::to_string(fmt->format) + ", " +
                                 std::to_string(fmt->bits) + " bits); need 16-bit PCM or 32-bit float");
  if (fmt->channels > 2)
    throw UnsupportedFormatError("wav: " + std::to_string(fmt->channels) + " channels; need mono or stereo");
  if (fmt->sample_rate != static_cast<std::uint32_t>(kPipelineRate))
    throw RateError("wav: sample rate is " + std::to_string(fmt->sample_rate) +
                    " Hz; resample to 16000 Hz offline before processing");

  const std::size_t bytes_per_sample = fmt->bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw ParseError("wav: 'data' chunk holds no complete frames");

  auto sample_at = [&](std::size_t index) {
    const std::uint8_t* p = data + index * bytes_per_sample;
    if (pcm16) return static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
    return static_cast<double>(std::bit_cast<float>(le32(p)));
  };

  AudioClip clip{Eigen::VectorXd(static_cast<Eigen::Index>(frames)), kPipelineRate};
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt->channels; ++c) acc += sample_at(f * fmt->channels + c);
    clip.samples[static_cast<Eigen::Index>(f)] = acc / fmt->channels;
  }
  if (!clip.samples.allFinite()) throw ParseError("wav: 'data' chunk contains non-finite samples");
  return clip;
}

std::int16_t quantize_pcm16(double x) {
  const double clamped = std::clamp(x, -1.0, 1.0);
  return static_cast<std::int16_t>(std::round(clamped * 32767.0));
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  clip.validate();
  if (clip.sample_rate != kPipelineRate) throw ArgumentError("wav: writer emits 16000 Hz only");
  const auto n = static_cast<std::uint32_t>(clip.size());
  const std::uint32_t data_bytes = n * 2;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (Eigen::Index i = 0; i < clip.size(); ++i) put16(out, static_cast<std::uint16_t>(quantize_pcm16(clip.samples[i])));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("wav: cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("wav: write to '" + path.string() + "' failed");
}

}  // namespace dnp

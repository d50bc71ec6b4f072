// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>

#include "dnp/audio_clip.hpp"

namespace dnp {

/// Reads a RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float samples,
/// mono or stereo. Stereo frames are averaged. Integer PCM is scaled by
/// 1/32768. Throws ParseError, UnsupportedFormatError or RateError (the
/// pipeline only accepts 16 kHz input).
AudioClip read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono with the canonical 44-byte header. Samples are
/// clamped to [-1, 1] and quantized symmetrically: round(x * 32767), halves
/// away from zero.
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

/// The quantizer used by write_wav.
std::int16_t quantize_pcm16(double x);

}  // namespace dnp

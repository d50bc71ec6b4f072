// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>

#include "dnp/wave_unet.hpp"

namespace dnp {

// Layout, all little-endian:
//   "DNPW" | u32 version (1) | i32 num_layers | i32 filters_per_layer
//   | i32 down_kernel | i32 up_kernel | f32 leaky_slope | u32 tensor count
//   | each parameter tensor in declaration order as f32, column-major.
// Optimizer state is not stored.

void save_checkpoint(const WaveUnetModel<float>& model, const std::filesystem::path& path);

/// Throws ParseError on a bad magic, version or tensor count.
WaveUnetModel<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace dnp

// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dnp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace dnp {
namespace {

constexpr char kMagic[4] = {'D', 'N', 'P', 'W'};
constexpr std::uint32_t kVersion = 1;

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    if (pos_ + 4 > bytes_.size()) throw ParseError("checkpoint: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  bool magic() {
    if (bytes_.size() < 4) return false;
    pos_ = 4;
    return std::memcmp(bytes_.data(), kMagic, 4) == 0;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const WaveUnetModel<float>& model, const std::filesystem::path& path) {
  const WaveUnetConfig& cfg = model.config;
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put32(out, kVersion);
  put32(out, static_cast<std::uint32_t>(cfg.num_layers));
  put32(out, static_cast<std::uint32_t>(cfg.filters_per_layer));
  put32(out, static_cast<std::uint32_t>(cfg.down_kernel));
  put32(out, static_cast<std::uint32_t>(cfg.up_kernel));
  put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(cfg.leaky_slope)));
  put32(out, static_cast<std::uint32_t>(model.params.size()));
  for (const auto& p : model.params)
    for (Eigen::Index i = 0; i < p.value.size(); ++i) put32(out, std::bit_cast<std::uint32_t>(p.value.data()[i]));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("checkpoint: write to '" + path.string() + "' failed");
}

WaveUnetModel<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("checkpoint: cannot open '" + path.string() + "'");
  Reader in(std::vector<std::uint8_t>{std::istreambuf_iterator<char>(file), {}});
  if (!in.magic()) throw ParseError("checkpoint: bad magic");
  if (const auto version = in.u32(); version != kVersion)
    throw ParseError("checkpoint: unsupported version " + std::to_string(version));

  WaveUnetConfig cfg;
  cfg.num_layers = in.i32();
  cfg.filters_per_layer = in.i32();
  cfg.down_kernel = in.i32();
  cfg.up_kernel = in.i32();
  cfg.leaky_slope = in.f32();
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("checkpoint: invalid configuration: ") + e.what());
  }

  WaveUnetModel<float> model = xavier_init<float>(cfg);
  if (in.u32() != model.params.size()) throw ParseError("checkpoint: tensor count does not match configuration");
  for (auto& p : model.params)
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = in.f32();
  if (!in.at_end()) throw ParseError("checkpoint: trailing bytes after the last tensor");
  return model;
}

}  // namespace dnp

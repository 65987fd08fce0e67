#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "nilm/error.hpp"
#include "nilm/models.hpp"

namespace nilm {

/// Binary bundle layout, all integers and floats little-endian:
///
///   "NILM"  u16 version
///   str appliance
///   str name  f64 on_threshold  i64 min_on  i64 min_off
///   i64 period
///   f64 mains_min  f64 mains_max  f64 power_min  f64 power_max
///   f64 index_scale  f64 off_mean
///   network classifier, network regressor
///
///   network := u32 length  u32 features  u16 layer_count  layer*  u16 tensor_count  tensor*
///   layer   := u8 kind  u8 hp_count  u32 hp*
///   tensor  := u16 name_len  name  u8 rank  u32 dim*  f32 data (row-major)
///   str     := u16 len  bytes
///
/// Tensor names are "<layer index>.<parameter name>".
inline constexpr std::uint16_t kBundleVersion = 1;
inline constexpr std::size_t kMaxBundleBytes = 300 * 1024;

enum class BundleErrorKind { bad_magic, bad_version, unexpected_end, malformed, io };

std::string_view to_string(BundleErrorKind kind);

class BundleError : public Error {
 public:
  BundleError(BundleErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  BundleErrorKind kind() const noexcept { return kind_; }

 private:
  BundleErrorKind kind_;
};

std::vector<std::uint8_t> encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written. Refuses bundles over kMaxBundleBytes.
std::size_t save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace nilm

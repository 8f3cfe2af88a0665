#pragma once

// Binary tensor fixture format, all fields little-endian:
//
//   offset  size        field
//   0       4           magic "CLFT"
//   4       4  u32      version (1)
//   8       4  u32      layout tag (LayoutTag value)
//   12      4  u32      k (algebra / spatial dimension, 0 if not applicable)
//   16      4  u32      rank
//   20      8*rank u64  shape
//   ...     4*volume    float32 payload, row-major

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cliffkern/tensor.hpp"

namespace cliffkern {

inline constexpr std::uint32_t kTensorFileVersion = 1;

struct TensorFile {
  LayoutTag tag = LayoutTag::Generic;
  std::uint32_t k = 0;
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

std::string encode_tensor(const TensorFile& t);
TensorFile decode_tensor(const std::string& bytes);

void write_tensor_file(const std::filesystem::path& path, const TensorFile& t);
TensorFile read_tensor_file(const std::filesystem::path& path);

template <LayoutTag Tag>
TensorFile to_tensor_file(const Tensor<Tag>& t, std::uint32_t k) {
  return TensorFile{Tag, k, t.shape(), std::vector<float>(t.values().begin(), t.values().end())};
}

/// Throws IoError when the stored layout tag differs from Tag.
template <LayoutTag Tag>
Tensor<Tag> from_tensor_file(const TensorFile& f) {
  if (f.tag != Tag) {
    throw Error(Errc::IoError, "tensor file holds " + to_string(f.tag) + ", expected " + to_string(Tag));
  }
  return Tensor<Tag>(f.shape, f.data);
}

}  // namespace cliffkern

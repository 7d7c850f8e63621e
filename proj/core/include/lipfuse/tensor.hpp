#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lipfuse {

// LBTF ("lip binary tensor format"), all integers little-endian:
//
//   offset  size        field
//   0       4           magic "LBTF"
//   4       2  (u16)    version = 1
//   6       1  (u8)     dtype code: 0 = u8, 1 = f32, 2 = f64
//   7       1  (u8)     rank
//   8       8*rank      dims, u64 each, outermost first
//   ...     prod(dims) * sizeof(dtype)   row-major element buffer
//
// A rank-0 tensor is a scalar holding one element. Floating-point elements
// are IEEE-754 binary32/binary64 stored little-endian.

enum class DType : std::uint8_t { kU8 = 0, kF32 = 1, kF64 = 2 };

std::size_t dtype_size(DType dtype);
std::string_view dtype_name(DType dtype);

class Tensor {
 public:
  Tensor() = default;
  /// Zero-initialized tensor. Throws DataError on element-count overflow.
  Tensor(DType dtype, std::vector<std::uint64_t> dims);

  static Tensor from_f64(std::vector<std::uint64_t> dims, std::span<const double> values);
  static Tensor from_u8(std::vector<std::uint64_t> dims, std::span<const std::uint8_t> values);

  DType dtype() const { return dtype_; }
  const std::vector<std::uint64_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t element_count() const { return count_; }

  /// Host-order element bytes.
  std::span<const std::byte> bytes() const { return data_; }
  std::span<std::byte> bytes() { return data_; }

  /// Typed views; throw DataError when the dtype does not match.
  std::span<const double> f64() const;
  std::span<double> f64();
  std::span<const float> f32() const;
  std::span<float> f32();
  std::span<const std::uint8_t> u8() const;
  std::span<std::uint8_t> u8();

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  DType dtype_ = DType::kF64;
  std::vector<std::uint64_t> dims_;
  std::size_t count_ = 1;
  std::vector<std::byte> data_ = std::vector<std::byte>(sizeof(double));
};

std::vector<std::byte> encode_tensor(const Tensor& tensor);

/// Throws DataError with "bad magic", "unsupported version", "unknown dtype",
/// "truncated" or "dimension overflow" in the message.
Tensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const Tensor& tensor, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace lipfuse

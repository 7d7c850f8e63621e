#include "lipfuse/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "lipfuse/error.hpp"

namespace lipfuse {
namespace {

constexpr std::array<char, 4> kMagic = {'L', 'B', 'T', 'F'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kFixedHeader = 8;

std::size_t checked_count(const std::vector<std::uint64_t>& dims, std::size_t elem_size) {
  std::uint64_t count = 1;
  const std::uint64_t limit = std::numeric_limits<std::size_t>::max() / elem_size;
  for (auto d : dims) {
    if (d != 0 && count > limit / d) throw DataError("tensor dimension overflow");
    count *= d;
  }
  return static_cast<std::size_t>(count);
}

template <typename T>
void put_le(std::vector<std::byte>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::byte* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(std::to_integer<T>(p[i]) << (8 * i));
  }
  return v;
}

// Element buffers are stored little-endian; swap element-wise on big-endian
// hosts.
void to_from_le(std::span<std::byte> data, std::size_t elem_size) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t off = 0; off + elem_size <= data.size(); off += elem_size) {
      std::reverse(data.begin() + off, data.begin() + off + elem_size);
    }
  } else {
    (void)data;
    (void)elem_size;
  }
}

}  // namespace

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kU8: return 1;
    case DType::kF32: return 4;
    case DType::kF64: return 8;
  }
  throw DataError("unknown dtype");
}

std::string_view dtype_name(DType dtype) {
  switch (dtype) {
    case DType::kU8: return "u8";
    case DType::kF32: return "f32";
    case DType::kF64: return "f64";
  }
  return "?";
}

Tensor::Tensor(DType dtype, std::vector<std::uint64_t> dims)
    : dtype_(dtype), dims_(std::move(dims)) {
  count_ = checked_count(dims_, dtype_size(dtype_));
  data_.assign(count_ * dtype_size(dtype_), std::byte{0});
}

Tensor Tensor::from_f64(std::vector<std::uint64_t> dims, std::span<const double> values) {
  Tensor t(DType::kF64, std::move(dims));
  if (values.size() != t.count_) throw DataError("from_f64: value count does not match dims");
  std::memcpy(t.data_.data(), values.data(), values.size_bytes());
  return t;
}

Tensor Tensor::from_u8(std::vector<std::uint64_t> dims, std::span<const std::uint8_t> values) {
  Tensor t(DType::kU8, std::move(dims));
  if (values.size() != t.count_) throw DataError("from_u8: value count does not match dims");
  std::memcpy(t.data_.data(), values.data(), values.size_bytes());
  return t;
}

#define LIPFUSE_TYPED_VIEW(NAME, TYPE, CODE)                                     \
  std::span<const TYPE> Tensor::NAME() const {                                   \
    if (dtype_ != CODE) throw DataError("tensor dtype is not " #NAME);           \
    return {reinterpret_cast<const TYPE*>(data_.data()), count_};                \
  }                                                                              \
  std::span<TYPE> Tensor::NAME() {                                               \
    if (dtype_ != CODE) throw DataError("tensor dtype is not " #NAME);           \
    return {reinterpret_cast<TYPE*>(data_.data()), count_};                      \
  }

LIPFUSE_TYPED_VIEW(f64, double, DType::kF64)
LIPFUSE_TYPED_VIEW(f32, float, DType::kF32)
LIPFUSE_TYPED_VIEW(u8, std::uint8_t, DType::kU8)

#undef LIPFUSE_TYPED_VIEW

std::vector<std::byte> encode_tensor(const Tensor& tensor) {
  if (tensor.rank() > 255) throw DataError("tensor rank exceeds 255");
  std::vector<std::byte> out;
  out.reserve(kFixedHeader + 8 * tensor.rank() + tensor.bytes().size());
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le<std::uint16_t>(out, kVersion);
  out.push_back(static_cast<std::byte>(tensor.dtype()));
  out.push_back(static_cast<std::byte>(tensor.rank()));
  for (auto d : tensor.dims()) put_le<std::uint64_t>(out, d);
  const std::size_t body = out.size();
  out.insert(out.end(), tensor.bytes().begin(), tensor.bytes().end());
  to_from_le(std::span(out).subspan(body), dtype_size(tensor.dtype()));
  return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw DataError("bad magic: not an LBTF tensor");
  }
  if (bytes.size() < kFixedHeader) throw DataError("truncated LBTF header");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kVersion) {
    throw DataError("unsupported LBTF version " + std::to_string(version));
  }
  const auto code = std::to_integer<std::uint8_t>(bytes[6]);
  if (code > 2) throw DataError("unknown dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const auto rank = std::to_integer<std::size_t>(bytes[7]);
  if (bytes.size() < kFixedHeader + 8 * rank) throw DataError("truncated LBTF dims");
  std::vector<std::uint64_t> dims(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    dims[i] = get_le<std::uint64_t>(bytes.data() + kFixedHeader + 8 * i);
  }
  const std::size_t elem = dtype_size(dtype);
  const std::size_t count = checked_count(dims, elem);
  const std::size_t offset = kFixedHeader + 8 * rank;
  const std::size_t available = bytes.size() - offset;
  if (count * elem > available) {
    throw DataError("truncated LBTF buffer: need " + std::to_string(count * elem) +
                    " bytes, have " + std::to_string(available));
  }
  if (count * elem < available) throw DataError("trailing bytes after LBTF buffer");
  Tensor t(dtype, std::move(dims));
  std::memcpy(t.bytes().data(), bytes.data() + offset, count * elem);
  to_from_le(t.bytes(), elem);
  return t;
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write tensor: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tensor: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(std::as_bytes(std::span(raw)));
}

}  // namespace lipfuse

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "lipfuse/error.hpp"
#include "lipfuse/tensor.hpp"
#include "random_tensor.hpp"
#include "temp_dir.hpp"

namespace lipfuse {
namespace {

std::vector<std::byte> bytes_of(std::initializer_list<int> v) {
  std::vector<std::byte> out;
  for (int b : v) out.push_back(static_cast<std::byte>(b));
  return out;
}

TEST(Tensor, GoldenEncoding) {
  const std::vector<double> values{1.0, -2.0};
  const auto enc = encode_tensor(Tensor::from_f64({2}, values));
  const auto want = bytes_of({'L', 'B', 'T', 'F', 1, 0, 2, 1,                        // magic, version, dtype, rank
                              2, 0, 0, 0, 0, 0, 0, 0,                                // dims[0]
                              0, 0, 0, 0, 0, 0, 0xF0, 0x3F, 0, 0, 0, 0, 0, 0, 0, 0xC0});
  EXPECT_EQ(enc, want);
}

TEST(Tensor, U8Layout) {
  const std::vector<std::uint8_t> px{1, 2, 3, 4, 5, 6};
  const auto enc = encode_tensor(Tensor::from_u8({1, 2, 3}, px));
  ASSERT_EQ(enc.size(), 8U + 3 * 8 + 6);
  EXPECT_EQ(enc[6], std::byte{0});
  EXPECT_EQ(enc[7], std::byte{3});
  EXPECT_EQ(enc[8 + 8], std::byte{2});
  EXPECT_EQ(enc.back(), std::byte{6});
}

TEST(Tensor, RandomRoundTripIsBitIdentical) {
  std::mt19937_64 gen(31337);
  for (int i = 0; i < 100; ++i) {
    const Tensor t = testing::random_tensor(gen);
    const auto enc = encode_tensor(t);
    const Tensor back = decode_tensor(enc);
    EXPECT_EQ(back.dtype(), t.dtype());
    EXPECT_EQ(back.dims(), t.dims());
    ASSERT_EQ(back.bytes().size(), t.bytes().size());
    EXPECT_EQ(std::memcmp(back.bytes().data(), t.bytes().data(), t.bytes().size()), 0);
    EXPECT_EQ(encode_tensor(back), enc);
  }
}

TEST(Tensor, FileRoundTrip) {
  testing::TempDir dir;
  const std::vector<double> v{0.5, 1.5, -0.0, 3.25};
  const Tensor t = Tensor::from_f64({2, 2}, v);
  write_tensor(t, dir / "t.lbtf");
  EXPECT_EQ(read_tensor(dir / "t.lbtf"), t);
  EXPECT_THROW(read_tensor(dir / "missing.lbtf"), DataError);
}

TEST(Tensor, MalformedInputsRejected) {
  auto good = encode_tensor(Tensor::from_f64({1}, std::vector<double>{2.0}));
  auto bad = good;
  bad[0] = std::byte{'X'};
  EXPECT_THROW(decode_tensor(bad), DataError);
  bad = good;
  bad[4] = std::byte{2};
  EXPECT_THROW(decode_tensor(bad), DataError);
  bad = good;
  bad[6] = std::byte{9};
  EXPECT_THROW(decode_tensor(bad), DataError);
  bad.assign(good.begin(), good.end() - 1);
  EXPECT_THROW(decode_tensor(bad), DataError);
  bad.assign(good.begin(), good.begin() + 10);
  EXPECT_THROW(decode_tensor(bad), DataError);
  bad = good;
  bad.push_back(std::byte{0});
  EXPECT_THROW(decode_tensor(bad), DataError);
  // dims whose product overflows 64 bits
  auto huge = bytes_of({'L', 'B', 'T', 'F', 1, 0, 0, 2});
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 8; ++i) huge.push_back(std::byte{0xFF});
  }
  EXPECT_THROW(decode_tensor(huge), DataError);
}

TEST(Tensor, TypedViewsCheckDtype) {
  const Tensor t = Tensor::from_u8({2}, std::vector<std::uint8_t>{7, 8});
  EXPECT_EQ(t.u8()[1], 8);
  EXPECT_THROW((void)t.f64(), DataError);
  EXPECT_THROW(Tensor::from_f64({3}, std::vector<double>{1.0}), DataError);
}

}  // namespace
}  // namespace lipfuse

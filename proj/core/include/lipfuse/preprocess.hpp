#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lipfuse/tensor.hpp"

namespace lipfuse {

inline constexpr int kCropWidth = 300;
inline constexpr int kCropHeight = 200;

/// Row-major 8-bit image, either grayscale (1 channel) or interleaved RGB.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, int c, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Throws DataError unless channels is 1 or 3 and pixels.size() matches.
void validate_frame(const Frame& frame);

/// BT.601 luma, round(0.299 R + 0.587 G + 0.114 B), computed in integer
/// arithmetic with round-half-up.
Frame to_grayscale(const Frame& rgb);

/// Sobel gradient magnitude, clamp(round(sqrt(gx^2 + gy^2)), 0, 255), with
/// replicated borders. Requires a grayscale frame of at least 3x3.
Frame sobel(const Frame& gray);

/// |4-neighbour Laplacian| clamped to [0, 255], replicated borders.
Frame laplacian(const Frame& gray);

struct CannyParams {
  double low = 0.1;    // fraction of the maximum gradient magnitude
  double high = 0.3;
  double sigma = 1.4;  // 5x5 Gaussian pre-blur
};

/// Gaussian blur, Sobel gradients, non-maximum suppression along the
/// direction quantized to 0/45/90/135 degrees, then double-threshold
/// hysteresis with 8-connectivity. Output pixels are 0 or 255.
/// Throws InvalidArgument unless 0 <= low < high <= 1.
Frame canny(const Frame& gray, const CannyParams& params = {});

/// Reads binary PGM (P5) or PPM (P6) with maxval <= 255.
Frame read_pnm(const std::filesystem::path& path);
void write_pnm(const Frame& frame, const std::filesystem::path& path);

/// Stacks equally sized grayscale frames into a u8 tensor of dims (T, H, W).
Tensor frames_to_tensor(std::span<const Frame> frames);

enum class FrameOp : std::uint8_t { kGrayscale, kSobel, kLaplacian, kCanny };

std::string_view frame_op_name(FrameOp op);
FrameOp parse_frame_op(std::string_view name);  // throws InvalidArgument

/// Converts every frame to grayscale, then applies op (kGrayscale stops
/// after the conversion). Frames are processed on `jobs` threads
/// (0 = hardware concurrency); output order follows input order.
std::vector<Frame> apply_frame_op(std::span<const Frame> frames, FrameOp op,
                                  const CannyParams& canny_params = {}, unsigned jobs = 1);

}  // namespace lipfuse

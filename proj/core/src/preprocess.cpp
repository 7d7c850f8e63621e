#include "lipfuse/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "lipfuse/error.hpp"
#include "parallel.hpp"

namespace lipfuse {

Frame::Frame(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                 static_cast<std::size_t>(c),
             fill) {}

void validate_frame(const Frame& frame) {
  if (frame.channels != 1 && frame.channels != 3) {
    throw DataError("frame must have 1 or 3 channels");
  }
  if (frame.width <= 0 || frame.height <= 0) throw DataError("frame has empty extent");
  if (frame.pixels.size() != static_cast<std::size_t>(frame.width) * frame.height * frame.channels) {
    throw DataError("frame pixel buffer does not match width*height*channels");
  }
}

Frame to_grayscale(const Frame& rgb) {
  validate_frame(rgb);
  if (rgb.channels != 3) throw DataError("to_grayscale expects a 3-channel frame");
  Frame out(rgb.width, rgb.height, 1);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const unsigned r = rgb.pixels[3 * i];
    const unsigned g = rgb.pixels[3 * i + 1];
    const unsigned b = rgb.pixels[3 * i + 2];
    out.pixels[i] = static_cast<std::uint8_t>(
        std::min(255U, (299 * r + 587 * g + 114 * b + 500) / 1000));
  }
  return out;
}

namespace {

void require_gray(const Frame& f, const char* op) {
  validate_frame(f);
  if (f.channels != 1) throw DataError(std::string(op) + " expects a grayscale frame");
  if (f.width < 3 || f.height < 3) {
    throw DataError(std::string(op) + ": image too small (minimum 3x3)");
  }
}

/// Float image with replicate-border sampling.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  Plane(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.0) {}
  explicit Plane(const Frame& f) : Plane(f.width, f.height) {
    std::transform(f.pixels.begin(), f.pixels.end(), v.begin(),
                   [](std::uint8_t p) { return static_cast<double>(p); });
  }
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
  double clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return v[static_cast<std::size_t>(y) * width + x];
  }
};

template <std::size_t N>
Plane convolve(const Plane& in, const std::array<std::array<double, N>, N>& kernel) {
  constexpr int r = static_cast<int>(N) / 2;
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
          acc += kernel[static_cast<std::size_t>(j + r)][static_cast<std::size_t>(i + r)] *
                 in.clamped(x + i, y + j);
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

constexpr std::array<std::array<double, 3>, 3> kSobelX = {{{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}};
constexpr std::array<std::array<double, 3>, 3> kSobelY = {{{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}};
constexpr std::array<std::array<double, 3>, 3> kLaplace = {{{0, 1, 0}, {1, -4, 1}, {0, 1, 0}}};

std::uint8_t saturate(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

}  // namespace

Frame sobel(const Frame& gray) {
  require_gray(gray, "sobel");
  const Plane src(gray);
  const Plane gx = convolve(src, kSobelX);
  const Plane gy = convolve(src, kSobelY);
  Frame out(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = saturate(std::sqrt(gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i]));
  }
  return out;
}

Frame laplacian(const Frame& gray) {
  require_gray(gray, "laplacian");
  const Plane response = convolve(Plane(gray), kLaplace);
  Frame out(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = saturate(std::abs(response.v[i]));
  }
  return out;
}

Frame canny(const Frame& gray, const CannyParams& params) {
  if (!(params.low >= 0.0 && params.low < params.high && params.high <= 1.0)) {
    throw InvalidArgument("canny thresholds must satisfy 0 <= low < high <= 1");
  }
  if (!(params.sigma > 0.0)) throw InvalidArgument("canny sigma must be positive");
  require_gray(gray, "canny");

  std::array<std::array<double, 5>, 5> gauss{};
  double sum = 0.0;
  for (int j = -2; j <= 2; ++j) {
    for (int i = -2; i <= 2; ++i) {
      const double w = std::exp(-(i * i + j * j) / (2.0 * params.sigma * params.sigma));
      gauss[static_cast<std::size_t>(j + 2)][static_cast<std::size_t>(i + 2)] = w;
      sum += w;
    }
  }
  for (auto& row : gauss) {
    for (auto& w : row) w /= sum;
  }

  const Plane blurred = convolve(Plane(gray), gauss);
  const Plane gx = convolve(blurred, kSobelX);
  const Plane gy = convolve(blurred, kSobelY);
  const int w = gray.width;
  const int h = gray.height;
  Plane mag(w, h);
  double max_mag = 0.0;
  for (std::size_t i = 0; i < mag.v.size(); ++i) {
    mag.v[i] = std::hypot(gx.v[i], gy.v[i]);
    max_mag = std::max(max_mag, mag.v[i]);
  }
  Frame out(w, h, 1);
  if (max_mag <= 0.0) return out;

  // Non-maximum suppression. Ties keep the pixel on the negative side of the
  // gradient direction so plateaus two pixels wide thin to one.
  Plane thin(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag.at(x, y);
      if (m <= 0.0) continue;
      double angle = std::atan2(gy.clamped(x, y), gx.clamped(x, y)) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      int dx = 1;
      int dy = 0;
      if (angle >= 22.5 && angle < 67.5) {
        dx = 1;
        dy = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        dx = 0;
        dy = 1;
      } else if (angle >= 112.5 && angle < 157.5) {
        dx = -1;
        dy = 1;
      }
      const double ahead = mag.clamped(x + dx, y + dy);
      const double behind = mag.clamped(x - dx, y - dy);
      if (m >= ahead && m > behind) thin.at(x, y) = m;
    }
  }

  const double high = params.high * max_mag;
  const double low = params.low * max_mag;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thin.at(x, y) >= high && thin.at(x, y) > 0.0) {
        out.at(x, y) = 255;
        stack.emplace_back(x, y);
      }
    }
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        const int nx = x + i;
        const int ny = y + j;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || out.at(nx, ny) != 0) continue;
        const double v = thin.at(nx, ny);
        if (v > 0.0 && v >= low) {
          out.at(nx, ny) = 255;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok += c;
  }
  return tok;
}

}  // namespace

Frame read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image: " + path.string());
  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw DataError(path.string() + ": not a binary PGM/PPM (P5/P6)");
  }
  int width = 0;
  int height = 0;
  int maxval = 0;
  try {
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw DataError(path.string() + ": malformed PNM header");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw DataError(path.string() + ": unsupported PNM geometry or maxval");
  }
  // next_token consumed exactly one whitespace byte after maxval.
  Frame frame(width, height, channels);
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    throw DataError(path.string() + ": truncated pixel data");
  }
  if (maxval != 255) {
    for (auto& p : frame.pixels) {
      p = static_cast<std::uint8_t>((static_cast<unsigned>(p) * 255 + maxval / 2) / maxval);
    }
  }
  return frame;
}

void write_pnm(const Frame& frame, const std::filesystem::path& path) {
  validate_frame(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write image: " + path.string());
  out << (frame.channels == 1 ? "P5" : "P6") << '\n'
      << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

Tensor frames_to_tensor(std::span<const Frame> frames) {
  if (frames.empty()) return Tensor(DType::kU8, {0, 0, 0});
  const int w = frames.front().width;
  const int h = frames.front().height;
  std::vector<std::uint8_t> buf;
  buf.reserve(frames.size() * static_cast<std::size_t>(w) * h);
  for (const auto& f : frames) {
    validate_frame(f);
    if (f.channels != 1 || f.width != w || f.height != h) {
      throw DataError("frames_to_tensor: frames must be grayscale and equally sized");
    }
    buf.insert(buf.end(), f.pixels.begin(), f.pixels.end());
  }
  return Tensor::from_u8({frames.size(), static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(w)},
                         buf);
}

std::string_view frame_op_name(FrameOp op) {
  switch (op) {
    case FrameOp::kGrayscale: return "grayscale";
    case FrameOp::kSobel: return "sobel";
    case FrameOp::kLaplacian: return "laplacian";
    case FrameOp::kCanny: return "canny";
  }
  return "?";
}

FrameOp parse_frame_op(std::string_view name) {
  for (FrameOp op : {FrameOp::kGrayscale, FrameOp::kSobel, FrameOp::kLaplacian, FrameOp::kCanny}) {
    if (frame_op_name(op) == name) return op;
  }
  throw InvalidArgument("unknown frame operation '" + std::string(name) + "'");
}

std::vector<Frame> apply_frame_op(std::span<const Frame> frames, FrameOp op,
                                  const CannyParams& canny_params, unsigned jobs) {
  if (op == FrameOp::kCanny) {
    // Reject bad thresholds before any work is scheduled.
    canny(Frame(3, 3, 1), canny_params);
  }
  std::vector<Frame> out(frames.size());
  detail::parallel_for(frames.size(), jobs, [&](std::size_t i) {
    Frame gray = frames[i].channels == 1 ? frames[i] : to_grayscale(frames[i]);
    switch (op) {
      case FrameOp::kGrayscale: out[i] = std::move(gray); break;
      case FrameOp::kSobel: out[i] = sobel(gray); break;
      case FrameOp::kLaplacian: out[i] = laplacian(gray); break;
      case FrameOp::kCanny: out[i] = canny(gray, canny_params); break;
    }
  });
  return out;
}

}  // namespace lipfuse

#include "mggo/common.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <numeric>

namespace mggo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Io: return "io";
    case ErrorKind::Limit: return "limit";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

std::string_view to_string(Heading h) {
  switch (h) {
    case Heading::East: return "east";
    case Heading::South: return "south";
    case Heading::West: return "west";
    case Heading::North: return "north";
  }
  return "?";
}

Heading parse_heading(std::string_view s) {
  for (Heading h : kHeadings) {
    if (to_string(h) == s) return h;
  }
  throw Error(ErrorKind::Parse, "unknown heading '" + std::string(s) + "'");
}

Tensor::Tensor(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || channels < 0) {
    throw Error(ErrorKind::InvalidArgument, "negative tensor dimension");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

Tensor Tensor::concat_channels(const Tensor& other) const {
  if (size() == 0) return other;
  if (other.height_ != height_ || other.width_ != width_) {
    throw Error(ErrorKind::InvalidArgument, "concat_channels: spatial shape mismatch");
  }
  Tensor out(height_, width_, channels_ + other.channels_);
  const int cells = height_ * width_;
  for (int cell = 0; cell < cells; ++cell) {
    for (int c = 0; c < channels_; ++c) out.at(cell, c) = at(cell, c);
    for (int c = 0; c < other.channels_; ++c) out.at(cell, channels_ + c) = other.at(cell, c);
  }
  return out;
}

Tensor Tensor::slice_channels(int first, int count) const {
  if (first < 0 || count < 0 || first + count > channels_) {
    throw Error(ErrorKind::InvalidArgument, "slice_channels out of range");
  }
  Tensor out(height_, width_, count);
  const int cells = height_ * width_;
  for (int cell = 0; cell < cells; ++cell) {
    for (int c = 0; c < count; ++c) out.at(cell, c) = at(cell, first + c);
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(mix_seed(base) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(base, h);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "uniform_index: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error(ErrorKind::Internal, "format_double failed");
  return std::string(buf, ptr);
}

}  // namespace mggo

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mggo {

/// Row-major index over the full grid, obstacles included.
using CellId = int;
inline constexpr CellId kNoCell = -1;

using Rng = std::mt19937_64;

enum class ErrorKind { Parse, InvalidArgument, Invariant, Io, Limit, Internal };

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Grid headings. The numeric order doubles as the channel order of every
/// per-direction tensor (east, south, west, north) and as the clockwise
/// rotation order.
enum class Heading : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

inline constexpr std::array<Heading, 4> kHeadings{Heading::East, Heading::South,
                                                  Heading::West, Heading::North};

constexpr int index(Heading h) { return static_cast<int>(h); }
constexpr Heading heading_from_index(int i) { return static_cast<Heading>(i & 3); }
constexpr Heading rotate_cw(Heading h) { return heading_from_index(index(h) + 1); }
constexpr Heading rotate_ccw(Heading h) { return heading_from_index(index(h) + 3); }
constexpr Heading opposite(Heading h) { return heading_from_index(index(h) + 2); }
constexpr int row_step(Heading h) { return h == Heading::South ? 1 : h == Heading::North ? -1 : 0; }
constexpr int col_step(Heading h) { return h == Heading::East ? 1 : h == Heading::West ? -1 : 0; }

std::string_view to_string(Heading h);
Heading parse_heading(std::string_view s);

/// Dense [H, W, C] tensor stored height-major, channel-minor.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int height, int width, int channels, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(int row, int col, int ch) { return data_[offset(row * width_ + col, ch)]; }
  double at(int row, int col, int ch) const { return data_[offset(row * width_ + col, ch)]; }
  double& at(CellId cell, int ch) { return data_[offset(cell, ch)]; }
  double at(CellId cell, int ch) const { return data_[offset(cell, ch)]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const;
  double sum() const;

  /// Appends `other`'s channels after this tensor's channels.
  Tensor concat_channels(const Tensor& other) const;
  Tensor slice_channels(int first, int count) const;

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t offset(CellId cell, int ch) const {
    return static_cast<std::size_t>(cell) * static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(ch);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// SplitMix64 finalizer; derives independent substream seeds.
std::uint64_t mix_seed(std::uint64_t value);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream);

/// Uniform integer in [0, n) using rejection on the raw 64-bit engine output,
/// so the stream is identical across standard library implementations.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
double uniform_unit(Rng& rng);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace mggo

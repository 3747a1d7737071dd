#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mggo/common.hpp"

namespace mggo {

/// A 4-connected obstacle grid in the MovingAI benchmark layout.
///
/// Tiles '.', 'G' and 'S' are passable; '@', 'O', 'T' and 'W' are blocked.
/// The original tile characters are kept so that serialize() reproduces the
/// source grid. Construction rejects grids whose passable cells do not form a
/// single 4-connected region.
class GridMap {
 public:
  GridMap(int height, int width, std::vector<char> tiles, std::string name = {});

  /// Builds a map from raw grid rows (no header). Handy for tests and tools.
  static GridMap from_rows(const std::vector<std::string>& rows, std::string name = {});

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int cell_count() const noexcept { return height_ * width_; }
  int passable_count() const noexcept { return passable_count_; }
  const std::string& name() const noexcept { return name_; }

  bool in_bounds(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  bool passable(CellId cell) const { return passable_[static_cast<std::size_t>(cell)] != 0; }
  bool passable(int row, int col) const { return in_bounds(row, col) && passable(cell(row, col)); }
  char tile(CellId cell) const { return tiles_[static_cast<std::size_t>(cell)]; }

  CellId cell(int row, int col) const noexcept { return row * width_ + col; }
  int row(CellId cell) const noexcept { return cell / width_; }
  int col(CellId cell) const noexcept { return cell % width_; }

  /// Passable 4-neighbour in direction `h`, if any.
  std::optional<CellId> neighbor(CellId cell, Heading h) const;

  /// Header + grid rows, newline-terminated.
  std::string serialize() const;
  /// FNV-1a over serialize().
  std::uint64_t checksum() const;

 private:
  int height_;
  int width_;
  std::vector<char> tiles_;
  std::vector<std::uint8_t> passable_;
  int passable_count_ = 0;
  std::string name_;
};

bool is_passable_tile(char tile);

/// Parses MovingAI `.map` text: "type", "height H", "width W", "map", rows.
GridMap parse_map(std::string_view text, std::string name = {});
GridMap load_map(const std::filesystem::path& path);

}  // namespace mggo

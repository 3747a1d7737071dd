#include "mggo/grid_map.hpp"

#include <fstream>
#include <sstream>

namespace mggo {

namespace {

bool is_known_tile(char t) {
  return t == '.' || t == 'G' || t == 'S' || t == '@' || t == 'O' || t == 'T' || t == 'W';
}

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(trim_right(text.substr(start, end - start)));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

int parse_dimension(std::string_view line, std::string_view key) {
  std::istringstream in{std::string(line)};
  std::string word;
  long value = -1;
  if (!(in >> word) || word != key || !(in >> value) || value < 1 || value > 100000) {
    throw Error(ErrorKind::Parse,
                "malformed header: expected '" + std::string(key) + " <n>', got '" +
                    std::string(line) + "'");
  }
  return static_cast<int>(value);
}

}  // namespace

bool is_passable_tile(char tile) { return tile == '.' || tile == 'G' || tile == 'S'; }

GridMap::GridMap(int height, int width, std::vector<char> tiles, std::string name)
    : height_(height), width_(width), tiles_(std::move(tiles)), name_(std::move(name)) {
  if (height < 1 || width < 1) {
    throw Error(ErrorKind::Parse, "map dimensions must be positive");
  }
  if (tiles_.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorKind::Parse, "tile count does not match height x width");
  }
  passable_.resize(tiles_.size());
  CellId first = kNoCell;
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    if (!is_known_tile(tiles_[i])) {
      throw Error(ErrorKind::Parse, std::string("unknown map tile '") + tiles_[i] + "'");
    }
    passable_[i] = is_passable_tile(tiles_[i]) ? 1 : 0;
    if (passable_[i]) {
      ++passable_count_;
      if (first == kNoCell) first = static_cast<CellId>(i);
    }
  }
  if (passable_count_ == 0) throw Error(ErrorKind::Parse, "map has no passable cells");

  std::vector<std::uint8_t> seen(tiles_.size(), 0);
  std::vector<CellId> stack{first};
  seen[static_cast<std::size_t>(first)] = 1;
  int reached = 0;
  while (!stack.empty()) {
    CellId c = stack.back();
    stack.pop_back();
    ++reached;
    for (Heading h : kHeadings) {
      if (auto n = neighbor(c, h); n && !seen[static_cast<std::size_t>(*n)]) {
        seen[static_cast<std::size_t>(*n)] = 1;
        stack.push_back(*n);
      }
    }
  }
  if (reached != passable_count_) {
    throw Error(ErrorKind::Parse, "passable region is disconnected (" + std::to_string(reached) +
                                      " of " + std::to_string(passable_count_) +
                                      " cells reachable)");
  }
}

GridMap GridMap::from_rows(const std::vector<std::string>& rows, std::string name) {
  if (rows.empty()) throw Error(ErrorKind::Parse, "map has no rows");
  const int width = static_cast<int>(rows.front().size());
  std::vector<char> tiles;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != width) {
      throw Error(ErrorKind::Parse, "row length mismatch");
    }
    tiles.insert(tiles.end(), r.begin(), r.end());
  }
  return GridMap(static_cast<int>(rows.size()), width, std::move(tiles), std::move(name));
}

std::optional<CellId> GridMap::neighbor(CellId cell, Heading h) const {
  const int r = row(cell) + row_step(h);
  const int c = col(cell) + col_step(h);
  if (!passable(r, c)) return std::nullopt;
  return this->cell(r, c);
}

std::string GridMap::serialize() const {
  std::string out = "type octile\nheight " + std::to_string(height_) + "\nwidth " +
                    std::to_string(width_) + "\nmap\n";
  out.reserve(out.size() + tiles_.size() + static_cast<std::size_t>(height_));
  for (int r = 0; r < height_; ++r) {
    out.append(tiles_.data() + static_cast<std::ptrdiff_t>(r) * width_,
               static_cast<std::size_t>(width_));
    out.push_back('\n');
  }
  return out;
}

std::uint64_t GridMap::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : serialize()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

GridMap parse_map(std::string_view text, std::string name) {
  const auto lines = split_lines(text);
  if (lines.size() < 4) throw Error(ErrorKind::Parse, "malformed header: too few lines");
  if (lines[0].rfind("type", 0) != 0) {
    throw Error(ErrorKind::Parse, "malformed header: missing 'type' line");
  }
  const int height = parse_dimension(lines[1], "height");
  const int width = parse_dimension(lines[2], "width");
  if (lines[3] != "map") throw Error(ErrorKind::Parse, "malformed header: missing 'map' line");
  if (lines.size() - 4 != static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::Parse, "expected " + std::to_string(height) + " grid rows, found " +
                                      std::to_string(lines.size() - 4));
  }
  std::vector<char> tiles;
  tiles.reserve(static_cast<std::size_t>(height) * width);
  for (int r = 0; r < height; ++r) {
    const auto row = lines[4 + static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != width) {
      throw Error(ErrorKind::Parse, "row " + std::to_string(r) + " has length " +
                                        std::to_string(row.size()) + ", expected " +
                                        std::to_string(width));
    }
    tiles.insert(tiles.end(), row.begin(), row.end());
  }
  return GridMap(height, width, std::move(tiles), std::move(name));
}

GridMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str(), path.stem().string());
}

}  // namespace mggo

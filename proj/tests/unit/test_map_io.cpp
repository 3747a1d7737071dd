#include <doctest.h>

#include <set>

#include "mggo/base_graph.hpp"
#include "mggo/graph_json.hpp"
#include "test_support.hpp"

using namespace mggo;

TEST_CASE("parse_map reads a MovingAI grid") {
  const char* text =
      "type octile\n"
      "height 3\n"
      "width 4\n"
      "map\n"
      "..@.\n"
      "....\n"
      "G.TS\n";
  GridMap m = parse_map(text, "tiny");
  CHECK(m.height() == 3);
  CHECK(m.width() == 4);
  CHECK(m.passable_count() == 10);
  CHECK_FALSE(m.passable(0, 2));
  CHECK_FALSE(m.passable(2, 2));
  CHECK(m.passable(2, 0));
  CHECK(m.cell(2, 3) == 11);
  CHECK(m.row(11) == 2);
  CHECK(m.col(11) == 3);
  CHECK(m.serialize() == text);
  CHECK(parse_map(m.serialize()).checksum() == m.checksum());
}

TEST_CASE("parse_map tolerates CRLF line endings") {
  GridMap m = parse_map("type octile\r\nheight 1\r\nwidth 2\r\nmap\r\n..\r\n");
  CHECK(m.passable_count() == 2);
}

TEST_CASE("parse_map rejects malformed input") {
  auto kind = [](const char* text) {
    try {
      parse_map(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind("height 2\nwidth 2\nmap\n..\n..\n") == ErrorKind::Parse);
  CHECK(kind("type octile\nheight x\nwidth 2\nmap\n..\n..\n") == ErrorKind::Parse);
  CHECK(kind("type octile\nheight 2\nwidth 2\nmap\n..\n") == ErrorKind::Parse);
  CHECK(kind("type octile\nheight 2\nwidth 2\nmap\n..\n...\n") == ErrorKind::Parse);
  CHECK(kind("type octile\nheight 1\nwidth 2\nmap\n.?\n") == ErrorKind::Parse);
  CHECK(kind("type octile\nheight 1\nwidth 2\nmap\n@@\n") == ErrorKind::Parse);
  // Two free regions separated by a wall.
  CHECK(kind("type octile\nheight 1\nwidth 3\nmap\n.@.\n") == ErrorKind::Parse);
}

TEST_CASE("load_map reports missing files as io errors") {
  try {
    load_map("/nonexistent/dir/x.map");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("base graph of an open grid") {
  auto base = test::open_grid(8, 8);
  CHECK(base->num_vertices() == 64);
  CHECK(base->num_edges() == 2 * 8 * 7);
  CHECK(base->biconnected());
  CHECK(base->max_mixed_edges() == 2 * 112 + 64);
  for (const auto& e : base->edges()) {
    CHECK(e.u < e.v);
    CHECK((e.v == e.u + 1 || e.v == e.u + 8));
  }
  CHECK(base->forward_heading(base->edge_at(0, Heading::East)) == Heading::East);
  CHECK(base->forward_heading(base->edge_at(0, Heading::South)) == Heading::South);
  CHECK(base->edge_at(0, Heading::North) == -1);
  CHECK(base->edge_at(9, Heading::West) == base->edge_at(8, Heading::East));
}

TEST_CASE("dumbbell map has exactly its corridor bridges") {
  auto base = build_base_graph(load_map(test::map_path("dumbbell-5-13")));
  CHECK(base->num_vertices() == 53);
  CHECK_FALSE(base->biconnected());
  REQUIRE(base->bridges().size() == 4);
  for (int e : base->bridges()) {
    const auto& ed = base->edges()[e];
    CHECK(base->map().row(ed.u) == 2);
    CHECK(base->map().row(ed.v) == 2);
  }
}

TEST_CASE("bridges agree with the removal definition on random maps") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = 3 + static_cast<int>(uniform_index(rng, 6));
    const int w = 3 + static_cast<int>(uniform_index(rng, 6));
    auto base = test::random_connected_grid(h, w, 0.35, rng);
    const std::vector<int> got(base->bridges().begin(), base->bridges().end());
    CHECK(got == test::brute_force_bridges(*base));
    for (int e = 0; e < base->num_edges(); ++e) {
      CHECK(base->is_bridge(e) == std::binary_search(got.begin(), got.end(), e));
    }
  }
}

TEST_CASE("path map: every edge is a bridge") {
  auto base = test::grid({"....."});
  CHECK(base->num_edges() == 4);
  CHECK(base->bridges().size() == 4);
  CHECK(base->num_non_bridge_edges() == 0);
}

TEST_CASE("base graph JSON dump") {
  auto base = test::grid({"..", ".@"});
  const auto j = base_graph_to_json(*base);
  CHECK(j.at("height") == 2);
  CHECK(j.at("width") == 2);
  CHECK(j.at("edges").size() == 2);
  CHECK(j.at("bridges").size() == 2);
  CHECK(j.at("biconnected") == false);
}

#include <doctest.h>

#include "mggo/graph_json.hpp"
#include "mggo/orientation.hpp"
#include "mggo/scc.hpp"
#include "mggo/tensors.hpp"
#include "test_support.hpp"

using namespace mggo;

namespace {

int edge_between(const BaseGraph& b, CellId u, CellId v) {
  for (int e = 0; e < b.num_edges(); ++e) {
    if (b.edges()[e].u == u && b.edges()[e].v == v) return e;
  }
  return -1;
}

}  // namespace

TEST_CASE("heading arithmetic") {
  CHECK(rotate_cw(Heading::East) == Heading::South);
  CHECK(rotate_cw(Heading::North) == Heading::East);
  CHECK(rotate_ccw(Heading::East) == Heading::North);
  CHECK(opposite(Heading::South) == Heading::North);
  CHECK(parse_heading(to_string(Heading::West)) == Heading::West);
}

TEST_CASE("unweighted graph has every move and unit weights") {
  auto base = test::open_grid(3, 3);
  MixedGuidanceGraph g = make_unweighted(base);
  CHECK(g.edge_count() == base->max_mixed_edges());
  CHECK(g.edge_count() == 2 * 12 + 9);
  CHECK(g.unidirectional_ratio() == 0.0);
  CHECK(g.move_weight(4, Heading::North) == 1.0);
  CHECK(g.move_target(4, Heading::North) == 1);
  CHECK_FALSE(g.move_target(0, Heading::West).has_value());
  g.validate();
}

TEST_CASE("set_edge stores absent directions as zero and reverse carries the weight") {
  auto base = test::open_grid(2, 2);
  MixedGuidanceGraph g(base);
  const int e = edge_between(*base, 0, 1);
  g.set_edge(e, EdgeDir::Forward, 7.0, 9.0);
  CHECK(g.forward_weight(e) == 7.0);
  CHECK(g.backward_weight(e) == 0.0);
  CHECK(g.has_move(0, Heading::East));
  CHECK_FALSE(g.has_move(1, Heading::West));
  g.reverse(e);
  CHECK(g.dir(e) == EdgeDir::Backward);
  CHECK(g.backward_weight(e) == 7.0);
  CHECK(g.forward_weight(e) == 0.0);
  CHECK(g.move_weight(1, Heading::West) == 7.0);
  g.set_dir(e, EdgeDir::Both);
  CHECK(g.forward_weight(e) == 7.0);
  CHECK(g.backward_weight(e) == 7.0);
  CHECK(g.edge_count() == 2 * 4 + 4);
  g.set_dir(e, EdgeDir::Forward);
  CHECK(g.edge_count() == 2 * 4 + 4 - 1);
}

TEST_CASE("validate rejects unidirectional bridges and out-of-bound weights") {
  auto base = test::grid({"..."});
  MixedGuidanceGraph g(base);
  g.set_dir(0, EdgeDir::Forward);
  CHECK_THROWS_AS(g.validate(), Error);

  MixedGuidanceGraph h(test::open_grid(2, 2));
  h.set_self_loop(0, 1000.0);
  CHECK_THROWS_AS(h.validate(), Error);
  CHECK_THROWS_AS(WeightBounds({2.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(WeightBounds({0.0, 1.0}).validate(), Error);
}

TEST_CASE("unidirectional ratio ignores bridges") {
  auto base = build_base_graph(load_map(test::map_path("dumbbell-5-13")));
  MixedGuidanceGraph g = crisscross(base, 1);
  const int uni = test::count_unidirectional(g);
  CHECK(g.unidirectional_ratio() == doctest::Approx(double(uni) / base->num_non_bridge_edges()));
  for (int e : base->bridges()) CHECK(g.dir(e) == EdgeDir::Both);
}

TEST_CASE("crisscross period 1 on a 4x4 grid") {
  auto base = test::open_grid(4, 4);
  MixedGuidanceGraph g = crisscross(base, 1);
  // Rows alternate east / west starting with east.
  CHECK(g.dir(edge_between(*base, 0, 1)) == EdgeDir::Forward);
  CHECK(g.dir(edge_between(*base, 4, 5)) == EdgeDir::Backward);
  CHECK(g.dir(edge_between(*base, 8, 9)) == EdgeDir::Forward);
  // Columns alternate north / south starting with north.
  CHECK(g.dir(edge_between(*base, 0, 4)) == EdgeDir::Backward);
  CHECK(g.dir(edge_between(*base, 1, 5)) == EdgeDir::Forward);
  CHECK(g.dir(edge_between(*base, 2, 6)) == EdgeDir::Backward);
  // The top-left 2x2 block is a clockwise cycle: 0 -> 1 -> 5 -> 4 -> 0.
  CHECK(g.has_move(0, Heading::East));
  CHECK(g.has_move(1, Heading::South));
  CHECK(g.has_move(5, Heading::West));
  CHECK(g.has_move(4, Heading::North));
  CHECK(g.unidirectional_ratio() == 1.0);
  CHECK(is_strongly_connected(g));
}

TEST_CASE("crisscross period 2 on a 4x4 grid") {
  auto base = test::open_grid(4, 4);
  CHECK(max_crisscross_period(*base) == 2);
  MixedGuidanceGraph g = crisscross(base, 2);
  CHECK(g.dir(edge_between(*base, 4, 5)) == EdgeDir::Forward);
  CHECK(g.dir(edge_between(*base, 8, 9)) == EdgeDir::Backward);
  CHECK(g.dir(edge_between(*base, 1, 5)) == EdgeDir::Backward);
  CHECK(g.dir(edge_between(*base, 2, 6)) == EdgeDir::Forward);
  CHECK_THROWS_AS(crisscross(base, 3), Error);
  CHECK_THROWS_AS(crisscross(base, 0), Error);
}

TEST_CASE("dfs orientation is strongly connected; random orientation keeps bridges") {
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    auto base = test::random_connected_grid(6, 7, 0.3, rng);
    MixedGuidanceGraph d = dfs_orientation(base, static_cast<std::uint64_t>(t));
    d.validate();
    CHECK(test::strongly_connected_by_closure(d));
    MixedGuidanceGraph r = random_orientation(base, static_cast<std::uint64_t>(t));
    r.validate();
    CHECK(test::count_unidirectional(r) == base->num_non_bridge_edges());
    for (int e : base->bridges()) CHECK(r.dir(e) == EdgeDir::Both);
  }
}

TEST_CASE("graph JSON round trip") {
  Rng rng(9);
  auto base = test::random_connected_grid(5, 6, 0.2, rng);
  MixedGuidanceGraph g = test::random_weighted(base, rng);
  const auto j = graph_to_json(g);
  CHECK(graph_from_json(base, j) == g);
  CHECK(graph_from_json(base, nlohmann::json::parse(dump_json(j))) == g);
  for (const auto& e : j.at("edges")) {
    const std::string d = e.at("dir");
    CHECK(e.contains("w_forward") == (d != "backward"));
    CHECK(e.contains("w_backward") == (d != "forward"));
  }
}

TEST_CASE("graph JSON rejects graphs that do not fit the map") {
  auto base = test::open_grid(2, 2);
  auto j = graph_to_json(MixedGuidanceGraph(base));
  auto other = test::open_grid(2, 3);
  CHECK_THROWS_AS(graph_from_json(other, j), Error);
  auto bad = j;
  bad["edges"][0]["dir"] = "sideways";
  CHECK_THROWS_AS(graph_from_json(base, bad), Error);
  bad = j;
  bad["self_loops"][0] = -1.0;
  CHECK_THROWS_AS(graph_from_json(base, bad), Error);
  bad = j;
  bad.erase("edges");
  CHECK_THROWS_AS(graph_from_json(base, bad), Error);
}

TEST_CASE("tensor round trip and layout") {
  Rng rng(2);
  auto base = test::random_connected_grid(6, 5, 0.25, rng);
  MixedGuidanceGraph g = test::random_weighted(base, rng);
  GraphTensors t = to_tensors(g);
  CHECK(t.weights.data.channels() == 5);
  CHECK(t.dirs.data.channels() == 4);
  CHECK(from_tensors(base, t.weights, t.dirs, g.bounds()) == g);
  const Tensor mask = weight_validity_mask(*base);
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask.values()[static_cast<std::size_t>(i)] == 0.0) CHECK(t.weights.data.values()[static_cast<std::size_t>(i)] == 0.0);
  }
  for (CellId c = 0; c < base->map().cell_count(); ++c) {
    if (!base->map().passable(c)) {
      for (int ch = 0; ch < 5; ++ch) CHECK(t.weights.data.at(c, ch) == 0.0);
    }
  }
}

TEST_CASE("min-max normalization") {
  std::vector<double> v{2.0, 4.0, 3.0};
  min_max_normalize(v, {1.0, 5.0});
  CHECK(v == std::vector<double>{1.0, 5.0, 3.0});
  std::vector<double> flat{7.0, 7.0};
  min_max_normalize(flat, {0.1, 100.0});
  CHECK(flat[0] == doctest::Approx(50.05));
  std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS_AS(min_max_normalize(bad, {}), Error);
}

TEST_CASE("dependent decoding uses argmax with low-channel ties and forces bridges") {
  auto base = test::grid({"....", "...."});
  Tensor dirs(2, 4, 6);
  // East pair at cell 0: backward wins.
  dirs.at(0, 0) = 0.1;
  dirs.at(0, 1) = 0.9;
  dirs.at(0, 2) = 0.5;
  // South pair at cell 0: tie between forward and both goes to forward.
  dirs.at(0, 3) = 0.7;
  dirs.at(0, 4) = 0.2;
  dirs.at(0, 5) = 0.7;
  Tensor weights(2, 4, 5, 1.0);
  weights.at(5, kSelfLoopChannel) = 3.0;
  MixedGuidanceGraph g = decode_dependent(base, {dirs}, {weights}, {1.0, 2.0});
  CHECK(g.dir(edge_between(*base, 0, 1)) == EdgeDir::Backward);
  CHECK(g.dir(edge_between(*base, 0, 4)) == EdgeDir::Forward);
  // All-zero scores tie on every channel: forward.
  CHECK(g.dir(edge_between(*base, 2, 3)) == EdgeDir::Forward);
  CHECK(g.self_loop(5) == 2.0);
  CHECK(g.self_loop(0) == 1.0);
  g.validate();

  auto bridged = test::grid({"..."});
  Tensor d2(1, 3, 6);
  d2.at(0, 0) = 5.0;
  MixedGuidanceGraph b = decode_dependent(bridged, {d2}, {Tensor(1, 3, 5)});
  CHECK(b.dir(0) == EdgeDir::Both);
  CHECK(b.dir(1) == EdgeDir::Both);
}

TEST_CASE("bidirected decoding keeps every edge") {
  auto base = test::open_grid(3, 3);
  Tensor w(3, 3, 5);
  for (std::size_t i = 0; i < w.size(); ++i) w.values()[i] = static_cast<double>(i);
  MixedGuidanceGraph g = decode_bidirected(base, {w});
  CHECK(g.unidirectional_ratio() == 0.0);
  CHECK(g.edge_count() == base->max_mixed_edges());
  g.validate();
  CHECK_THROWS_AS(decode_bidirected(base, {Tensor(3, 4, 5)}), Error);
}

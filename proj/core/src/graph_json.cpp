#include "mggo/graph_json.hpp"

#include <fstream>
#include <sstream>

namespace mggo {

using nlohmann::json;

json base_graph_to_json(const BaseGraph& base) {
  json edges = json::array();
  for (const auto& e : base.edges()) edges.push_back({e.u, e.v});
  json bridges = json::array();
  for (int b : base.bridges()) {
    const auto& e = base.edges()[static_cast<std::size_t>(b)];
    bridges.push_back({e.u, e.v});
  }
  return json{{"name", base.map().name()},
              {"height", base.height()},
              {"width", base.width()},
              {"vertices", std::vector<CellId>(base.vertices().begin(), base.vertices().end())},
              {"edges", std::move(edges)},
              {"bridges", std::move(bridges)},
              {"biconnected", base.biconnected()}};
}

json graph_to_json(const MixedGuidanceGraph& g) {
  const BaseGraph& base = g.base();
  json edges = json::array();
  for (int e = 0; e < base.num_edges(); ++e) {
    const auto& edge = base.edges()[static_cast<std::size_t>(e)];
    json je{{"u", edge.u}, {"v", edge.v}, {"dir", to_string(g.dir(e))}};
    if (has_forward(g.dir(e))) je["w_forward"] = g.forward_weight(e);
    if (has_backward(g.dir(e))) je["w_backward"] = g.backward_weight(e);
    edges.push_back(std::move(je));
  }
  json loops = json::array();
  for (CellId c : base.vertices()) loops.push_back(g.self_loop(c));
  return json{{"map_name", base.map().name()},
              {"omega_lb", g.bounds().lower},
              {"omega_ub", g.bounds().upper},
              {"edges", std::move(edges)},
              {"self_loops", std::move(loops)}};
}

MixedGuidanceGraph graph_from_json(BaseGraphPtr base, const json& j) {
  try {
    WeightBounds bounds{j.at("omega_lb").get<double>(), j.at("omega_ub").get<double>()};
    MixedGuidanceGraph g(base, bounds);
    const auto& edges = j.at("edges");
    if (!edges.is_array() || edges.size() != static_cast<std::size_t>(base->num_edges())) {
      throw Error(ErrorKind::Invariant, "graph JSON edge count does not match the map");
    }
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(base->num_edges()), 0);
    for (const auto& je : edges) {
      const CellId u = je.at("u").get<CellId>();
      const CellId v = je.at("v").get<CellId>();
      const auto& map = base->map();
      if (u < 0 || v < 0 || u >= map.cell_count() || v >= map.cell_count() || u >= v) {
        throw Error(ErrorKind::Invariant, "graph JSON edge has invalid endpoints");
      }
      const Heading h = v == u + 1 ? Heading::East : Heading::South;
      const int e = base->edge_at(u, h);
      if (e < 0 || base->edges()[static_cast<std::size_t>(e)].v != v) {
        throw Error(ErrorKind::Invariant, "graph JSON edge (" + std::to_string(u) + "," +
                                              std::to_string(v) + ") is not in the map");
      }
      if (seen[static_cast<std::size_t>(e)]++) {
        throw Error(ErrorKind::Invariant, "graph JSON lists an edge twice");
      }
      const EdgeDir d = parse_edge_dir(je.at("dir").get<std::string>());
      const double wf = has_forward(d) ? je.at("w_forward").get<double>() : 0.0;
      const double wb = has_backward(d) ? je.at("w_backward").get<double>() : 0.0;
      g.set_edge(e, d, wf, wb);
    }
    const auto& loops = j.at("self_loops");
    if (!loops.is_array() || loops.size() != static_cast<std::size_t>(base->num_vertices())) {
      throw Error(ErrorKind::Invariant, "graph JSON self-loop count does not match the map");
    }
    for (std::size_t i = 0; i < loops.size(); ++i) {
      g.set_self_loop(base->vertices()[i], loops[i].get<double>());
    }
    g.validate();
    return g;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed graph JSON: ") + ex.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, path.string() + ": " + ex.what());
  }
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mggo

#pragma once

#include <filesystem>

#include <json.hpp>

#include "mggo/guidance_graph.hpp"

namespace mggo {

/// {name, height, width, vertices, edges: [[u, v], ...], bridges: [[u, v], ...], biconnected}
nlohmann::json base_graph_to_json(const BaseGraph& base);

/// Interchange format:
///   {map_name, omega_lb, omega_ub,
///    edges: [{u, v, dir, w_forward?, w_backward?}],
///    self_loops: [cost per vertex, in vertex order]}
/// Edges appear in base edge order with u < v.
nlohmann::json graph_to_json(const MixedGuidanceGraph& g);

/// Rebuilds a graph over `base`; rejects edges the base does not have,
/// missing edges, and any invariant violation.
MixedGuidanceGraph graph_from_json(BaseGraphPtr base, const nlohmann::json& j);

/// Pretty-printed JSON followed by a newline.
std::string dump_json(const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace mggo

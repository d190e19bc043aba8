#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satorder/cnf.hpp"
#include "satorder/labeling.hpp"

namespace satorder::graphx {

enum class NodeKind { Variable, Clause, Meta };

std::string_view to_string(NodeKind k);
NodeKind parse_node_kind(std::string_view s);

/// kind one-hot (3) followed by degree-quartile one-hot (4).
inline constexpr std::size_t kFeatureDims = 7;

struct Node {
  std::size_t id = 0;
  NodeKind kind = NodeKind::Variable;
  std::optional<Var> var_index;
  std::vector<double> features;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Literal edges run variable -> clause with weight +1 (positive) or -1
/// (negated); meta edges run meta -> clause with weight 0.
struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  int weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Tripartite graph. Nodes 0..n-1 are variables 1..n, n..n+m-1 are clauses
/// in formula order, and the meta node is last.
struct GraphInstance {
  std::string instance_id;
  std::size_t num_vars = 0;
  std::size_t num_clauses = 0;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t meta_node() const { return num_vars + num_clauses; }

  friend bool operator==(const GraphInstance&, const GraphInstance&) = default;
};

/// 25th/50th/75th percentiles with linear interpolation between order statistics.
std::array<double, 3> quartile_bounds(std::span<const std::size_t> degrees);

/// 0..3; a degree equal to a boundary falls in the lower bucket.
std::size_t quartile_bucket(double degree, const std::array<double, 3>& bounds);

GraphInstance to_graph(const cnf::Formula& formula);

struct GraphRecord {
  GraphInstance graph;
  std::optional<std::vector<Var>> label_order;
  std::optional<std::vector<double>> label_scores;
};

std::string to_json_line(const GraphInstance& graph, const labeling::LabelRecord* label = nullptr);
GraphRecord parse_json_line(std::string_view line);

/// Writes one JSON record per line. `labels`, when non-empty, must align
/// with `graphs` by index and instance_id.
void export_graphs(const std::filesystem::path& path, std::span<const GraphInstance> graphs,
                   std::span<const labeling::LabelRecord> labels = {}, bool append = false);
std::vector<GraphRecord> read_graphs(const std::filesystem::path& path);

}  // namespace satorder::graphx

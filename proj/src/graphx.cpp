#include "satorder/graphx.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace satorder::graphx {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Variable: return "variable";
    case NodeKind::Clause: return "clause";
    case NodeKind::Meta: return "meta";
  }
  return "?";
}

NodeKind parse_node_kind(std::string_view s) {
  if (s == "variable") return NodeKind::Variable;
  if (s == "clause") return NodeKind::Clause;
  if (s == "meta") return NodeKind::Meta;
  throw std::invalid_argument("unknown node kind '" + std::string(s) + "'");
}

std::array<double, 3> quartile_bounds(std::span<const std::size_t> degrees) {
  if (degrees.empty()) return {0.0, 0.0, 0.0};
  std::vector<std::size_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) + frac * (static_cast<double>(sorted[hi]) - static_cast<double>(sorted[lo]));
  };
  return {at(0.25), at(0.50), at(0.75)};
}

std::size_t quartile_bucket(double degree, const std::array<double, 3>& bounds) {
  for (std::size_t b = 0; b < 3; ++b) {
    if (degree <= bounds[b]) return b;
  }
  return 3;
}

namespace {

std::vector<double> features_for(NodeKind kind, std::size_t bucket) {
  std::vector<double> f(kFeatureDims, 0.0);
  f[static_cast<std::size_t>(kind)] = 1.0;
  f[3 + bucket] = 1.0;
  return f;
}

}  // namespace

GraphInstance to_graph(const cnf::Formula& formula) {
  formula.validate();
  GraphInstance g;
  g.instance_id = formula.source_name;
  g.num_vars = formula.num_vars;
  g.num_clauses = formula.clauses.size();
  const std::size_t n = g.num_vars;
  const std::size_t m = g.num_clauses;

  std::vector<std::size_t> var_degree(n, 0);
  std::vector<std::size_t> clause_degree(m, 1);  // meta edge
  g.edges.reserve(formula.num_literals() + m);
  for (std::size_t c = 0; c < m; ++c) {
    for (const cnf::Literal& lit : formula.clauses[c]) {
      g.edges.push_back(Edge{lit.var - 1, n + c, lit.positive ? 1 : -1});
      ++var_degree[lit.var - 1];
      ++clause_degree[c];
    }
  }
  for (std::size_t c = 0; c < m; ++c) g.edges.push_back(Edge{n + m, n + c, 0});

  const auto var_bounds = quartile_bounds(var_degree);
  const auto clause_bounds = quartile_bounds(clause_degree);
  g.nodes.reserve(n + m + 1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto bucket = quartile_bucket(static_cast<double>(var_degree[v]), var_bounds);
    g.nodes.push_back(Node{v, NodeKind::Variable, static_cast<Var>(v + 1), features_for(NodeKind::Variable, bucket)});
  }
  for (std::size_t c = 0; c < m; ++c) {
    const auto bucket = quartile_bucket(static_cast<double>(clause_degree[c]), clause_bounds);
    g.nodes.push_back(Node{n + c, NodeKind::Clause, std::nullopt, features_for(NodeKind::Clause, bucket)});
  }
  g.nodes.push_back(Node{n + m, NodeKind::Meta, std::nullopt, features_for(NodeKind::Meta, 3)});
  return g;
}

std::string to_json_line(const GraphInstance& graph, const labeling::LabelRecord* label) {
  nlohmann::json kinds = nlohmann::json::array();
  nlohmann::json features = nlohmann::json::array();
  for (const Node& node : graph.nodes) {
    kinds.push_back(to_string(node.kind));
    features.push_back(node.features);
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : graph.edges) edges.push_back({e.src, e.dst, e.weight});
  nlohmann::json j{{"instance_id", graph.instance_id},
                   {"num_vars", graph.num_vars},
                   {"num_clauses", graph.num_clauses},
                   {"node_kinds", std::move(kinds)},
                   {"features", std::move(features)},
                   {"edge_list", std::move(edges)}};
  if (label) {
    if (label->instance_id != graph.instance_id) {
      throw std::invalid_argument("label '" + label->instance_id + "' does not match graph '" + graph.instance_id + "'");
    }
    if (label->order.size() != graph.num_vars) {
      throw std::invalid_argument("label for '" + graph.instance_id + "' has the wrong variable count");
    }
    auto perm = label->order.permutation();
    j["label_order"] = std::vector<Var>(perm.begin(), perm.end());
    j["label_scores"] = label->scores;
  }
  return j.dump();
}

GraphRecord parse_json_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  GraphRecord rec;
  GraphInstance& g = rec.graph;
  g.instance_id = j.at("instance_id").get<std::string>();
  g.num_vars = j.at("num_vars").get<std::size_t>();
  g.num_clauses = j.at("num_clauses").get<std::size_t>();
  const auto& kinds = j.at("node_kinds");
  const auto& features = j.at("features");
  if (kinds.size() != g.num_vars + g.num_clauses + 1 || features.size() != kinds.size()) {
    throw std::invalid_argument("graph '" + g.instance_id + "': node count does not match num_vars + num_clauses + 1");
  }
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Node node;
    node.id = i;
    node.kind = parse_node_kind(kinds[i].get<std::string>());
    if (node.kind == NodeKind::Variable) node.var_index = static_cast<Var>(i + 1);
    node.features = features[i].get<std::vector<double>>();
    g.nodes.push_back(std::move(node));
  }
  for (const auto& e : j.at("edge_list")) {
    g.edges.push_back(Edge{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<int>()});
  }
  if (j.contains("label_order")) rec.label_order = j["label_order"].get<std::vector<Var>>();
  if (j.contains("label_scores")) rec.label_scores = j["label_scores"].get<std::vector<double>>();
  return rec;
}

void export_graphs(const std::filesystem::path& path, std::span<const GraphInstance> graphs,
                   std::span<const labeling::LabelRecord> labels, bool append) {
  if (!labels.empty() && labels.size() != graphs.size()) {
    throw std::invalid_argument("label count does not match graph count");
  }
  std::ofstream out(path, append ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    out << to_json_line(graphs[i], labels.empty() ? nullptr : &labels[i]) << '\n';
  }
}

std::vector<GraphRecord> read_graphs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<GraphRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace satorder::graphx

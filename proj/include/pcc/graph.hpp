#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pcc {

using NodeId = std::uint32_t;

// Undirected, unweighted simple graph on dense ids [0, node_count).
class Graph {
 public:
  explicit Graph(std::size_t node_count);

  // Rejects self-loops and out-of-range ids; returns false if the edge
  // already exists.
  bool add_edge(NodeId u, NodeId v);
  bool has_edge(NodeId u, NodeId v) const;

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

  // Neighbors in ascending id order.
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }

  // Edges as (u, v) with u < v, lexicographically sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

enum class Topology { kEr, kBaStatic };

std::string to_string(Topology topology);
Topology parse_topology(const std::string& text);

struct GraphSpec {
  Topology topology = Topology::kEr;
  std::size_t node_count = 100;
  double avg_degree = 6.0;
  // Static-model weight exponent; 0.5 gives a degree exponent near 3.
  double weight_exponent = 0.5;
  std::uint64_t seed = 0;
};

void validate(const GraphSpec& spec);

// Each of the C(N,2) pairs is present independently with p = <k>/(N-1).
Graph gen_er(const GraphSpec& spec);

// Static scale-free model: node weights (i+1)^-alpha, pairs drawn with
// probability proportional to w_i w_j until floor(N <k> / 2) distinct edges.
Graph gen_ba_static(const GraphSpec& spec);

Graph generate_graph(const GraphSpec& spec);

// "# nodes=N" header followed by one "u v" line per edge.
void write_edge_list(std::ostream& out, const Graph& graph);
void write_edge_list(const std::string& path, const Graph& graph);
Graph read_edge_list(std::istream& in);
Graph read_edge_list(const std::string& path);

}  // namespace pcc

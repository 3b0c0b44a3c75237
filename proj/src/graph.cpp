#include "pcc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pcc/error.hpp"
#include "pcc/random.hpp"

namespace pcc {

Graph::Graph(std::size_t node_count) : adjacency_(node_count) {}

bool Graph::add_edge(NodeId u, NodeId v) {
  if (u >= node_count() || v >= node_count()) {
    fail(ErrorKind::kValidation, "edge endpoint out of range: " +
                                     std::to_string(u) + " " + std::to_string(v));
  }
  if (u == v) fail(ErrorKind::kValidation, "self-loop on node " + std::to_string(u));
  auto& nu = adjacency_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it != nu.end() && *it == v) return false;
  nu.insert(it, v);
  auto& nv = adjacency_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edge_count_;
  return true;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count() || v >= node_count()) return false;
  const auto& nu = adjacency_[u];
  return std::binary_search(nu.begin(), nu.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::string to_string(Topology topology) {
  return topology == Topology::kEr ? "ER" : "BA";
}

Topology parse_topology(const std::string& text) {
  if (text == "ER" || text == "er") return Topology::kEr;
  if (text == "BA" || text == "ba" || text == "BA_STATIC") return Topology::kBaStatic;
  fail(ErrorKind::kValidation, "unknown topology '" + text + "'");
}

void validate(const GraphSpec& spec) {
  if (spec.node_count < 2) fail(ErrorKind::kValidation, "node_count must be >= 2");
  if (spec.node_count > std::numeric_limits<NodeId>::max()) {
    fail(ErrorKind::kValidation, "node_count too large");
  }
  const double max_degree = static_cast<double>(spec.node_count - 1);
  if (!(spec.avg_degree > 0.0) || spec.avg_degree > max_degree) {
    fail(ErrorKind::kValidation, "avg_degree must lie in (0, N-1]");
  }
  if (!(spec.weight_exponent >= 0.0)) {
    fail(ErrorKind::kValidation, "weight_exponent must be >= 0");
  }
}

Graph gen_er(const GraphSpec& spec) {
  validate(spec);
  const std::size_t n = spec.node_count;
  const double p = spec.avg_degree / static_cast<double>(n - 1);
  Graph graph(n);
  Rng rng = make_rng(spec.seed);
  for (NodeId u = 0; u + 1 < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (bernoulli(rng, p)) graph.add_edge(u, v);
    }
  }
  return graph;
}

Graph gen_ba_static(const GraphSpec& spec) {
  validate(spec);
  const std::size_t n = spec.node_count;
  const auto target = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * spec.avg_degree / 2.0));
  const std::size_t max_edges = n * (n - 1) / 2;
  if (target > max_edges) {
    fail(ErrorKind::kValidation, "requested " + std::to_string(target) +
                                     " edges exceeds C(N,2) = " + std::to_string(max_edges));
  }

  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::pow(static_cast<double>(i + 1), -spec.weight_exponent);
    cumulative[i] = total;
  }
  Rng rng = make_rng(spec.seed);
  auto draw = [&]() -> NodeId {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<NodeId>(it - cumulative.begin());
  };

  Graph graph(n);
  const std::size_t max_draws = 1000 * std::max<std::size_t>(target, 1);
  std::size_t draws = 0;
  while (graph.edge_count() < target) {
    if (draws++ >= max_draws) {
      fail(ErrorKind::kConvergence,
           "static model reached " + std::to_string(graph.edge_count()) + " of " +
               std::to_string(target) + " edges within " + std::to_string(max_draws) +
               " draws");
    }
    const NodeId u = draw();
    const NodeId v = draw();
    if (u != v) graph.add_edge(u, v);
  }
  return graph;
}

Graph generate_graph(const GraphSpec& spec) {
  return spec.topology == Topology::kEr ? gen_er(spec) : gen_ba_static(spec);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# nodes=" << graph.node_count() << '\n';
  for (auto [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(const std::string& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  write_edge_list(out, graph);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t nodes = 0;
  bool have_header = false;
  std::vector<std::pair<unsigned long long, unsigned long long>> pending;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("nodes=");
      if (pos != std::string::npos) {
        nodes = std::stoull(line.substr(pos + 6));
        have_header = true;
      }
      continue;
    }
    std::istringstream fields(line);
    unsigned long long u = 0, v = 0;
    if (!(fields >> u >> v)) {
      fail(ErrorKind::kParse, "edge list line " + std::to_string(line_no) + ": expected 'u v'");
    }
    pending.emplace_back(u, v);
  }
  if (!have_header) fail(ErrorKind::kParse, "edge list missing '# nodes=N' header");
  Graph graph(nodes);
  for (auto [u, v] : pending) {
    if (u >= nodes || v >= nodes) {
      fail(ErrorKind::kParse, "edge " + std::to_string(u) + " " + std::to_string(v) +
                                  " outside declared node range");
    }
    graph.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return graph;
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  return read_edge_list(in);
}

}  // namespace pcc

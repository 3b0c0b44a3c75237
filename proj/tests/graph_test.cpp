#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "doctest.h"
#include "pcc/error.hpp"
#include "pcc/graph.hpp"
#include "support.hpp"

using namespace pcc;
using pcc::testing::error_kind;

namespace {

void check_simple(const Graph& g) {
  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nb = g.neighbors(v);
    degree_sum += nb.size();
    for (std::size_t i = 0; i < nb.size(); ++i) {
      REQUIRE(nb[i] != v);
      if (i > 0) REQUIRE(nb[i - 1] < nb[i]);
      REQUIRE(g.has_edge(nb[i], v));
    }
  }
  REQUIRE(degree_sum == 2 * g.edge_count());
}

GraphSpec spec(Topology t, std::size_t n, double k, std::uint64_t seed, double alpha = 0.5) {
  GraphSpec s;
  s.topology = t;
  s.node_count = n;
  s.avg_degree = k;
  s.seed = seed;
  s.weight_exponent = alpha;
  return s;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("graph container rejects self loops and reports duplicates") {
  Graph g(3);
  CHECK(g.add_edge(0, 1));
  CHECK_FALSE(g.add_edge(1, 0));
  CHECK(g.edge_count() == 1);
  CHECK_THROWS_AS(g.add_edge(2, 2), Error);
  CHECK_THROWS_AS(g.add_edge(0, 3), Error);
  CHECK(g.edges() == std::vector<std::pair<NodeId, NodeId>>{{0, 1}});
}

TEST_CASE("er mean edge count over 1000 seeds") {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto g = gen_er(spec(Topology::kEr, 100, 6.0, seed));
    if (seed < 20) check_simple(g);
    total += static_cast<double>(g.edge_count());
  }
  const double mean = total / 1000.0;
  CHECK(std::abs(mean - 300.0) / 300.0 < 0.03);
}

TEST_CASE("er two nodes degree one is forced") {
  const auto g = gen_er(spec(Topology::kEr, 2, 1.0, 5));
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(0, 1));
}

TEST_CASE("er vanishing degree gives empty graph") {
  const auto g = gen_er(spec(Topology::kEr, 100, 1e-12, 1));
  CHECK(g.edge_count() == 0);
}

TEST_CASE("er spec validation") {
  for (auto bad : {spec(Topology::kEr, 1, 0.5, 0), spec(Topology::kEr, 10, 9.5, 0),
                   spec(Topology::kEr, 10, 0.0, 0)}) {
    CHECK(error_kind([&] { gen_er(bad); }) == ErrorKind::kValidation);
  }
}

TEST_CASE("static model edge count and tail exponent") {
  const auto g = gen_ba_static(spec(Topology::kBaStatic, 1000, 6.0, 7));
  check_simple(g);
  CHECK(g.edge_count() == 3000);

  // least squares slope of log CCDF against log degree, degrees >= 10
  std::map<std::size_t, std::size_t> hist;
  for (NodeId v = 0; v < g.node_count(); ++v) ++hist[g.degree(v)];
  std::vector<std::pair<double, double>> pts;
  std::size_t above = g.node_count();
  for (const auto& [k, c] : hist) {
    if (k >= 10) pts.emplace_back(std::log(static_cast<double>(k)),
                                  std::log(static_cast<double>(above) / 1000.0));
    above -= c;
  }
  REQUIRE(pts.size() >= 5);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double gamma = 1.0 - slope;
  INFO("tail exponent " << gamma);
  CHECK(gamma >= 2.5);
  CHECK(gamma <= 3.5);
}

TEST_CASE("static model with flat weights matches uniform pair sampling") {
  const auto g = gen_ba_static(spec(Topology::kBaStatic, 500, 4.0, 11, 0.0));
  REQUIRE(g.edge_count() == 1000);
  // Degree of a node under uniform sampling of M distinct pairs is
  // hypergeometric; Binomial(N-1, M / C(N,2)) is the standard approximation.
  const double p = 1000.0 / (500.0 * 499.0 / 2.0);
  boost::math::binomial dist(499.0, p);
  std::vector<double> obs, exp;
  std::map<std::size_t, std::size_t> hist;
  for (NodeId v = 0; v < 500; ++v) ++hist[g.degree(v)];
  // bins: <=1, 2..8 individually, >=9
  auto add_bin = [&](double o, double e) {
    obs.push_back(o);
    exp.push_back(e * 500.0);
  };
  double o = 0;
  for (std::size_t k = 0; k <= 1; ++k) o += static_cast<double>(hist[k]);
  add_bin(o, boost::math::cdf(dist, 1.0));
  for (std::size_t k = 2; k <= 8; ++k)
    add_bin(static_cast<double>(hist[k]), boost::math::pdf(dist, static_cast<double>(k)));
  o = 0;
  for (const auto& [k, c] : hist)
    if (k >= 9) o += static_cast<double>(c);
  add_bin(o, boost::math::cdf(boost::math::complement(dist, 8.0)));
  const double pv = pcc::testing::chi_square_p_value(obs, exp);
  INFO("p = " << pv);
  CHECK(pv > 0.01);
}

TEST_CASE("static model rejects more edges than pairs") {
  CHECK(error_kind([] { gen_ba_static(spec(Topology::kBaStatic, 10, 9.5, 0)); }) ==
        ErrorKind::kValidation);
}

TEST_CASE("generators are deterministic per seed") {
  for (auto t : {Topology::kEr, Topology::kBaStatic}) {
    const auto a = generate_graph(spec(t, 300, 6.0, 42));
    const auto b = generate_graph(spec(t, 300, 6.0, 42));
    const auto c = generate_graph(spec(t, 300, 6.0, 43));
    CHECK(a == b);
    CHECK_FALSE(a == c);
  }
}

TEST_CASE("edge list round trip") {
  const auto g = generate_graph(spec(Topology::kBaStatic, 50, 4.0, 3));
  std::stringstream ss;
  write_edge_list(ss, g);
  CHECK(ss.str().rfind("# nodes=50\n", 0) == 0);
  CHECK(read_edge_list(ss) == g);

  std::istringstream bad("# nodes=3\n0 0\n");
  CHECK_THROWS_AS(read_edge_list(bad), Error);
}

TEST_CASE("topology names") {
  CHECK(parse_topology("ER") == Topology::kEr);
  CHECK(parse_topology(to_string(Topology::kBaStatic)) == Topology::kBaStatic);
  CHECK_THROWS_AS(parse_topology("WS"), Error);
}

}  // TEST_SUITE

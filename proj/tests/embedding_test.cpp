#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pcc/cascade.hpp"
#include "pcc/embedding.hpp"
#include "pcc/error.hpp"
#include "pcc/graph.hpp"
#include "pcc/metrics.hpp"
#include "support.hpp"

using namespace pcc;
using pcc::testing::error_kind;

namespace {

PredictorSpec make_spec(Variant v, std::size_t dim, std::size_t epochs, std::uint64_t seed) {
  PredictorSpec s;
  s.variant = v;
  s.latent_dim = dim;
  s.epochs = epochs;
  s.seed = seed;
  return s;
}

CascadeSet er_ic_cascades(std::size_t m, std::uint64_t seed) {
  GraphSpec gs;
  gs.node_count = 100;
  gs.seed = seed;
  SimConfig cfg;
  cfg.target_length = 10;
  return generate_cascade_set(generate_graph(gs), cfg, m, seed + 1);
}

double test_map(const EmbeddingModel& model, const std::vector<Cascade>& test) {
  std::vector<PredictedRanking> preds;
  for (const auto& c : test) preds.push_back(model.predict(c.source(), model.universe_size() - 1));
  return mean_average_precision(test, preds);
}

void set_vec(std::span<double> dst, std::initializer_list<double> values) {
  std::copy(values.begin(), values.end(), dst.begin());
}

}  // namespace

TEST_SUITE("embedding") {

TEST_CASE("heat kernel values") {
  CHECK(std::abs(heat_kernel(0.5, 3, 0.0) - std::pow(4.0 * std::numbers::pi * 0.5, -1.5)) < 1e-15);
  CHECK(std::abs(heat_kernel(1.0 / (4.0 * std::numbers::pi), 2, 1.0) - 0.04321391826377226) < 1e-6);
  CHECK(error_kind([] { heat_kernel(0.0, 2, 1.0); }) == ErrorKind::kDomain);
  CHECK(error_kind([] { heat_kernel(-1.0, 2, 1.0); }) == ErrorKind::kDomain);
}

TEST_CASE("hinge gradients agree with central differences") {
  const auto check = pcc::testing::check_hinge_gradients(99, 100);
  CHECK(check.instances == 100);
  CHECK(check.max_relative_error <= 1e-5);
}

TEST_CASE("hinge step moves against the gradient") {
  std::vector<double> s{0.1, -0.3}, p{1.0, 0.5}, n{0.2, -0.2};
  const auto term = hinge_term(s, p, n, 1.0);
  REQUIRE(term.loss > 0.0);
  auto s2 = s, p2 = p, n2 = n;
  const double loss = hinge_step(s2, p2, n2, 1.0, 0.1);
  CHECK(loss == term.loss);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(s2[i] - (s[i] - 0.1 * term.grad_source[i])) < 1e-15);
    CHECK(std::abs(p2[i] - (p[i] - 0.1 * term.grad_positive[i])) < 1e-15);
    CHECK(std::abs(n2[i] - (n[i] - 0.1 * term.grad_negative[i])) < 1e-15);
  }
  CHECK(hinge_term(s2, p2, n2, 1.0).loss < term.loss);

  // inactive term: zero loss, parameters untouched
  std::vector<double> a{0, 0}, b{0, 0}, c{5, 5};
  CHECK(hinge_step(a, b, c, 1.0, 0.1) == 0.0);
  CHECK(c == std::vector<double>{5, 5});
}

TEST_CASE("hand-set cdk scores and ranking") {
  auto model = EmbeddingModel::initialize(make_spec(Variant::kCdk, 2, 0, 1), 3);
  set_vec(model.mutable_source_vector(0), {0, 0});  // s
  set_vec(model.mutable_source_vector(1), {1, 0});  // a
  set_vec(model.mutable_source_vector(2), {0, 2});  // b
  CHECK(model.score(0, 1) == -1.0);
  CHECK(model.score(0, 2) == -4.0);
  CHECK(model.predict(0, 2).ranking == std::vector<NodeId>{1, 2});
  set_vec(model.mutable_source_vector(2), {0, 0});
  CHECK(model.score(0, 2) == 0.0);
  CHECK(model.predict(0, 1).ranking == std::vector<NodeId>{2});
}

TEST_CASE("ties break by ascending id") {
  auto model = EmbeddingModel::initialize(make_spec(Variant::kCdk, 1, 0, 1), 5);
  for (NodeId v = 0; v < 5; ++v) set_vec(model.mutable_source_vector(v), {v == 2 ? 0.0 : 1.0});
  CHECK(model.predict(2, 4).ranking == std::vector<NodeId>{0, 1, 3, 4});
}

TEST_CASE("score and predict validate ids") {
  const auto model = EmbeddingModel::initialize(make_spec(Variant::kPae, 3, 0, 1), 6);
  CHECK(error_kind([&] { model.score(0, 6); }) == ErrorKind::kDomain);
  CHECK(error_kind([&] { model.score(7, 1); }) == ErrorKind::kDomain);
  CHECK(error_kind([&] { model.predict(6, 2); }) == ErrorKind::kDomain);
  CHECK(error_kind([&] { model.predict(0, 6); }) == ErrorKind::kDomain);
}

TEST_CASE("full-length prediction is a permutation of the other nodes") {
  for (auto v : {Variant::kCdk, Variant::kPae, Variant::kIae, Variant::kRandom}) {
    const auto model = EmbeddingModel::initialize(make_spec(v, 4, 0, 3), 30);
    const auto pred = model.predict(7, 29);
    std::set<NodeId> seen(pred.ranking.begin(), pred.ranking.end());
    CHECK(seen.size() == 29);
    CHECK_FALSE(seen.contains(7));
    validate(pred);
  }
}

TEST_CASE("random predictor is a seeded uniform permutation") {
  const auto a = EmbeddingModel::random(5, 10);
  const auto b = EmbeddingModel::random(5, 10);
  const auto c = EmbeddingModel::random(6, 10);
  CHECK(a.predict(0, 9) == b.predict(0, 9));
  CHECK_FALSE(a.predict(0, 9) == c.predict(0, 9));
  // first-ranked node uniform over the 4 candidates of a 5-node universe
  std::vector<std::size_t> counts(4, 0);
  for (std::uint64_t seed = 0; seed < 8000; ++seed)
    ++counts[EmbeddingModel::random(seed, 5).predict(0, 1).ranking[0] - 1];
  CHECK(pcc::testing::chi_square_uniform_p(counts) > 0.01);
}

TEST_CASE("ranking by kernel value equals ranking by score") {
  const auto data = er_ic_cascades(60, 4);
  const auto model = train(make_spec(Variant::kCdk, 3, 5, 2), data);
  for (NodeId s : {0u, 17u, 55u}) {
    std::vector<std::pair<double, NodeId>> by_kernel;
    for (NodeId v = 0; v < 100; ++v)
      if (v != s) by_kernel.emplace_back(heat_kernel(0.7, 3, -model.score(s, v)), v);
    std::stable_sort(by_kernel.begin(), by_kernel.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<NodeId> ids;
    for (auto& kv : by_kernel) ids.push_back(kv.second);
    CHECK(ids == model.predict(s, 99).ranking);
  }
}

TEST_CASE("zero epochs leaves the seeded initialization") {
  const auto data = er_ic_cascades(20, 1);
  for (auto v : {Variant::kCdk, Variant::kPae, Variant::kIae}) {
    const auto spec = make_spec(v, 4, 0, 11);
    CHECK(train(spec, data) == EmbeddingModel::initialize(spec, data.universe_size));
  }
}

TEST_CASE("training is deterministic and stays finite") {
  const auto data = er_ic_cascades(80, 2);
  for (auto v : {Variant::kCdk, Variant::kPae, Variant::kIae}) {
    const auto spec = make_spec(v, 5, 10, 21);
    const auto a = train(spec, data);
    const auto b = train(spec, data);
    CHECK(a == b);
    CHECK(a.all_finite());
    CHECK_FALSE(a == train(make_spec(v, 5, 10, 22), data));
  }
}

TEST_CASE("iae allocates spaces only for trained sources") {
  const auto data = er_ic_cascades(40, 6);
  const auto model = train(make_spec(Variant::kIae, 3, 2, 1), data);
  std::set<NodeId> sources;
  for (const auto& c : data.cascades) sources.insert(c.source());
  CHECK(model.allocated_source_spaces() == sources.size());
  for (NodeId s : sources) CHECK(model.has_source_space(s));
  NodeId unseen = 0;
  while (sources.contains(unseen)) ++unseen;
  CHECK_FALSE(model.has_source_space(unseen));
  // unseen sources still score, deterministically
  const double x = model.score(unseen, unseen == 0 ? 1 : 0);
  CHECK(std::isfinite(x));
  CHECK(x == model.score(unseen, unseen == 0 ? 1 : 0));
}

TEST_CASE("untrainable variants") {
  const auto data = er_ic_cascades(10, 1);
  CHECK(error_kind([&] { train(make_spec(Variant::kRandom, 2, 1, 1), data); }) ==
        ErrorKind::kUnsupported);
  auto ext = make_spec(Variant::kExternal, 2, 1, 1);
  ext.external_path = "x";
  CHECK(error_kind([&] { train(ext, data); }) == ErrorKind::kUnsupported);
  CHECK(error_kind([&] { train(make_spec(Variant::kCdk, 0, 1, 1), data); }) ==
        ErrorKind::kValidation);
}

TEST_CASE("model save and load round trip") {
  const auto data = er_ic_cascades(30, 3);
  for (auto v : {Variant::kCdk, Variant::kPae, Variant::kIae}) {
    const auto model = train(make_spec(v, 3, 2, 4), data);
    std::stringstream ss;
    model.save(ss);
    const auto back = EmbeddingModel::load(ss);
    CHECK(back == model);
    CHECK(back.predict(5, 10) == model.predict(5, 10));
  }
  const auto rnd = EmbeddingModel::random(9, 12);
  std::stringstream ss;
  rnd.save(ss);
  CHECK(EmbeddingModel::load(ss) == rnd);

  std::istringstream junk("not a model");
  CHECK(error_kind([&] { EmbeddingModel::load(junk); }) == ErrorKind::kParse);
}

TEST_CASE("cdk beats the random baseline by three standard deviations") {
  const auto all = er_ic_cascades(250, 12);
  CascadeSet train_set{{all.cascades.begin(), all.cascades.begin() + 200}, all.universe_size};
  const std::vector<Cascade> test(all.cascades.begin() + 200, all.cascades.end());

  const double cdk = test_map(train(make_spec(Variant::kCdk, 5, 50, 1), train_set), test);
  std::vector<double> baseline;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    baseline.push_back(test_map(EmbeddingModel::random(seed, all.universe_size), test));
  double mean = 0.0;
  for (double b : baseline) mean += b;
  mean /= 20.0;
  double var = 0.0;
  for (double b : baseline) var += (b - mean) * (b - mean);
  const double sd = std::sqrt(var / 19.0);
  INFO("cdk " << cdk << " random " << mean << " +- " << sd);
  CHECK(cdk >= mean + 3.0 * sd);
}

TEST_CASE("variant names") {
  for (auto v : {Variant::kCdk, Variant::kPae, Variant::kIae, Variant::kExternal, Variant::kRandom})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK(error_kind([] { parse_variant("LSTM"); }) == ErrorKind::kValidation);
}

}  // TEST_SUITE

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pcc/error.hpp"
#include "pcc/metrics.hpp"
#include "support.hpp"

using namespace pcc;
using pcc::testing::error_kind;

namespace {

// s=0, a=1, b=2, x=3
const Cascade kTruth{{0, 1, 2}};

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("ap examples") {
  CHECK(average_precision(kTruth, {0, {1, 2, 3}}) == 1.0);
  CHECK(average_precision(kTruth, {0, {2, 1, 3}}) == 1.0);
  CHECK(std::abs(average_precision(kTruth, {0, {3, 1, 2}}) - 7.0 / 12.0) < 1e-15);
  CHECK(std::abs(pcc::testing::naive_ap(kTruth, {0, {3, 1, 2}}) - 7.0 / 12.0) < 1e-15);
  // missing recipient contributes 0
  CHECK(average_precision(kTruth, {0, {1, 3}}) == 0.5);
  CHECK(average_precision(kTruth, {0, {3}}) == 0.0);
  CHECK(error_kind([] { average_precision(Cascade{{4}}, {4, {1}}); }) == ErrorKind::kDomain);
}

TEST_CASE("ap is one iff the top prefix is the truth set") {
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const auto set = pcc::testing::random_small_set(rng, 8, 1);
    const auto& truth = set.cascades[0];
    auto pred = pcc::testing::random_ranking(rng, truth.source(), set.universe_size);
    const std::size_t r = truth.size() - 1;
    std::vector<NodeId> top(pred.ranking.begin(),
                            pred.ranking.begin() + static_cast<long>(std::min(r, pred.ranking.size())));
    std::vector<NodeId> want(truth.nodes.begin() + 1, truth.nodes.end());
    std::sort(top.begin(), top.end());
    std::sort(want.begin(), want.end());
    const double ap = average_precision(truth, pred);
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);
    CHECK((ap == 1.0) == (top == want));
  }
}

TEST_CASE("ap ignores order below the last truth hit") {
  const Cascade truth{{0, 4, 2}};
  PredictedRanking a{0, {2, 5, 4, 1, 3, 6}};
  PredictedRanking b{0, {2, 5, 4, 6, 3, 1}};
  CHECK(average_precision(truth, a) == average_precision(truth, b));
}

TEST_CASE("map examples") {
  const std::vector<Cascade> one{kTruth};
  const std::vector<PredictedRanking> p1{{0, {3, 1, 2}}};
  CHECK(mean_average_precision(one, p1) == average_precision(kTruth, p1[0]));

  const std::vector<Cascade> two{kTruth, Cascade{{3, 0}}};
  const std::vector<PredictedRanking> p2{{0, {1, 2}}, {3, {1, 2}}};
  CHECK(mean_average_precision(two, p2) == 0.5);
}

TEST_CASE("map matches brute-force scorer on random instances") {
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    CascadeSet set;
    set.universe_size = 8;
    std::vector<PredictedRanking> preds;
    for (int c = 0; c < 5; ++c) {
      set.cascades.push_back(pcc::testing::random_cascade(rng, 8));
      preds.push_back(pcc::testing::random_ranking(rng, set.cascades.back().source(), 8));
    }
    const double got = mean_average_precision(set.cascades, preds);
    CHECK(std::abs(got - pcc::testing::naive_map(set.cascades, preds)) < 1e-12);
  }
}

TEST_CASE("map is invariant to cascade order") {
  Rng rng = make_rng(3);
  const auto set = pcc::testing::random_small_set(rng, 8, 6);
  std::vector<PredictedRanking> preds;
  for (const auto& c : set.cascades)
    preds.push_back(pcc::testing::random_ranking(rng, c.source(), set.universe_size));
  auto truths = set.cascades;
  const double before = mean_average_precision(truths, preds);
  std::reverse(truths.begin(), truths.end());
  std::reverse(preds.begin(), preds.end());
  CHECK(std::abs(mean_average_precision(truths, preds) - before) < 1e-15);
}

TEST_CASE("map at k truncates rankings") {
  const std::vector<Cascade> t{kTruth};
  const std::vector<PredictedRanking> p{{0, {3, 1, 2}}};
  CHECK(mean_average_precision(t, p, 2) == 0.25);
  CHECK(mean_average_precision(t, p, 100) == mean_average_precision(t, p));
  CHECK(error_kind([&] { mean_average_precision(t, p, 0); }) == ErrorKind::kValidation);
}

TEST_CASE("map input validation") {
  const std::vector<Cascade> t{kTruth};
  const std::vector<PredictedRanking> none;
  const std::vector<PredictedRanking> wrong_source{{1, {0, 2}}};
  CHECK(error_kind([&] { mean_average_precision(t, none); }) == ErrorKind::kValidation);
  CHECK(error_kind([&] { mean_average_precision(t, wrong_source); }) == ErrorKind::kValidation);
  CHECK(error_kind([] { validate(PredictedRanking{0, {1, 0}}); }) == ErrorKind::kValidation);
  CHECK(error_kind([] { validate(PredictedRanking{0, {1, 2, 1}}); }) == ErrorKind::kValidation);
}

TEST_CASE("smap examples") {
  CHECK(smap(0.5, 100, 10) == 5.0);
  CHECK(smap(0.0, 300, 30) == 0.0);
  CHECK(smap(0.37, 25, 25) == 0.37);
  CHECK(error_kind([] { smap(0.5, 0, 10); }) == ErrorKind::kDomain);
  CHECK(error_kind([] { smap(0.5, 10, 0); }) == ErrorKind::kDomain);
  for (double m : {0.1, 0.2, 0.7})
    CHECK(std::abs(smap(2 * m, 200, 15) - 2 * smap(m, 200, 15)) < 1e-14);
}

TEST_CASE("evaluate bundles per-cascade values") {
  const std::vector<Cascade> t{kTruth, Cascade{{3, 0}}};
  const std::vector<PredictedRanking> p{{0, {3, 1, 2}}, {3, {0}}};
  const auto r = evaluate(t, p, 40, 4);
  REQUIRE(r.per_cascade_ap.size() == 2);
  CHECK(std::abs(r.map_value - 19.0 / 24.0) < 1e-15);
  CHECK(r.smap_value == r.map_value * 40.0 / 4.0);
  CHECK(r.network_size == 40);
  CHECK(r.target_length == 4);
}

}  // TEST_SUITE

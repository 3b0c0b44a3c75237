#include "pcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "pcc/entropy.hpp"
#include "pcc/metrics.hpp"
#include "pcc/random.hpp"

namespace pcc {

namespace {

// Sub-stream tags under a cell seed.
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kCascadeStream = 2;
constexpr std::uint64_t kPredictorStream = 3;
constexpr std::uint64_t kSplitStream = 4;
constexpr std::uint64_t kSubsampleStream = 5;

}  // namespace

std::string CellSpec::describe() const {
  std::ostringstream out;
  if (!name.empty()) out << name << ' ';
  if (empirical()) {
    out << "empirical(" << cascades_path << ", L=" << sim.target_length << ')';
  } else {
    out << to_string(graph.topology) << "/" << to_string(sim.mechanism)
        << "(N=" << graph.node_count << ", L=" << sim.target_length << ", m=" << m << ')';
  }
  return out.str();
}

void validate(const CellSpec& cell) {
  if (!(cell.split_ratio > 0.0 && cell.split_ratio < 1.0)) {
    fail(ErrorKind::kValidation, "split_ratio must lie in (0, 1)");
  }
  if (cell.predictors.empty()) fail(ErrorKind::kValidation, "cell has no predictors");
  for (const auto& p : cell.predictors) validate(p);
  if (cell.sim.target_length < 2) fail(ErrorKind::kValidation, "target length must be >= 2");
  if (!cell.empirical()) {
    validate(cell.graph);
    if (cell.m == 0) fail(ErrorKind::kValidation, "m must be positive");
    if (!cell.allow_long && cell.sim.target_length > cell.graph.node_count / 10) {
      fail(ErrorKind::kValidation, "target length " + std::to_string(cell.sim.target_length) +
                                       " exceeds N/10 = " +
                                       std::to_string(cell.graph.node_count / 10) +
                                       " (set allow_long to override)");
    }
  }
}

SplitSets split(const CascadeSet& set, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorKind::kDomain, "split ratio must lie in (0, 1)");
  const std::size_t m = set.size();
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m)));
  if (n_train == 0 || n_train >= m) {
    fail(ErrorKind::kDomain, "cannot split " + std::to_string(m) + " cascades at ratio " +
                                 format_double(ratio) + " into two nonempty parts");
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng = make_rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  SplitSets out;
  out.train.universe_size = out.test.universe_size = set.universe_size;
  for (std::size_t i = 0; i < m; ++i) {
    (i < n_train ? out.train : out.test).cascades.push_back(set.cascades[order[i]]);
  }
  return out;
}

CellData prepare_cell_data(const CellSpec& cell, std::uint64_t seed) {
  CellData data;
  const std::size_t length = cell.sim.target_length;
  if (cell.empirical()) {
    auto loaded = load_cascades(cell.cascades_path);
    CascadeSet set;
    set.universe_size = loaded.set.universe_size;
    for (std::size_t i = 0; i < loaded.set.size(); ++i) {
      const auto& c = loaded.set.cascades[i];
      if (c.size() < length) continue;
      set.cascades.push_back(subsample_cascade(c, length, derive_seed(seed, {kSubsampleStream, i})));
      if (cell.m > 0 && set.size() == cell.m) break;
    }
    if (set.cascades.empty()) {
      fail(ErrorKind::kGenerationFailure, "no cascade in '" + cell.cascades_path +
                                              "' reaches length " + std::to_string(length));
    }
    data.network_size =
        cell.whole_universe_size ? set.universe_size : propagation_subgraph_size(set);
    data.cascades = std::move(set);
    data.ids = std::move(loaded.ids);
    data.topology = "EMPIRICAL";
    data.mechanism = cell.name.empty() ? "data" : cell.name;
    return data;
  }
  GraphSpec gspec = cell.graph;
  gspec.seed = derive_seed(seed, {kGraphStream});
  const Graph graph = generate_graph(gspec);
  data.cascades = generate_cascade_set(graph, cell.sim, cell.m, derive_seed(seed, {kCascadeStream}));
  data.ids = NodeIdMap::identity(graph.node_count());
  data.network_size = graph.node_count();
  data.topology = to_string(cell.graph.topology);
  data.mechanism = to_string(cell.sim.mechanism);
  return data;
}

namespace {

std::vector<PredictedRanking> rank_test_set(const EmbeddingModel& model, const CascadeSet& test) {
  std::vector<PredictedRanking> preds;
  preds.reserve(test.size());
  for (const auto& c : test.cascades) {
    preds.push_back(model.predict(c.source(), model.universe_size() - 1));
  }
  return preds;
}

// External rankings are keyed by source; each test cascade takes the ranking
// listed for its source.
std::vector<PredictedRanking> match_external(const std::vector<PredictedRanking>& loaded,
                                             const CascadeSet& test, const NodeIdMap& ids) {
  std::map<NodeId, const PredictedRanking*> by_source;
  for (const auto& p : loaded) {
    if (!by_source.emplace(p.source, &p).second) {
      fail(ErrorKind::kValidation, "external rankings list source '" + ids.external(p.source) + "'" +
                                       " twice");
    }
  }
  std::vector<PredictedRanking> preds;
  preds.reserve(test.size());
  for (const auto& c : test.cascades) {
    auto it = by_source.find(c.source());
    if (it == by_source.end()) {
      fail(ErrorKind::kInsufficientData,
           "external rankings have no entry for source '" + ids.external(c.source()) + "'");
    }
    preds.push_back(*it->second);
  }
  return preds;
}

std::vector<ScalingPoint> run_cell_impl(const CellSpec& cell, std::uint64_t seed) {
  validate(cell);
  CellData data = prepare_cell_data(cell, seed);
  const std::size_t length = cell.sim.target_length;
  SplitSets parts = split(data.cascades, cell.split_ratio, derive_seed(seed, {kSplitStream}));
  const double randomness =
      cell.apce_scope == ApceScope::kFull ? apce(data.cascades) : apce(parts.train);

  std::vector<ScalingPoint> points;
  for (const auto& spec : cell.predictors) {
    PredictorSpec local = spec;
    local.seed = derive_seed(seed, {kPredictorStream, spec.seed});
    std::vector<PredictedRanking> preds;
    switch (spec.variant) {
      case Variant::kExternal:
        preds = match_external(load_external_predictions(spec.external_path, data.ids),
                               parts.test, data.ids);
        break;
      case Variant::kRandom:
        preds = rank_test_set(EmbeddingModel::random(local.seed, data.cascades.universe_size),
                              parts.test);
        break;
      default:
        preds = rank_test_set(train(local, parts.train), parts.test);
        break;
    }
    const EvalResult eval = evaluate(parts.test.cascades, preds, data.network_size, length);
    ScalingPoint p;
    p.topology = data.topology;
    p.mechanism = data.mechanism;
    p.model = spec.label();
    p.network_size = data.network_size;
    p.target_length = length;
    p.cascade_count = data.cascades.size();
    p.seed = seed;
    p.apce = randomness;
    p.map_value = eval.map_value;
    p.smap_value = eval.smap_value;
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace

std::vector<ScalingPoint> run_cell(const CellSpec& cell, std::uint64_t seed) {
  try {
    return run_cell_impl(cell, seed);
  } catch (const Error& e) {
    throw Error(e.kind(), "cell " + cell.describe() + ": " + e.what());
  }
}

std::uint64_t cell_seed(const ExperimentPlan& plan, std::size_t index) {
  const auto& cell = plan.cells.at(index);
  return cell.seed ? *cell.seed : derive_seed(plan.seed, {index});
}

void sort_canonical(std::vector<ScalingPoint>& points) {
  std::sort(points.begin(), points.end(), [](const ScalingPoint& a, const ScalingPoint& b) {
    return std::tie(a.topology, a.mechanism, a.model, a.network_size, a.target_length,
                    a.cascade_count, a.seed, a.apce, a.map_value) <
           std::tie(b.topology, b.mechanism, b.model, b.network_size, b.target_length,
                    b.cascade_count, b.seed, b.apce, b.map_value);
  });
}

SweepResult run_sweep(const ExperimentPlan& plan) {
  if (plan.cells.empty()) fail(ErrorKind::kValidation, "plan defines no cells");
  const std::size_t n = plan.cells.size();
  std::vector<std::vector<ScalingPoint>> results(n);
  std::vector<std::optional<CellFailure>> failures(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_cell(plan.cells[i], cell_seed(plan, i));
      } catch (const Error& e) {
        failures[i] = CellFailure{i, plan.cells[i].describe(), e.kind(), e.what()};
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(plan.threads, n));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }

  SweepResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) {
      if (plan.strict) throw Error(failures[i]->kind, failures[i]->message);
      out.failures.push_back(*failures[i]);
    }
    out.points.insert(out.points.end(), results[i].begin(), results[i].end());
  }
  sort_canonical(out.points);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

}  // namespace pcc

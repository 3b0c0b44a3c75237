#include "pcc/cascade.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "pcc/error.hpp"
#include "pcc/random.hpp"

namespace pcc {

void validate(const Cascade& cascade, std::size_t universe_size) {
  if (cascade.nodes.empty()) fail(ErrorKind::kValidation, "empty cascade");
  std::vector<bool> seen(universe_size, false);
  for (NodeId v : cascade.nodes) {
    if (v >= universe_size) {
      fail(ErrorKind::kValidation, "node " + std::to_string(v) + " outside universe of size " +
                                       std::to_string(universe_size));
    }
    if (seen[v]) fail(ErrorKind::kValidation, "duplicate node " + std::to_string(v) + " in cascade");
    seen[v] = true;
  }
}

void validate(const CascadeSet& set) {
  if (set.cascades.empty()) fail(ErrorKind::kValidation, "empty cascade set");
  for (const auto& c : set.cascades) validate(c, set.universe_size);
}

std::string to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kIc: return "IC";
    case Mechanism::kLt: return "LT";
    case Mechanism::kSi: return "SI";
  }
  return "?";
}

Mechanism parse_mechanism(const std::string& text) {
  if (text == "IC" || text == "ic") return Mechanism::kIc;
  if (text == "LT" || text == "lt") return Mechanism::kLt;
  if (text == "SI" || text == "si") return Mechanism::kSi;
  fail(ErrorKind::kValidation, "unknown mechanism '" + text + "'");
}

void validate(const SimConfig& config, const Graph& graph) {
  if (config.mechanism == Mechanism::kIc && !(config.ic_prob >= 0.0 && config.ic_prob <= 1.0)) {
    fail(ErrorKind::kValidation, "ic_prob must lie in [0, 1]");
  }
  if (config.mechanism == Mechanism::kSi && !(config.si_rate > 0.0)) {
    fail(ErrorKind::kValidation, "si_rate must be positive");
  }
  if (config.mechanism == Mechanism::kLt &&
      config.lt_threshold.kind == ThresholdDist::Kind::kFixed &&
      !(config.lt_threshold.value >= 0.0)) {
    fail(ErrorKind::kValidation, "fixed LT threshold must be >= 0");
  }
  if (config.target_length == 0 || config.target_length > graph.node_count()) {
    fail(ErrorKind::kValidation, "target_length must lie in [1, node_count]");
  }
  if (config.max_attempts == 0) fail(ErrorKind::kValidation, "max_attempts must be positive");
}

namespace {

void check_source(const Graph& graph, NodeId source) {
  if (source >= graph.node_count()) {
    fail(ErrorKind::kDomain, "source " + std::to_string(source) + " not in graph");
  }
}

std::size_t limit_of(std::optional<std::size_t> stop_after) {
  return stop_after.value_or(std::numeric_limits<std::size_t>::max());
}

void push(TimedCascade& out, NodeId v, double t) {
  out.cascade.nodes.push_back(v);
  out.times.push_back(t);
}

}  // namespace

TimedCascade simulate_ic_timed(const Graph& graph, double ic_prob, NodeId source,
                               std::uint64_t seed, std::optional<std::size_t> stop_after) {
  check_source(graph, source);
  if (!(ic_prob >= 0.0 && ic_prob <= 1.0)) fail(ErrorKind::kDomain, "ic_prob must lie in [0, 1]");
  const std::size_t limit = limit_of(stop_after);
  Rng rng = make_rng(seed);
  std::vector<bool> infected(graph.node_count(), false);
  TimedCascade out;
  infected[source] = true;
  push(out, source, 0.0);

  std::vector<NodeId> frontier{source};
  std::vector<NodeId> next;
  double round = 0.0;
  while (!frontier.empty() && out.cascade.size() < limit) {
    round += 1.0;
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId v : graph.neighbors(u)) {
        if (infected[v]) continue;
        if (bernoulli(rng, ic_prob)) {
          infected[v] = true;
          next.push_back(v);
        }
      }
    }
    shuffle(std::span<NodeId>(next), rng);
    for (NodeId v : next) {
      if (out.cascade.size() >= limit) break;
      push(out, v, round);
    }
    frontier.swap(next);
  }
  return out;
}

Cascade simulate_ic(const Graph& graph, double ic_prob, NodeId source, std::uint64_t seed,
                    std::optional<std::size_t> stop_after) {
  return simulate_ic_timed(graph, ic_prob, source, seed, stop_after).cascade;
}

TimedCascade simulate_si_gillespie_timed(const Graph& graph, double si_rate, NodeId source,
                                         std::uint64_t seed,
                                         std::optional<std::size_t> stop_after) {
  check_source(graph, source);
  if (!(si_rate > 0.0)) fail(ErrorKind::kDomain, "si_rate must be positive");
  const std::size_t limit = limit_of(stop_after);
  Rng rng = make_rng(seed);
  std::vector<bool> infected(graph.node_count(), false);
  TimedCascade out;

  // S-I edges are kept in a pool with lazy deletion; live_edges tracks the
  // exact number of active contacts, so the total rate is beta * live_edges.
  std::vector<std::pair<NodeId, NodeId>> pool;
  std::size_t live_edges = 0;
  auto infect = [&](NodeId v, double t) {
    infected[v] = true;
    push(out, v, t);
    for (NodeId w : graph.neighbors(v)) {
      if (infected[w]) {
        --live_edges;  // edge w->v is no longer an S-I contact
      } else {
        pool.emplace_back(v, w);
        ++live_edges;
      }
    }
  };

  double t = 0.0;
  infect(source, t);
  while (live_edges > 0 && out.cascade.size() < limit) {
    t += exponential(rng, si_rate * static_cast<double>(live_edges));
    for (;;) {
      const auto idx = static_cast<std::size_t>(uniform_index(rng, pool.size()));
      const NodeId target = pool[idx].second;
      pool[idx] = pool.back();
      pool.pop_back();
      if (!infected[target]) {
        infect(target, t);
        break;
      }
    }
  }
  return out;
}

Cascade simulate_si_gillespie(const Graph& graph, double si_rate, NodeId source,
                              std::uint64_t seed, std::optional<std::size_t> stop_after) {
  return simulate_si_gillespie_timed(graph, si_rate, source, seed, stop_after).cascade;
}

TimedCascade simulate_lt_gillespie_timed(const Graph& graph, const ThresholdDist& thresholds,
                                         NodeId source, std::uint64_t seed,
                                         std::optional<std::size_t> stop_after) {
  check_source(graph, source);
  const std::size_t n = graph.node_count();
  const std::size_t limit = limit_of(stop_after);
  Rng rng = make_rng(seed);

  std::vector<double> theta(n);
  for (auto& th : theta) {
    th = thresholds.kind == ThresholdDist::Kind::kFixed ? thresholds.value : uniform01(rng);
  }

  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<bool> active(n, false);
  std::vector<std::size_t> active_neighbors(n, 0);
  std::vector<std::size_t> slot(n, kAbsent);  // position in `eligible`
  std::vector<NodeId> eligible;
  TimedCascade out;

  auto activate = [&](NodeId v, double t) {
    active[v] = true;
    push(out, v, t);
    for (NodeId w : graph.neighbors(v)) {
      if (active[w] || slot[w] != kAbsent) continue;
      ++active_neighbors[w];
      const double fraction =
          static_cast<double>(active_neighbors[w]) / static_cast<double>(graph.degree(w));
      if (fraction >= theta[w]) {
        slot[w] = eligible.size();
        eligible.push_back(w);
      }
    }
  };

  double t = 0.0;
  activate(source, t);
  while (!eligible.empty() && out.cascade.size() < limit) {
    t += exponential(rng, static_cast<double>(eligible.size()));
    const auto idx = static_cast<std::size_t>(uniform_index(rng, eligible.size()));
    const NodeId v = eligible[idx];
    eligible[idx] = eligible.back();
    slot[eligible[idx]] = idx;
    eligible.pop_back();
    slot[v] = kAbsent;
    activate(v, t);
  }
  return out;
}

Cascade simulate_lt_gillespie(const Graph& graph, const ThresholdDist& thresholds,
                              NodeId source, std::uint64_t seed,
                              std::optional<std::size_t> stop_after) {
  return simulate_lt_gillespie_timed(graph, thresholds, source, seed, stop_after).cascade;
}

Cascade simulate(const Graph& graph, const SimConfig& config, NodeId source,
                 std::uint64_t seed, std::optional<std::size_t> stop_after) {
  switch (config.mechanism) {
    case Mechanism::kIc: return simulate_ic(graph, config.ic_prob, source, seed, stop_after);
    case Mechanism::kSi: return simulate_si_gillespie(graph, config.si_rate, source, seed, stop_after);
    case Mechanism::kLt:
      return simulate_lt_gillespie(graph, config.lt_threshold, source, seed, stop_after);
  }
  fail(ErrorKind::kValidation, "unknown mechanism");
}

CascadeSet generate_cascade_set(const Graph& graph, const SimConfig& config, std::size_t m,
                                std::uint64_t seed) {
  validate(config, graph);
  if (m == 0) fail(ErrorKind::kValidation, "cascade count must be positive");
  const std::size_t length = config.target_length;
  const std::size_t budget = m * config.max_attempts;

  CascadeSet set;
  set.universe_size = graph.node_count();
  set.cascades.reserve(m);
  Rng source_rng = make_rng(derive_seed(seed, {0}));
  std::size_t attempts = 0;
  while (set.cascades.size() < m) {
    if (attempts == budget) {
      std::ostringstream msg;
      msg << "accepted " << set.cascades.size() << " of " << m << " cascades of length " << length
          << " in " << attempts << " simulations (acceptance rate "
          << static_cast<double>(set.cascades.size()) / static_cast<double>(attempts) << ")";
      fail(ErrorKind::kGenerationFailure, msg.str());
    }
    const auto source = static_cast<NodeId>(uniform_index(source_rng, graph.node_count()));
    Cascade run = simulate(graph, config, source, derive_seed(seed, {1, attempts}), length);
    ++attempts;
    if (run.size() >= length) {
      run.nodes.resize(length);
      set.cascades.push_back(std::move(run));
    }
  }
  return set;
}

}  // namespace pcc

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcc/graph.hpp"

namespace pcc {

// Infection-ordered recipients; nodes.front() is the source.
struct Cascade {
  std::vector<NodeId> nodes;

  NodeId source() const { return nodes.front(); }
  std::size_t size() const noexcept { return nodes.size(); }

  friend bool operator==(const Cascade&, const Cascade&) = default;
};

struct CascadeSet {
  std::vector<Cascade> cascades;
  std::size_t universe_size = 0;

  std::size_t size() const noexcept { return cascades.size(); }

  friend bool operator==(const CascadeSet&, const CascadeSet&) = default;
};

// Throws kValidation on an empty cascade, a duplicate node, or an id outside
// the universe.
void validate(const Cascade& cascade, std::size_t universe_size);
void validate(const CascadeSet& set);

enum class Mechanism { kIc, kLt, kSi };

std::string to_string(Mechanism mechanism);
Mechanism parse_mechanism(const std::string& text);

struct ThresholdDist {
  enum class Kind { kUniform01, kFixed } kind = Kind::kUniform01;
  double value = 0.0;  // threshold when kind == kFixed

  static ThresholdDist uniform() { return {}; }
  static ThresholdDist fixed(double theta) { return {Kind::kFixed, theta}; }
};

struct SimConfig {
  Mechanism mechanism = Mechanism::kIc;
  double ic_prob = 0.3;
  double si_rate = 1.0;
  ThresholdDist lt_threshold;
  std::size_t target_length = 10;
  // Simulations allowed per requested cascade before giving up.
  std::size_t max_attempts = 1000;
};

void validate(const SimConfig& config, const Graph& graph);

// A cascade together with the activation time of each entry. IC times are
// round indices; SI and LT times are continuous Gillespie clocks.
struct TimedCascade {
  Cascade cascade;
  std::vector<double> times;
};

// All simulators accept an optional stop_after bound: the run halts once that
// many nodes are infected. The returned prefix is identical to the prefix of
// the unbounded run with the same seed.

// Synchronous-round independent cascade. Nodes infected in the same round
// are appended in random order.
TimedCascade simulate_ic_timed(const Graph& graph, double ic_prob, NodeId source,
                               std::uint64_t seed,
                               std::optional<std::size_t> stop_after = std::nullopt);
Cascade simulate_ic(const Graph& graph, double ic_prob, NodeId source, std::uint64_t seed,
                    std::optional<std::size_t> stop_after = std::nullopt);

// Susceptible-infectious dynamics via the direct Gillespie method: a
// susceptible node with k infected neighbours is infected at rate beta * k.
TimedCascade simulate_si_gillespie_timed(
    const Graph& graph, double si_rate, NodeId source, std::uint64_t seed,
    std::optional<std::size_t> stop_after = std::nullopt);
Cascade simulate_si_gillespie(const Graph& graph, double si_rate, NodeId source,
                              std::uint64_t seed,
                              std::optional<std::size_t> stop_after = std::nullopt);

// Linear threshold dynamics. A node with at least one active neighbour is
// eligible once active_neighbours / degree >= theta_v; eligible nodes
// activate at unit rate each.
TimedCascade simulate_lt_gillespie_timed(
    const Graph& graph, const ThresholdDist& thresholds, NodeId source, std::uint64_t seed,
    std::optional<std::size_t> stop_after = std::nullopt);
Cascade simulate_lt_gillespie(const Graph& graph, const ThresholdDist& thresholds,
                              NodeId source, std::uint64_t seed,
                              std::optional<std::size_t> stop_after = std::nullopt);

Cascade simulate(const Graph& graph, const SimConfig& config, NodeId source,
                 std::uint64_t seed, std::optional<std::size_t> stop_after = std::nullopt);

// Rejection sampling with prefix truncation: runs from uniformly random
// sources, keeps the first target_length nodes of every run that reaches that
// length. Throws kGenerationFailure after m * max_attempts simulations.
CascadeSet generate_cascade_set(const Graph& graph, const SimConfig& config, std::size_t m,
                                std::uint64_t seed);

}  // namespace pcc

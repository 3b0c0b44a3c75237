#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcc/cascade.hpp"

namespace pcc {

// Order counts for one unordered node pair {low, high}, low < high.
struct PairCount {
  std::uint64_t low_first = 0;  // cascades where `low` precedes `high` (w)
  std::uint64_t together = 0;   // cascades containing both (n)

  // Probability that the lower id precedes the higher one.
  double p_low_first() const {
    return static_cast<double>(low_first) / static_cast<double>(together);
  }
};

class PairwiseOrderStats {
 public:
  using Key = std::pair<NodeId, NodeId>;

  // Records one cascade; throws kValidation on a duplicate node.
  void add(const Cascade& cascade);
  // Counter addition; lets accumulation be sharded and combined.
  void merge(const PairwiseOrderStats& other);

  // Counts for {i, j} in either argument order; zero counts if absent.
  PairCount counts(NodeId i, NodeId j) const;
  // Probability that i precedes j; requires the pair to co-occur.
  double precedence(NodeId i, NodeId j) const;

  std::uint64_t total_pair_occurrences() const noexcept { return total_; }
  std::size_t distinct_pairs() const noexcept { return pairs_.size(); }
  const std::map<Key, PairCount>& pairs() const noexcept { return pairs_; }

 private:
  std::map<Key, PairCount> pairs_;
  std::uint64_t total_ = 0;
};

PairwiseOrderStats pairwise_stats(const CascadeSet& set);
PairwiseOrderStats pairwise_stats(std::span<const Cascade> cascades);

// Binary entropy in bits, with 0 log 0 = 0. Throws kDomain outside [0, 1].
double pce(double p);

// Co-occurrence weighted mean of pce over all pairs. The weight of a pair is
// n_ij divided by the total number of pair occurrences, not by the number of
// distinct pairs.
double apce(const PairwiseOrderStats& stats);
double apce(const CascadeSet& set);

// Shannon entropy (bits) of length-n sliding-window blocks pooled over all
// sequences. Sequences shorter than n contribute no blocks.
double block_entropy(std::span<const std::vector<std::uint32_t>> sequences, std::size_t n);
double block_entropy(std::span<const std::string> sequences, std::size_t n);

}  // namespace pcc

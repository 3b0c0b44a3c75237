#include "pcc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pcc/error.hpp"

namespace pcc {

void PairwiseOrderStats::add(const Cascade& cascade) {
  const auto& nodes = cascade.nodes;
  {
    std::unordered_set<NodeId> seen(nodes.begin(), nodes.end());
    if (seen.size() != nodes.size()) {
      fail(ErrorKind::kValidation, "cascade with source " + std::to_string(cascade.source()) +
                                       " contains a duplicate node");
    }
  }
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const NodeId earlier = nodes[a];
      const NodeId later = nodes[b];
      auto& count = pairs_[{std::min(earlier, later), std::max(earlier, later)}];
      ++count.together;
      if (earlier < later) ++count.low_first;
      ++total_;
    }
  }
}

void PairwiseOrderStats::merge(const PairwiseOrderStats& other) {
  for (const auto& [key, count] : other.pairs_) {
    auto& mine = pairs_[key];
    mine.low_first += count.low_first;
    mine.together += count.together;
  }
  total_ += other.total_;
}

PairCount PairwiseOrderStats::counts(NodeId i, NodeId j) const {
  auto it = pairs_.find({std::min(i, j), std::max(i, j)});
  return it == pairs_.end() ? PairCount{} : it->second;
}

double PairwiseOrderStats::precedence(NodeId i, NodeId j) const {
  const PairCount c = counts(i, j);
  if (c.together == 0) {
    fail(ErrorKind::kDomain, "pair {" + std::to_string(i) + ", " + std::to_string(j) +
                                 "} never co-occurs");
  }
  const double p = c.p_low_first();
  return i < j ? p : 1.0 - p;
}

PairwiseOrderStats pairwise_stats(std::span<const Cascade> cascades) {
  if (cascades.empty()) fail(ErrorKind::kValidation, "empty cascade set");
  PairwiseOrderStats stats;
  for (const auto& c : cascades) stats.add(c);
  return stats;
}

PairwiseOrderStats pairwise_stats(const CascadeSet& set) {
  return pairwise_stats(std::span<const Cascade>(set.cascades));
}

double pce(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::kDomain, "pce argument outside [0, 1]");
  auto term = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  return -(term(p) + term(1.0 - p));
}

double apce(const PairwiseOrderStats& stats) {
  if (stats.total_pair_occurrences() == 0) {
    fail(ErrorKind::kDomain, "apce of stats with no pair occurrences");
  }
  const auto total = static_cast<double>(stats.total_pair_occurrences());
  double sum = 0.0;
  for (const auto& [key, count] : stats.pairs()) {
    sum += static_cast<double>(count.together) * pce(count.p_low_first());
  }
  return sum / total;
}

double apce(const CascadeSet& set) { return apce(pairwise_stats(set)); }

namespace {

template <typename Seq>
double block_entropy_impl(std::span<const Seq> sequences, std::size_t n) {
  if (n == 0) fail(ErrorKind::kDomain, "block length must be positive");
  using Block = std::vector<typename Seq::value_type>;
  std::map<Block, std::uint64_t> freq;
  std::uint64_t total = 0;
  for (const auto& seq : sequences) {
    if (seq.size() < n) continue;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      ++freq[Block(seq.begin() + static_cast<std::ptrdiff_t>(i),
                   seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
      ++total;
    }
  }
  if (total == 0) fail(ErrorKind::kDomain, "block length exceeds every sequence");
  double h = 0.0;
  for (const auto& [block, count] : freq) {
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h + 0.0;  // normalise -0.0
}

}  // namespace

double block_entropy(std::span<const std::vector<std::uint32_t>> sequences, std::size_t n) {
  return block_entropy_impl(sequences, n);
}

double block_entropy(std::span<const std::string> sequences, std::size_t n) {
  return block_entropy_impl(sequences, n);
}

}  // namespace pcc

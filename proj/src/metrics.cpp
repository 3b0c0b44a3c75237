#include "pcc/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "pcc/error.hpp"

namespace pcc {

void validate(const PredictedRanking& pred) {
  std::unordered_set<NodeId> seen;
  for (NodeId v : pred.ranking) {
    if (v == pred.source) {
      fail(ErrorKind::kValidation, "ranking for source " + std::to_string(pred.source) +
                                       " contains the source");
    }
    if (!seen.insert(v).second) {
      fail(ErrorKind::kValidation, "ranking for source " + std::to_string(pred.source) +
                                       " repeats node " + std::to_string(v));
    }
  }
}

namespace {

double ap_impl(const Cascade& truth, std::span<const NodeId> ranking) {
  if (truth.nodes.size() < 2) {
    fail(ErrorKind::kDomain, "cascade with source " + std::to_string(truth.source()) +
                                 " has no recipients to evaluate");
  }
  std::unordered_set<NodeId> recipients(truth.nodes.begin() + 1, truth.nodes.end());
  // Walking the ranking once: each hit at 1-based rank k adds hits_so_far / k.
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size() && hits < recipients.size(); ++i) {
    if (recipients.contains(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(recipients.size());
}

}  // namespace

double average_precision(const Cascade& truth, const PredictedRanking& pred) {
  return ap_impl(truth, pred.ranking);
}

namespace {

std::vector<double> per_cascade_ap(std::span<const Cascade> truths,
                                   std::span<const PredictedRanking> preds,
                                   std::optional<std::size_t> k) {
  if (truths.empty()) fail(ErrorKind::kValidation, "no cascades to evaluate");
  if (truths.size() != preds.size()) {
    fail(ErrorKind::kValidation, std::to_string(truths.size()) + " truths but " +
                                     std::to_string(preds.size()) + " predictions");
  }
  if (k && *k == 0) fail(ErrorKind::kValidation, "k must be positive");
  std::vector<double> out;
  out.reserve(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].nodes.empty() || truths[i].source() != preds[i].source) {
      fail(ErrorKind::kValidation, "prediction " + std::to_string(i) + " has source " +
                                       std::to_string(preds[i].source) +
                                       " which differs from its truth cascade");
    }
    std::span<const NodeId> ranking(preds[i].ranking);
    if (k) ranking = ranking.first(std::min(*k, ranking.size()));
    out.push_back(ap_impl(truths[i], ranking));
  }
  return out;
}

}  // namespace

double mean_average_precision(std::span<const Cascade> truths,
                              std::span<const PredictedRanking> preds,
                              std::optional<std::size_t> k) {
  const auto aps = per_cascade_ap(truths, preds, k);
  return std::accumulate(aps.begin(), aps.end(), 0.0) / static_cast<double>(aps.size());
}

EvalResult evaluate(std::span<const Cascade> truths, std::span<const PredictedRanking> preds,
                    std::size_t network_size, std::size_t target_length,
                    std::optional<std::size_t> k) {
  EvalResult result;
  result.per_cascade_ap = per_cascade_ap(truths, preds, k);
  result.map_value =
      std::accumulate(result.per_cascade_ap.begin(), result.per_cascade_ap.end(), 0.0) /
      static_cast<double>(result.per_cascade_ap.size());
  result.network_size = network_size;
  result.target_length = target_length;
  result.smap_value = smap(result.map_value, network_size, target_length);
  return result;
}

double smap(double map_value, std::size_t network_size, std::size_t target_length) {
  if (network_size == 0 || target_length == 0) {
    fail(ErrorKind::kDomain, "network size and target length must be positive");
  }
  return map_value * static_cast<double>(network_size) / static_cast<double>(target_length);
}

}  // namespace pcc

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcc/cascade.hpp"

namespace pcc {

// Candidate recipients for a cascade started at `source`, best first. The
// source itself never appears in the ranking.
struct PredictedRanking {
  NodeId source = 0;
  std::vector<NodeId> ranking;

  friend bool operator==(const PredictedRanking&, const PredictedRanking&) = default;
};

void validate(const PredictedRanking& pred);

struct EvalResult {
  std::vector<double> per_cascade_ap;
  double map_value = 0.0;
  double smap_value = 0.0;
  std::size_t network_size = 0;
  std::size_t target_length = 0;
};

// Average precision of `pred` against the recipients truth.nodes[1..]. A
// recipient at rank k contributes |top_k(pred) ∩ recipients| / k; recipients
// missing from the ranking contribute 0. The mean is taken over all
// recipients. Throws kDomain when the truth holds only its source.
double average_precision(const Cascade& truth, const PredictedRanking& pred);

// Unweighted mean of per-cascade AP. With `k`, each ranking is cut to its
// top-k first. Throws kValidation on a length or source mismatch.
double mean_average_precision(std::span<const Cascade> truths,
                              std::span<const PredictedRanking> preds,
                              std::optional<std::size_t> k = std::nullopt);

double smap(double map_value, std::size_t network_size, std::size_t target_length);

EvalResult evaluate(std::span<const Cascade> truths, std::span<const PredictedRanking> preds,
                    std::size_t network_size, std::size_t target_length,
                    std::optional<std::size_t> k = std::nullopt);

}  // namespace pcc

#pragma once
// Statistical checks and brute-force reference implementations shared by the
// unit tests and the acceptance runner. Nothing here calls into the metric
// code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "pcc/cascade.hpp"
#include "pcc/embedding.hpp"
#include "pcc/error.hpp"
#include "pcc/metrics.hpp"
#include "pcc/random.hpp"

namespace pcc::testing {

// Kind of the pcc::Error thrown by f, or nullopt if it returns normally.
template <typename F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// Kolmogorov distribution tail with the Stephens small-sample correction.
inline double ks_p_value(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// Pearson goodness of fit.
inline double chi_square_p_value(std::span<const double> observed,
                                 std::span<const double> expected, std::size_t fitted = 0) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const double dof = static_cast<double>(observed.size() - 1 - fitted);
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

inline double chi_square_uniform_p(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  std::vector<double> obs(counts.begin(), counts.end());
  std::vector<double> exp(counts.size(), total / static_cast<double>(counts.size()));
  return chi_square_p_value(obs, exp);
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(trials, 1/2).
inline double sign_test_p(std::size_t wins, std::size_t trials) {
  if (wins == 0) return 1.0;
  boost::math::binomial dist(static_cast<double>(trials), 0.5);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(wins) - 1.0));
}

inline double binary_entropy_bits(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

// Counts every ordered node pair by scanning whole cascades for both members.
inline double naive_apce(const CascadeSet& set) {
  double weighted = 0.0;
  double total = 0.0;
  const auto n = static_cast<NodeId>(set.universe_size);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      double together = 0.0;
      double i_first = 0.0;
      for (const auto& c : set.cascades) {
        long pi = -1;
        long pj = -1;
        for (std::size_t k = 0; k < c.nodes.size(); ++k) {
          if (c.nodes[k] == i) pi = static_cast<long>(k);
          if (c.nodes[k] == j) pj = static_cast<long>(k);
        }
        if (pi < 0 || pj < 0) continue;
        together += 1.0;
        if (pi < pj) i_first += 1.0;
      }
      if (together == 0.0) continue;
      weighted += together * binary_entropy_bits(i_first / together);
      total += together;
    }
  }
  return weighted / total;
}

// Literal precision-at-rank sum: for each recipient, locate it, count truth
// members among the first k predictions.
inline double naive_ap(const Cascade& truth, const PredictedRanking& pred) {
  const std::vector<NodeId> recipients(truth.nodes.begin() + 1, truth.nodes.end());
  auto in_truth = [&](NodeId v) {
    return std::find(recipients.begin(), recipients.end(), v) != recipients.end();
  };
  double sum = 0.0;
  for (NodeId v : recipients) {
    for (std::size_t k = 1; k <= pred.ranking.size(); ++k) {
      if (pred.ranking[k - 1] != v) continue;
      std::size_t hits = 0;
      for (std::size_t r = 0; r < k; ++r) hits += in_truth(pred.ranking[r]) ? 1 : 0;
      sum += static_cast<double>(hits) / static_cast<double>(k);
    }
  }
  return sum / static_cast<double>(recipients.size());
}

inline double naive_map(std::span<const Cascade> truths, std::span<const PredictedRanking> preds) {
  double s = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) s += naive_ap(truths[i], preds[i]);
  return s / static_cast<double>(truths.size());
}

// Random prefix (length >= 2) of a random permutation of the universe.
inline Cascade random_cascade(Rng& rng, std::size_t universe) {
  std::vector<NodeId> perm(universe);
  for (std::size_t i = 0; i < universe; ++i) perm[i] = static_cast<NodeId>(i);
  shuffle(std::span<NodeId>(perm), rng);
  perm.resize(2 + uniform_index(rng, universe - 1));
  return Cascade{perm};
}

// Random set of distinct-node cascades over a small universe.
inline CascadeSet random_small_set(Rng& rng, std::size_t max_nodes, std::size_t max_cascades) {
  CascadeSet set;
  set.universe_size = 2 + uniform_index(rng, max_nodes - 1);
  const std::size_t m = 1 + uniform_index(rng, max_cascades);
  for (std::size_t c = 0; c < m; ++c) set.cascades.push_back(random_cascade(rng, set.universe_size));
  return set;
}

// Ranking that is a random permutation of all non-source nodes, cut to a
// random length so some recipients go missing.
inline PredictedRanking random_ranking(Rng& rng, NodeId source, std::size_t universe) {
  PredictedRanking pred{source, {}};
  for (NodeId v = 0; v < universe; ++v)
    if (v != source) pred.ranking.push_back(v);
  shuffle(std::span<NodeId>(pred.ranking), rng);
  pred.ranking.resize(1 + uniform_index(rng, pred.ranking.size()));
  return pred;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t instances = 0;
};

// Compares hinge_term gradients against central differences of its loss on
// random instances with d <= 3. Instances within 1e-3 of the hinge kink are
// redrawn since the loss is not differentiable there.
inline GradientCheck check_hinge_gradients(std::uint64_t seed, std::size_t count) {
  Rng rng = make_rng(seed);
  GradientCheck out;
  const double h = 1e-5;
  while (out.instances < count) {
    const std::size_t d = 1 + uniform_index(rng, 3);
    const double margin = 0.5 + uniform01(rng);
    std::vector<double> params(3 * d);
    for (auto& p : params) p = 2.0 * standard_normal(rng);
    auto loss_at = [&](const std::vector<double>& x) {
      std::span<const double> all(x);
      return hinge_term(all.subspan(0, d), all.subspan(d, d), all.subspan(2 * d, d), margin).loss;
    };
    // distance to the kink
    double sp = 0.0;
    double sn = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      sp -= (params[k] - params[d + k]) * (params[k] - params[d + k]);
      sn -= (params[k] - params[2 * d + k]) * (params[k] - params[2 * d + k]);
    }
    if (std::abs(margin - sp + sn) < 1e-3) continue;

    std::span<const double> all(params);
    const auto term = hinge_term(all.subspan(0, d), all.subspan(d, d), all.subspan(2 * d, d), margin);
    std::vector<double> analytic;
    analytic.insert(analytic.end(), term.grad_source.begin(), term.grad_source.end());
    analytic.insert(analytic.end(), term.grad_positive.begin(), term.grad_positive.end());
    analytic.insert(analytic.end(), term.grad_negative.begin(), term.grad_negative.end());
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto plus = params;
      auto minus = params;
      plus[k] += h;
      minus[k] -= h;
      const double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-4});
      out.max_relative_error =
          std::max(out.max_relative_error, std::abs(numeric - analytic[k]) / scale);
    }
    ++out.instances;
  }
  return out;
}

}  // namespace pcc::testing

#include "pcc/curve_fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pcc/error.hpp"

namespace pcc {

double FittedCurve::operator()(double x) const { return y0 + A * std::exp(-B * x); }

namespace {

struct LinearSolution {
  double y0 = 0.0;
  double A = 0.0;
  double sse = 0.0;
};

// Least squares for y ~ y0 + A e, e_i = exp(-B x_i), via centred moments.
LinearSolution solve_linear(std::span<const Point> points, double b) {
  const auto n = static_cast<double>(points.size());
  double mean_e = 0.0, mean_y = 0.0;
  for (const auto& p : points) {
    mean_e += std::exp(-b * p.x);
    mean_y += p.y;
  }
  mean_e /= n;
  mean_y /= n;
  double see = 0.0, sey = 0.0;
  for (const auto& p : points) {
    const double de = std::exp(-b * p.x) - mean_e;
    see += de * de;
    sey += de * (p.y - mean_y);
  }
  LinearSolution sol;
  sol.A = see > 1e-24 ? sey / see : 0.0;
  sol.y0 = mean_y - sol.A * mean_e;
  for (const auto& p : points) {
    const double r = p.y - (sol.y0 + sol.A * std::exp(-b * p.x));
    sol.sse += r * r;
  }
  return sol;
}

bool flat_basis(std::span<const Point> points, double b) {
  const double first = std::exp(-b * points.front().x);
  return std::all_of(points.begin(), points.end(), [&](const Point& p) {
    return std::abs(std::exp(-b * p.x) - first) <= 1e-12;
  });
}

}  // namespace

FittedCurve fit_exp_decay(std::span<const Point> points, const FitOptions& options) {
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorKind::kDomain, "non-finite point passed to fit_exp_decay");
    }
    distinct.insert(p.x);
  }
  if (distinct.size() < 3) {
    fail(ErrorKind::kInsufficientData, "exponential fit needs at least 3 distinct x values, got " +
                                           std::to_string(distinct.size()));
  }
  if (!(options.b_min > 0.0) || !(options.b_max > options.b_min) || options.grid_points < 3) {
    fail(ErrorKind::kValidation, "invalid fit options");
  }

  {
    FittedCurve flat;
    flat.n_points = points.size();
    for (const auto& p : points) flat.y0 += p.y;
    flat.y0 /= static_cast<double>(points.size());
    flat.B = options.b_min;
    const auto r2 = r_squared(points, flat);
    if (r2.degenerate_variance) {
      flat.r_squared = r2.value;
      flat.degenerate_variance = true;
      return flat;
    }
  }

  // Search in u = log(B).
  const double u_lo = std::log(options.b_min);
  const double u_hi = std::log(options.b_max);
  const std::size_t n_grid = options.grid_points;
  const double step = (u_hi - u_lo) / static_cast<double>(n_grid - 1);
  auto sse_at = [&](double u) { return solve_linear(points, std::exp(u)).sse; };

  std::size_t best = 0;
  double best_sse = sse_at(u_lo);
  for (std::size_t i = 1; i < n_grid; ++i) {
    const double s = sse_at(u_lo + step * static_cast<double>(i));
    if (s < best_sse) {  // strict: lowest B wins ties
      best_sse = s;
      best = i;
    }
  }

  double a = u_lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = u_lo + step * static_cast<double>(std::min(best + 1, n_grid - 1));
  double best_u = u_lo + step * static_cast<double>(best);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sse_at(c), fd = sse_at(d);
  // Relative tolerance on B = e^u is an absolute tolerance on u.
  while (b - a > options.relative_tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sse_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sse_at(d);
    }
  }
  const double refined = fc <= fd ? c : d;
  if (std::min(fc, fd) < best_sse) best_u = refined;

  FittedCurve curve;
  curve.B = std::exp(best_u);
  curve.n_points = points.size();
  if (flat_basis(points, curve.B)) {
    curve.A = 0.0;
    double mean = 0.0;
    for (const auto& p : points) mean += p.y;
    curve.y0 = mean / static_cast<double>(points.size());
  } else {
    const auto sol = solve_linear(points, curve.B);
    curve.y0 = sol.y0;
    curve.A = sol.A;
  }
  const auto r2 = r_squared(points, curve);
  curve.r_squared = r2.value;
  curve.degenerate_variance = r2.degenerate_variance;
  return curve;
}

RSquared r_squared(std::span<const Point> points, const FittedCurve& curve) {
  if (points.empty()) fail(ErrorKind::kDomain, "r_squared of an empty point set");
  double mean = 0.0;
  for (const auto& p : points) mean += p.y;
  mean /= static_cast<double>(points.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (const auto& p : points) {
    ss_tot += (p.y - mean) * (p.y - mean);
    const double r = p.y - curve(p.x);
    ss_res += r * r;
  }
  if (ss_tot < 1e-15) return {1.0, true};
  return {1.0 - ss_res / ss_tot, false};
}

}  // namespace pcc

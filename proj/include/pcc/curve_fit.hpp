#pragma once

#include <cstddef>
#include <span>

namespace pcc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// y = y0 + A exp(-B x)
struct FittedCurve {
  double y0 = 0.0;
  double A = 0.0;
  double B = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  // The targets had (numerically) zero variance; r_squared is reported as 1.
  bool degenerate_variance = false;

  double operator()(double x) const;
};

struct FitOptions {
  double b_min = 1e-3;
  double b_max = 1e3;
  std::size_t grid_points = 601;
  double relative_tolerance = 1e-9;
};

// Variable projection: for fixed B the pair (y0, A) is the linear least
// squares solution against {1, exp(-B x)}, leaving a one-dimensional search
// over B (log-spaced grid, then golden-section refinement around the best
// grid cell). Throws kInsufficientData for fewer than 3 distinct x.
FittedCurve fit_exp_decay(std::span<const Point> points, const FitOptions& options = {});

struct RSquared {
  double value = 0.0;
  bool degenerate_variance = false;
};

// 1 - SS_res / SS_tot; a target with SS_tot < 1e-15 yields 1.0 and the flag.
RSquared r_squared(std::span<const Point> points, const FittedCurve& curve);

}  // namespace pcc

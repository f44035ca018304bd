#pragma once

#include <vector>

namespace bresse::detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  int samples = 0;
};

/// Ordinary least squares y = slope * x + intercept. r_squared is 1 when y
/// is constant (the line is exact). Throws InvalidInput if x is constant or
/// fewer than two points are given.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double t_quantile_95(int dof);

}  // namespace bresse::detail

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace sdp {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  /// Residual sum of squares.
  double residual = 0;
};

/// Ordinary least squares y = slope * x + intercept.
/// R^2 is 1 when every y lies on the line (including constant y).
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line needs two or more paired points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: all x values equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (fit.slope * x[k] + fit.intercept);
    fit.residual += e * e;
  }
  fit.r_squared = syy == 0 ? 1.0 : 1.0 - fit.residual / syy;
  return fit;
}

}  // namespace sdp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace subheat {

/// Monte Carlo result. `std_error` is the sample standard deviation over
/// paths divided by sqrt(n_paths) (or its self-normalised analogue when the
/// paths carry importance weights).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

/// Block accumulator for weighted means. With unit weights it reduces to the
/// ordinary sample mean and standard error.
struct WeightedMoments {
  double sw = 0.0;     // sum w
  double swg = 0.0;    // sum w g
  double sw2 = 0.0;    // sum w^2
  double sw2g = 0.0;   // sum w^2 g
  double sw2g2 = 0.0;  // sum w^2 g^2
  std::uint64_t n = 0;

  void add(double g, double w = 1.0) noexcept {
    sw += w;
    swg += w * g;
    const double w2 = w * w;
    sw2 += w2;
    sw2g += w2 * g;
    sw2g2 += w2 * g * g;
    ++n;
  }

  void merge(const WeightedMoments& o) noexcept {
    sw += o.sw;
    swg += o.swg;
    sw2 += o.sw2;
    sw2g += o.sw2g;
    sw2g2 += o.sw2g2;
    n += o.n;
  }

  double mean() const noexcept { return sw > 0.0 ? swg / sw : 0.0; }

  /// Delta-method standard error of the self-normalised mean
  /// sum w g / sum w, with an n/(n-1) small-sample factor.
  double std_error() const noexcept {
    if (n < 2 || !(sw > 0.0)) return 0.0;
    const double mu = mean();
    const double ss = sw2g2 - 2.0 * mu * sw2g + mu * mu * sw2;
    const double nn = static_cast<double>(n);
    return std::sqrt(std::max(0.0, ss) * nn / (nn - 1.0)) / sw;
  }
};

}  // namespace subheat

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace subheat {

/// phi(s) = s^beta.
struct Stable {
  double beta;
};

/// phi(s) = (s + theta)^beta - theta^beta.
struct TemperedStable {
  double beta;
  double theta;
};

struct StableComponent {
  double beta;
  double weight = 1.0;
};

/// phi(s) = sum_i w_i s^{beta_i}, components ordered by strictly increasing beta.
struct MixedStable {
  std::vector<StableComponent> components;
};

/// Laplace exponent of a driftless, killing-free subordinator with infinite
/// Levy measure: E[exp(-s D_t)] = exp(-t phi(s)).
///
/// The catalog is closed: stable, exponentially tempered stable, and finite
/// mixtures of independent stable subordinators. Construction validates the
/// parameters and throws DomainError on violation.
class LaplaceExponent {
 public:
  using Variant = std::variant<Stable, TemperedStable, MixedStable>;

  LaplaceExponent(Stable s);
  LaplaceExponent(TemperedStable s);
  LaplaceExponent(MixedStable s);

  const Variant& variant() const noexcept { return variant_; }

  /// Regular-variation index at infinity (largest beta for mixtures).
  double leading_index() const noexcept;

  /// Weight multiplying the leading power: phi(s) ~ weight * s^beta at infinity.
  double leading_weight() const noexcept;

  bool is_stable() const noexcept { return std::holds_alternative<Stable>(variant_); }

  /// Round-trips through parse_exponent.
  std::string to_string() const;

 private:
  Variant variant_;
};

enum class Regime { HighIndex, Critical, LowIndex };

std::string_view to_string(Regime r) noexcept;

double phi(const LaplaceExponent& exp, double s);
double phi_derivative(const LaplaceExponent& exp, double s);
double phi_inverse(const LaplaceExponent& exp, double y);
double levy_density(const LaplaceExponent& exp, double u);
/// u^gamma nu(u), evaluated without overflow for tiny u.
double levy_density_power(const LaplaceExponent& exp, double u, double gamma);
/// nu([delta, infinity)).
double levy_tail(const LaplaceExponent& exp, double delta);
/// Whether int_0^eps phi(l)/l dl is finite.
bool small_lambda_integrability(const LaplaceExponent& exp);
Regime regime(const LaplaceExponent& exp);

/// Parses `stable:<beta>`, `tempered:<beta>,<theta>` or
/// `mixed:<beta1>*<w1>+<beta2>*<w2>+...` (weights optional, default 1).
/// Mixed components may be given in any order; they are sorted by beta.
/// Throws ConfigError on malformed text and DomainError on invalid values.
LaplaceExponent parse_exponent(std::string_view text);

/// Upper incomplete gamma Gamma(a, x) for a in (-1, 0) and x > 0.
double upper_incomplete_gamma_negative(double a, double x);

}  // namespace subheat

#include "subheat/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "subheat/errors.hpp"
#include "subheat/numerics.hpp"

namespace subheat {
namespace {

constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("index must lie in (0,1)");
}

/// int_0^a sqrt(u) nu(u) du, finite when every index is below 1/2.
double sqrt_moment_near_zero(const LaplaceExponent& exp, double a) {
  auto stable_part = [a](double beta, double weight) {
    return weight * beta / std::tgamma(1.0 - beta) * std::pow(a, 0.5 - beta) / (0.5 - beta);
  };
  if (const auto* st = std::get_if<Stable>(&exp.variant())) return stable_part(st->beta, 1.0);
  if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
    const double b = ts->beta;
    return b / std::tgamma(1.0 - b) * std::pow(ts->theta, b - 0.5) *
           boost::math::tgamma_lower(0.5 - b, ts->theta * a);
  }
  double sum = 0.0;
  for (const auto& c : std::get<MixedStable>(exp.variant()).components) sum += stable_part(c.beta, c.weight);
  return sum;
}

/// int_0^infinity f(u) nu(u) du for f(u) = envelope sqrt(u) + remainder(u),
/// with a remainder that is exponentially small near 0 and f bounded at
/// infinity. The envelope is integrated in closed form below a = L^2 so the
/// quadrature only sees the smooth remainder there.
template <class F, class R>
double levy_integral(const LaplaceExponent& exp, double len, double envelope, F&& f, R&& remainder,
                     double rel_tol) {
  if (exp.leading_index() >= 0.5) throw DomainError("Levy integral of a sqrt-type function needs index < 1/2");
  const double a = len * len;
  const double inner = integrate(
      [&](double u) {
        const double r = u > 0.0 ? remainder(u) : 0.0;
        return r == 0.0 ? 0.0 : r * levy_density(exp, u);
      },
      0.0, a, rel_tol);
  const double tail = integrate_to_infinity([&](double u) { return f(u) * levy_density(exp, u); }, a, rel_tol);
  return envelope * sqrt_moment_near_zero(exp, a) + inner + tail;
}

const Interval& interval_only(const Domain& dom, const char* what) {
  const auto* i = std::get_if<Interval>(&dom.variant());
  if (i == nullptr) {
    throw UnsupportedConfiguration(std::string(what) + " is only available on intervals, got " + dom.to_string());
  }
  return *i;
}

RateFunction subordinator_high_rate(const LaplaceExponent& exp) {
  if (exp.is_stable()) return {RateKind::PowerInverseTwiceBeta, exp.leading_index(), std::nullopt};
  return {RateKind::PhiInverseSqrt, exp.leading_index(), exp};
}

RateFunction inverse_rate(const LaplaceExponent& exp) {
  if (exp.is_stable()) return {RateKind::PowerHalfBeta, exp.leading_index(), std::nullopt};
  return {RateKind::PhiSqrt, exp.leading_index(), exp};
}

}  // namespace

double RateFunction::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("rate functions are evaluated at t > 0");
  switch (kind) {
    case RateKind::PowerInverseTwiceBeta: return std::pow(t, 1.0 / (2.0 * beta));
    case RateKind::TLogInverseT: return t * std::log(1.0 / t);
    case RateKind::Linear: return t;
    case RateKind::PowerHalfBeta: return std::pow(t, 0.5 * beta);
    case RateKind::PhiInverseSqrt: return 1.0 / std::sqrt(phi_inverse(exponent.value(), 1.0 / t));
    case RateKind::PhiSqrt: return 1.0 / std::sqrt(phi(exponent.value(), 1.0 / t));
  }
  return 0.0;
}

std::string RateFunction::name() const {
  switch (kind) {
    case RateKind::PowerInverseTwiceBeta: return "t^(1/(2*beta))";
    case RateKind::TLogInverseT: return "t*log(1/t)";
    case RateKind::Linear: return "t";
    case RateKind::PowerHalfBeta: return "t^(beta/2)";
    case RateKind::PhiInverseSqrt: return "phi_inverse(1/t)^(-1/2)";
    case RateKind::PhiSqrt: return "phi(1/t)^(-1/2)";
  }
  return "unknown";
}

double stable_moment(double beta, double gamma) {
  check_beta(beta);
  if (!(gamma < beta)) throw DomainError("stable moments of order >= beta are infinite");
  return std::tgamma(1.0 - gamma / beta) / std::tgamma(1.0 - gamma);
}

double inverse_moment(double beta, double p) {
  check_beta(beta);
  if (!(p > 0.0)) throw DomainError("inverse moments need p > 0");
  return std::exp(std::lgamma(p + 1.0) - std::lgamma(p * beta + 1.0));
}

double running_max_constant(RunningMaxKind kind, double beta) {
  check_beta(beta);
  // E sup_{u<=s} B_u = sqrt(2 s / pi) for standard B; under the generator
  // Delta the factor is 2 / sqrt(pi).
  if (kind == RunningMaxKind::Stable) return stable_moment(beta, 0.5) * 2.0 / sqrt_pi;
  return 1.0 / std::tgamma(0.5 * beta + 1.0);
}

double stable_kernel_constant(int d, double a) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!(a > 0.0 && a < 2.0)) throw DomainError("kernel index must lie in (0,2)");
  return a * std::tgamma(0.5 * (d + a)) /
         (std::pow(2.0, 1.0 - a) * std::pow(pi, 0.5 * d) * std::tgamma(1.0 - 0.5 * a));
}

double stable_interval_perimeter(double beta, double length) {
  check_beta(beta);
  if (!(beta < 0.5)) throw DomainError("the perimeter of an interval is finite only for beta < 1/2");
  const double a = 2.0 * beta;
  return stable_kernel_constant(1, a) * 2.0 * std::pow(length, 1.0 - a) / (a * (1.0 - a));
}

double low_index_spectral_constant(const LaplaceExponent& exp, const Interval& dom) {
  if (!small_lambda_integrability(exp)) throw DomainError("phi(l)/l is not integrable at 0");
  return levy_integral(exp, dom.b - dom.a, 4.0 / sqrt_pi,
                       [&](double u) { return exact_deficit_interval(dom, u); },
                       [&](double u) { return deficit_remainder_interval(dom, u); }, 1e-12);
}

double low_index_regular_constant(const LaplaceExponent& exp, const Interval& dom) {
  if (!small_lambda_integrability(exp)) throw DomainError("phi(l)/l is not integrable at 0");
  return levy_integral(exp, dom.b - dom.a, 2.0 / sqrt_pi,
                       [&](double u) { return exact_H_interval(dom, u); },
                       [&](double u) { return H_remainder_interval(dom, u); }, 1e-12);
}

AsymptoticPrediction predict_spectral(const LaplaceExponent& exp, const Domain& dom, TimeChangeKind kind) {
  const double beta = exp.leading_index();
  const double surface = dom.surface();
  if (kind == TimeChangeKind::InverseSubordinator) {
    return {inverse_rate(exp), surface / std::tgamma(0.5 * beta + 1.0), "inverse"};
  }
  switch (regime(exp)) {
    case Regime::HighIndex:
      return {subordinator_high_rate(exp), stable_moment(beta, 0.5) * 2.0 * surface / sqrt_pi,
              "subordinator/high-index"};
    case Regime::Critical:
      // Only the leading lambda^{1/2} term matters; its weight rescales time.
      return {{RateKind::TLogInverseT, beta, std::nullopt}, exp.leading_weight() * 2.0 * surface / pi,
              "subordinator/critical"};
    case Regime::LowIndex:
      return {{RateKind::Linear, beta, std::nullopt},
              low_index_spectral_constant(exp, interval_only(dom, "the low-index spectral limit")),
              "subordinator/low-index"};
  }
  throw UnsupportedConfiguration("unknown regime");
}

AsymptoticPrediction predict_regular(const LaplaceExponent& exp, const Domain& dom, TimeChangeKind kind) {
  if (kind == TimeChangeKind::Subordinator && regime(exp) == Regime::LowIndex) {
    return {{RateKind::Linear, exp.leading_index(), std::nullopt},
            low_index_regular_constant(exp, interval_only(dom, "the low-index regular limit")),
            "subordinator/low-index"};
  }
  auto p = predict_spectral(exp, dom, kind);
  p.constant *= 0.5;
  return p;
}

std::vector<ExpansionTerm> expansion(double beta, const std::vector<double>& coefficients) {
  check_beta(beta);
  if (coefficients.empty()) throw DomainError("expansion needs at least one coefficient");
  std::vector<ExpansionTerm> out;
  out.reserve(coefficients.size());
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double factor = std::exp(std::lgamma(1.0 + 0.5 * n) - std::lgamma(1.0 + 0.5 * n * beta));
    out.push_back({coefficients[i] * factor, 0.5 * beta * n});
  }
  return out;
}

FitReport fit_rate(const std::vector<LadderSample>& samples, const AsymptoticPrediction& prediction,
                   double tolerance, double correction_power) {
  if (samples.size() < 3) throw DomainError("rate fit needs at least three ladder points");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t < samples[i - 1].t)) throw DomainError("ladder times must be strictly decreasing");
  }
  FitReport report;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double r = prediction.rate(s.t);
    const double ratio = s.value / r;
    report.ratios.push_back(ratio);
    report.ratio_errors.push_back(s.std_error / r);
    const double x = std::pow(s.t, correction_power);
    sx += x;
    sy += ratio;
    sxx += x * x;
    sxy += x * ratio;
  }
  const double n = static_cast<double>(samples.size());
  const double denom = n * sxx - sx * sx;
  report.extrapolated = denom != 0.0 ? (sy * sxx - sx * sxy) / denom : report.ratios.back();
  const double c = prediction.constant;
  report.final_deviation = std::abs(report.ratios.back() / c - 1.0);
  report.extrapolated_deviation = std::abs(report.extrapolated / c - 1.0);
  const double allowed = std::max(tolerance * c, 4.0 * report.ratio_errors.back());
  report.pass = std::abs(report.ratios.back() - c) <= allowed;
  return report;
}

}  // namespace subheat

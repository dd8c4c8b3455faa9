#include "subheat/levy_exponents.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "subheat/errors.hpp"

namespace subheat {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_index(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("stable index must lie in (0,1), got " + std::to_string(beta));
  }
}

double stable_density_coefficient(double beta) { return beta / std::tgamma(1.0 - beta); }

double tail_coefficient(double beta) { return 1.0 / std::tgamma(1.0 - beta); }

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_double(std::string_view text) {
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
    trimmed.remove_prefix(1);
  }
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
    trimmed.remove_suffix(1);
  }
  double value = 0.0;
  const auto* first = trimmed.data();
  const auto* last = trimmed.data() + trimmed.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (trimmed.empty() || ec != std::errc{} || ptr != last) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

LaplaceExponent::LaplaceExponent(Stable s) : variant_(s) { check_index(s.beta); }

LaplaceExponent::LaplaceExponent(TemperedStable s) : variant_(s) {
  check_index(s.beta);
  if (!(s.theta > 0.0) || !std::isfinite(s.theta)) {
    throw DomainError("tempering rate must be positive");
  }
}

LaplaceExponent::LaplaceExponent(MixedStable s) {
  if (s.components.empty()) throw DomainError("mixed exponent needs at least one component");
  std::sort(s.components.begin(), s.components.end(),
            [](const auto& a, const auto& b) { return a.beta < b.beta; });
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    check_index(s.components[i].beta);
    if (!(s.components[i].weight > 0.0) || !std::isfinite(s.components[i].weight)) {
      throw DomainError("mixture weights must be positive");
    }
    if (i > 0 && !(s.components[i].beta > s.components[i - 1].beta)) {
      throw DomainError("mixture indices must be distinct");
    }
  }
  variant_ = std::move(s);
}

double LaplaceExponent::leading_index() const noexcept {
  return std::visit(Overloaded{[](const Stable& s) { return s.beta; },
                               [](const TemperedStable& s) { return s.beta; },
                               [](const MixedStable& m) { return m.components.back().beta; }},
                    variant_);
}

double LaplaceExponent::leading_weight() const noexcept {
  if (const auto* m = std::get_if<MixedStable>(&variant_)) return m->components.back().weight;
  return 1.0;
}

std::string LaplaceExponent::to_string() const {
  return std::visit(
      Overloaded{[](const Stable& s) { return "stable:" + format_number(s.beta); },
                 [](const TemperedStable& s) {
                   return "tempered:" + format_number(s.beta) + "," + format_number(s.theta);
                 },
                 [](const MixedStable& m) {
                   std::string out = "mixed:";
                   for (std::size_t i = 0; i < m.components.size(); ++i) {
                     if (i > 0) out += "+";
                     out += format_number(m.components[i].beta) + "*" +
                            format_number(m.components[i].weight);
                   }
                   return out;
                 }},
      variant_);
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::HighIndex: return "high-index";
    case Regime::Critical: return "critical";
    case Regime::LowIndex: return "low-index";
  }
  return "unknown";
}

double phi(const LaplaceExponent& exp, double s) {
  if (!(s > 0.0)) throw DomainError("phi requires s > 0");
  return std::visit(
      Overloaded{[s](const Stable& st) { return std::pow(s, st.beta); },
                 [s](const TemperedStable& ts) {
                   // theta^beta * ((1 + s/theta)^beta - 1), accurate for s << theta
                   return std::pow(ts.theta, ts.beta) * std::expm1(ts.beta * std::log1p(s / ts.theta));
                 },
                 [s](const MixedStable& m) {
                   double sum = 0.0;
                   for (const auto& c : m.components) sum += c.weight * std::pow(s, c.beta);
                   return sum;
                 }},
      exp.variant());
}

double phi_derivative(const LaplaceExponent& exp, double s) {
  if (!(s > 0.0)) throw DomainError("phi' requires s > 0");
  return std::visit(
      Overloaded{[s](const Stable& st) { return st.beta * std::pow(s, st.beta - 1.0); },
                 [s](const TemperedStable& ts) {
                   return ts.beta * std::pow(s + ts.theta, ts.beta - 1.0);
                 },
                 [s](const MixedStable& m) {
                   double sum = 0.0;
                   for (const auto& c : m.components) {
                     sum += c.weight * c.beta * std::pow(s, c.beta - 1.0);
                   }
                   return sum;
                 }},
      exp.variant());
}

double phi_inverse(const LaplaceExponent& exp, double y) {
  if (!(y > 0.0)) throw DomainError("phi_inverse requires y > 0");
  if (const auto* st = std::get_if<Stable>(&exp.variant())) {
    return std::pow(y, 1.0 / st->beta);
  }
  if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
    const double tb = std::pow(ts->theta, ts->beta);
    return ts->theta * std::expm1(std::log1p(y / tb) / ts->beta);
  }

  // Mixtures: bracket by doubling, then Newton steps that fall back to
  // bisection whenever they leave the bracket.
  const auto f = [&](double x) { return phi(exp, x) - y; };
  double lo = 1.0;
  double hi = 1.0;
  if (f(1.0) < 0.0) {
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min()) return lo;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double fx = f(x);
    if (std::abs(fx) <= 1e-13 * y) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - fx / phi_derivative(exp, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
    x = next;
  }
  return x;
}

double levy_density(const LaplaceExponent& exp, double u) {
  if (!(u > 0.0)) throw DomainError("Levy density requires u > 0");
  return std::visit(
      Overloaded{[u](const Stable& st) {
                   return stable_density_coefficient(st.beta) * std::pow(u, -1.0 - st.beta);
                 },
                 [u](const TemperedStable& ts) {
                   return stable_density_coefficient(ts.beta) *
                          std::exp(-ts.theta * u - (1.0 + ts.beta) * std::log(u));
                 },
                 [u](const MixedStable& m) {
                   double sum = 0.0;
                   for (const auto& c : m.components) {
                     sum += c.weight * stable_density_coefficient(c.beta) * std::pow(u, -1.0 - c.beta);
                   }
                   return sum;
                 }},
      exp.variant());
}

double levy_density_power(const LaplaceExponent& exp, double u, double gamma) {
  if (!(u > 0.0)) throw DomainError("Levy density requires u > 0");
  return std::visit(
      Overloaded{[u, gamma](const Stable& st) {
                   return stable_density_coefficient(st.beta) * std::pow(u, gamma - 1.0 - st.beta);
                 },
                 [u, gamma](const TemperedStable& ts) {
                   return stable_density_coefficient(ts.beta) *
                          std::exp(-ts.theta * u + (gamma - 1.0 - ts.beta) * std::log(u));
                 },
                 [u, gamma](const MixedStable& m) {
                   double sum = 0.0;
                   for (const auto& c : m.components) {
                     sum += c.weight * stable_density_coefficient(c.beta) * std::pow(u, gamma - 1.0 - c.beta);
                   }
                   return sum;
                 }},
      exp.variant());
}

double upper_incomplete_gamma_negative(double a, double x) {
  if (!(a > -1.0 && a < 0.0)) throw DomainError("incomplete gamma: a must lie in (-1,0)");
  if (!(x > 0.0)) throw DomainError("incomplete gamma: x must be positive");
  if (x <= 1.0) {
    // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a; no cancellation for small x
    // because x^a e^{-x} dominates.
    return (boost::math::tgamma(a + 1.0, x) - std::exp(a * std::log(x) - x)) / a;
  }
  // Legendre continued fraction, modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(a * std::log(x) - x) * h;
}

double levy_tail(const LaplaceExponent& exp, double delta) {
  if (!(delta > 0.0)) throw DomainError("Levy tail requires delta > 0");
  return std::visit(
      Overloaded{[delta](const Stable& st) {
                   return tail_coefficient(st.beta) * std::pow(delta, -st.beta);
                 },
                 [delta](const TemperedStable& ts) {
                   // beta/Gamma(1-beta) * theta^beta * Gamma(-beta, theta*delta)
                   return stable_density_coefficient(ts.beta) * std::pow(ts.theta, ts.beta) *
                          upper_incomplete_gamma_negative(-ts.beta, ts.theta * delta);
                 },
                 [delta](const MixedStable& m) {
                   double sum = 0.0;
                   for (const auto& c : m.components) {
                     sum += c.weight * tail_coefficient(c.beta) * std::pow(delta, -c.beta);
                   }
                   return sum;
                 }},
      exp.variant());
}

bool small_lambda_integrability(const LaplaceExponent& exp) {
  // phi(l)/l behaves like l^{beta-1} (stable, mixed) or a constant (tempered)
  // near zero, so the integral is finite whenever the smallest index is
  // positive. Construction already enforces that; the check stays explicit.
  return std::visit(Overloaded{[](const Stable& s) { return s.beta > 0.0; },
                               [](const TemperedStable&) { return true; },
                               [](const MixedStable& m) { return m.components.front().beta > 0.0; }},
                    exp.variant());
}

Regime regime(const LaplaceExponent& exp) {
  const double beta = exp.leading_index();
  if (beta == 0.5) return Regime::Critical;
  return beta > 0.5 ? Regime::HighIndex : Regime::LowIndex;
}

LaplaceExponent parse_exponent(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("exponent spec needs '<family>:<params>': '" + std::string(text) + "'");
  }
  const auto family = text.substr(0, colon);
  const auto params = text.substr(colon + 1);
  if (family == "stable") {
    return LaplaceExponent(Stable{parse_double(params)});
  }
  if (family == "tempered") {
    auto parts = split(params, ',');
    if (parts.size() != 2) throw ConfigError("tempered spec is tempered:<beta>,<theta>");
    return LaplaceExponent(TemperedStable{parse_double(parts[0]), parse_double(parts[1])});
  }
  if (family == "mixed") {
    MixedStable mixed;
    for (auto term : split(params, '+')) {
      auto factors = split(term, '*');
      if (factors.size() > 2) throw ConfigError("mixed term is <beta>[*<weight>]");
      StableComponent c{parse_double(factors[0]), 1.0};
      if (factors.size() == 2) c.weight = parse_double(factors[1]);
      mixed.components.push_back(c);
    }
    return LaplaceExponent(std::move(mixed));
  }
  throw ConfigError("unknown exponent family '" + std::string(family) + "'");
}

}  // namespace subheat

#include "subheat/heat_oracles.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subheat/errors.hpp"
#include "subheat/parallel.hpp"

namespace subheat {
namespace {

constexpr double pi = std::numbers::pi;

void check_time(double u) {
  if (!(u >= 0.0)) throw DomainError("heat content time must be nonnegative");
}

double length(const Interval& dom) { return dom.b - dom.a; }

/// int_z^infinity P(sqrt(2u) N > y) dy = sqrt(u) [exp(-x^2)/sqrt(pi) - x erfc(x)],
/// x = z / (2 sqrt(u)).
double gaussian_overshoot(double z, double u) {
  const double x = z / (2.0 * std::sqrt(u));
  return std::sqrt(u) * (std::exp(-x * x) / std::sqrt(pi) - x * std::erfc(x));
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_number(std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
}

}  // namespace

Domain::Domain(Interval i) : variant_(i) {
  if (!(i.a < i.b) || !std::isfinite(i.a) || !std::isfinite(i.b)) {
    throw DomainError("interval needs finite a < b");
  }
}

Domain::Domain(Disk d) : variant_(d) {
  if (!(d.radius > 0.0) || !std::isfinite(d.radius)) throw DomainError("disk radius must be positive");
}

double Domain::volume() const noexcept {
  if (const auto* i = std::get_if<Interval>(&variant_)) return length(*i);
  const double r = std::get<Disk>(variant_).radius;
  return pi * r * r;
}

double Domain::surface() const noexcept {
  if (is_interval()) return 2.0;
  return 2.0 * pi * std::get<Disk>(variant_).radius;
}

double Domain::inradius() const noexcept {
  if (const auto* i = std::get_if<Interval>(&variant_)) return 0.5 * length(*i);
  return std::get<Disk>(variant_).radius;
}

std::string Domain::to_string() const {
  if (const auto* i = std::get_if<Interval>(&variant_)) {
    return "interval:" + format_number(i->a) + "," + format_number(i->b);
  }
  return "disk:" + format_number(std::get<Disk>(variant_).radius);
}

Domain parse_domain(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("domain spec needs '<kind>:<params>': '" + std::string(text) + "'");
  }
  const auto kind = text.substr(0, colon);
  const auto params = text.substr(colon + 1);
  if (kind == "interval") {
    const auto comma = params.find(',');
    if (comma == std::string_view::npos) throw ConfigError("interval spec is interval:<a>,<b>");
    return Domain(Interval{parse_number(params.substr(0, comma)), parse_number(params.substr(comma + 1))});
  }
  if (kind == "disk") return Domain(Disk{parse_number(params)});
  throw ConfigError("unknown domain kind '" + std::string(kind) + "'");
}

double deficit_remainder_interval(const Interval& dom, double u) {
  check_time(u);
  const double len = length(dom);
  if (u == 0.0) return 0.0;
  if (u >= 0.1 * len * len) return len - exact_Q_interval(dom, u) - 4.0 * std::sqrt(u / pi);
  // Method of images: each end removes 2 sqrt(u/pi); the alternating image
  // sum corrects for paths that feel both ends.
  double images = 0.0;
  for (int m = 1; m < 10000; ++m) {
    const double term = gaussian_overshoot(m * len, u);
    images += (m % 2 == 1) ? term : -term;
    if (term < 1e-18 * len) break;
  }
  return -8.0 * images;
}

double exact_deficit_interval(const Interval& dom, double u) {
  check_time(u);
  const double len = length(dom);
  if (u < 0.1 * len * len) return 4.0 * std::sqrt(u / pi) + deficit_remainder_interval(dom, u);
  return len - exact_Q_interval(dom, u);
}

double exact_Q_interval(const Interval& dom, double u) {
  check_time(u);
  const double len = length(dom);
  if (u < 0.1 * len * len) return len - exact_deficit_interval(dom, u);
  // Dirichlet eigenfunction expansion; only odd modes carry mass.
  double sum = 0.0;
  for (int k = 1; k < 100000; k += 2) {
    const double kk = static_cast<double>(k);
    const double term = 8.0 * len / (kk * kk * pi * pi) * std::exp(-(kk * pi / len) * (kk * pi / len) * u);
    sum += term;
    if (term < 1e-18 * len) break;
  }
  return sum;
}

double H_remainder_interval(const Interval& dom, double u) {
  check_time(u);
  if (u == 0.0) return 0.0;
  const double len = length(dom);
  if (len < 2.0 * std::sqrt(u)) return exact_H_interval(dom, u) - 2.0 * std::sqrt(u / pi);
  // Mass started farther than L from an end cannot leave through it.
  return -2.0 * gaussian_overshoot(len, u);
}

double exact_H_interval(const Interval& dom, double u) {
  check_time(u);
  if (u == 0.0) return 0.0;
  const double len = length(dom);
  const double x = len / (2.0 * std::sqrt(u));
  if (x >= 1.0) return 2.0 * std::sqrt(u / pi) + H_remainder_interval(dom, u);
  // Same quantity rearranged so the two O(sqrt(u)) terms cancel analytically.
  return len * std::erfc(x) - 2.0 * std::sqrt(u / pi) * std::expm1(-x * x);
}

double bridge_walk_deficit(const Domain& dom, double u, double stratum, RandomStream& stream,
                           const WalkerOptions& opts) {
  if (!(u >= 0.0)) throw DomainError("walker time must be nonnegative");
  if (opts.steps < 1) throw DomainError("walker needs at least one step");
  if (u == 0.0) return 0.0;
  const double band = opts.boundary_band ? std::min(12.0 * std::sqrt(u), dom.inradius()) : dom.inradius();
  const double h = u / opts.steps;
  const double sigma = std::sqrt(2.0 * h);

  double weight = 1.0;
  auto step = [&](double d1, double d2) {
    if (d2 <= 0.0) return false;
    const double p_cross = std::exp(-d1 * d2 / h);
    if (opts.rao_blackwell) {
      weight *= 1.0 - p_cross;
      return true;
    }
    return stream.uniform() >= p_cross;
  };

  if (const auto* i = std::get_if<Interval>(&dom.variant())) {
    const double len = length(*i);
    // Both boundary layers are mirror images; start in the left one.
    double x = stratum * band;
    auto dist = [len](double y) { return std::min(y, len - y); };
    for (int k = 0; k < opts.steps; ++k) {
      const double d1 = dist(x);
      x += sigma * stream.normal();
      if (!step(d1, dist(x))) return 2.0 * band;
    }
    return 2.0 * band * (1.0 - weight);
  }

  const double r_out = std::get<Disk>(dom.variant()).radius;
  const double r_in = r_out - band;
  const double area = pi * (r_out * r_out - r_in * r_in);
  double x = std::sqrt(r_in * r_in + stratum * (r_out * r_out - r_in * r_in));
  double y = 0.0;
  auto dist = [r_out](double px, double py) { return r_out - std::hypot(px, py); };
  for (int k = 0; k < opts.steps; ++k) {
    const double d1 = dist(x, y);
    x += sigma * stream.normal();
    y += sigma * stream.normal();
    if (!step(d1, dist(x, y))) return area;
  }
  return area * (1.0 - weight);
}

namespace {

Estimate walker_estimate(const Domain& dom, double u, std::uint64_t n_paths, std::uint64_t seed,
                         unsigned workers, const WalkerOptions& opts) {
  if (n_paths == 0) throw DomainError("need at least one path");
  const auto start = std::chrono::steady_clock::now();
  const auto moments = reduce_blocks<WeightedMoments>(n_paths, workers, [&](std::uint64_t b, std::uint64_t e) {
    WeightedMoments acc;
    for (std::uint64_t i = b; i < e; ++i) {
      RandomStream stream(seed, i);
      const double stratum = (static_cast<double>(i) + stream.uniform()) / static_cast<double>(n_paths);
      acc.add(bridge_walk_deficit(dom, u, stratum, stream, opts));
    }
    return acc;
  });
  Estimate est;
  est.value = dom.volume() - moments.mean();
  est.std_error = moments.std_error();
  est.n_paths = n_paths;
  est.seed = seed;
  est.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace

Estimate mc_Q_disk(const Disk& dom, double u, std::uint64_t n_paths, std::uint64_t seed,
                   unsigned workers, const WalkerOptions& opts) {
  return walker_estimate(Domain(dom), u, n_paths, seed, workers, opts);
}

Estimate mc_Q_interval(const Interval& dom, double u, std::uint64_t n_paths, std::uint64_t seed,
                       unsigned workers, const WalkerOptions& opts) {
  return walker_estimate(Domain(dom), u, n_paths, seed, workers, opts);
}

}  // namespace subheat

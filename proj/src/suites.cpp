#include "subheat/suites.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "subheat/asymptotics.hpp"
#include "subheat/cli.hpp"
#include "subheat/diagnostics.hpp"
#include "subheat/errors.hpp"
#include "subheat/estimators.hpp"
#include "subheat/heat_oracles.hpp"
#include "subheat/parallel.hpp"

namespace subheat {
namespace {

constexpr double pi = std::numbers::pi;
const Domain unit_interval{Interval{0.0, 1.0}};

RunOptions run_options(const SuiteOptions& o, std::uint64_t full, std::uint64_t quick) {
  RunOptions r;
  r.n_paths = o.quick ? quick : full;
  r.seed = o.seed;
  r.workers = o.workers;
  return r;
}

/// |achieved - target| <= max(sigmas * stderr, rel * |target|).
SuiteCheck statistical(std::string name, double target, double achieved, double std_error, double rel,
                       double sigmas = 4.0) {
  const double tol = std::max(sigmas * std_error, rel * std::abs(target));
  return {std::move(name), target, achieved, std_error, tol, std::abs(achieved - target) <= tol};
}

SuiteCheck absolute(std::string name, double target, double achieved, double tol) {
  return {std::move(name), target, achieved, 0.0, tol, std::abs(achieved - target) <= tol};
}

/// Shortest round-trip form, so labels read 1e-06 rather than 9.99...e-07.
std::string label(const char* what, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(what) + "=" + std::string(buf, res.ptr);
}

/// Ratio of the decaying part of an estimate to the prediction's rate.
struct Ratio {
  double value;
  double error;
};

Ratio spectral_ratio(const Estimate& e, const AsymptoticPrediction& p, double t, double volume = 1.0) {
  const double r = p.rate(t);
  return {(volume - e.value) / r, e.std_error / r};
}

Ratio regular_ratio(const Estimate& e, const AsymptoticPrediction& p, double t) {
  const double r = p.rate(t);
  return {e.value / r, e.std_error / r};
}

std::vector<SuiteCheck> high_index(const SuiteOptions& o) {
  const TimeChangeSpec spec{LaplaceExponent(Stable{0.75}), TimeChangeKind::Subordinator};
  const double t = 1e-8;
  const auto run = run_options(o, 1000000, 100000);
  const auto ps = predict_spectral(spec.exponent, unit_interval, spec.kind);
  const auto pr = predict_regular(spec.exponent, unit_interval, spec.kind);
  const auto s = spectral_ratio(estimate_spectral(spec, unit_interval, t, run), ps, t);
  const auto r = regular_ratio(estimate_regular(spec, unit_interval, t, run), pr, t);
  return {statistical("spectral ratio at t=1e-8", ps.constant, s.value, s.error, 0.03),
          statistical("regular ratio at t=1e-8", pr.constant, r.value, r.error, 0.03)};
}

/// Ratios along {1e-6, 1e-8, 1e-10} with common random numbers; they must
/// approach the constant monotonically and end within 10%.
std::vector<SuiteCheck> critical_ladder(const SuiteOptions& o, const LaplaceExponent& exp) {
  const TimeChangeSpec spec{exp, TimeChangeKind::Subordinator};
  const auto run = run_options(o, 4000000, 400000);
  const auto p = predict_spectral(exp, unit_interval, spec.kind);
  std::vector<SuiteCheck> checks;
  std::vector<double> distances;
  Ratio last{};
  for (double t : {1e-6, 1e-8, 1e-10}) {
    last = spectral_ratio(estimate_spectral(spec, unit_interval, t, run), p, t);
    checks.push_back({label("ratio at t", t), p.constant, last.value, last.error, INFINITY, true});
    distances.push_back(std::abs(last.value - p.constant));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < distances.size(); ++i) monotone = monotone && distances[i] < distances[i - 1];
  checks.push_back({"distance to constant decreases", 1.0, monotone ? 1.0 : 0.0, 0.0, 0.0, monotone});
  checks.push_back(absolute("final ratio within 10%", p.constant, last.value, 0.1 * p.constant));
  return checks;
}

std::vector<SuiteCheck> low_index(const SuiteOptions& o) {
  const TimeChangeSpec spec{LaplaceExponent(Stable{0.25}), TimeChangeKind::Subordinator};
  const double t = 1e-6;
  const auto run = run_options(o, 1000000, 100000);
  const auto ps = predict_spectral(spec.exponent, unit_interval, spec.kind);
  const auto pr = predict_regular(spec.exponent, unit_interval, spec.kind);
  const auto s = spectral_ratio(estimate_spectral(spec, unit_interval, t, run), ps, t);
  const auto r = regular_ratio(estimate_regular(spec, unit_interval, t, run), pr, t);
  return {statistical("spectral ratio at t=1e-6", ps.constant, s.value, s.error, 0.02),
          statistical("regular ratio at t=1e-6", pr.constant, r.value, r.error, 0.02)};
}

std::vector<SuiteCheck> inverse(const SuiteOptions& o) {
  std::vector<SuiteCheck> checks;
  const double t = 1e-6;
  const auto run = run_options(o, 1000000, 100000);
  for (double beta : {0.25, 0.5, 0.75}) {
    const TimeChangeSpec spec{LaplaceExponent(Stable{beta}), TimeChangeKind::InverseSubordinator};
    const auto ps = predict_spectral(spec.exponent, unit_interval, spec.kind);
    const auto pr = predict_regular(spec.exponent, unit_interval, spec.kind);
    const auto s = spectral_ratio(estimate_spectral(spec, unit_interval, t, run), ps, t);
    const auto r = regular_ratio(estimate_regular(spec, unit_interval, t, run), pr, t);
    checks.push_back(statistical(label("spectral ratio, beta", beta), ps.constant, s.value, s.error, 0.02));
    checks.push_back(statistical(label("regular ratio, beta", beta), pr.constant, r.value, r.error, 0.02));
  }
  return checks;
}

std::vector<SuiteCheck> inverse_tempered(const SuiteOptions& o) {
  TimeChangeSpec spec{LaplaceExponent(TemperedStable{0.5, 1.0}), TimeChangeKind::InverseSubordinator};
  spec.grid_step = 1e-3;
  const double t = 1e-5;
  const auto run = run_options(o, 10000, 3000);
  const auto p = predict_spectral(spec.exponent, unit_interval, spec.kind);
  const auto s = spectral_ratio(estimate_spectral(spec, unit_interval, t, run), p, t);
  // Plain 5%: the allowance covers both the grid bias and Monte Carlo error.
  return {{"spectral ratio at t=1e-5", p.constant, s.value, s.error, 0.05 * p.constant,
           std::abs(s.value - p.constant) <= 0.05 * p.constant}};
}

std::vector<SuiteCheck> expansion_identity(const SuiteOptions&) {
  std::vector<SuiteCheck> checks;
  for (double beta : {0.25, 0.5, 0.75}) {
    const double mapped = expansion(beta, {4.0 / std::sqrt(pi)})[0].coefficient;
    const double limit =
        predict_spectral(LaplaceExponent(Stable{beta}), unit_interval, TimeChangeKind::InverseSubordinator).constant;
    checks.push_back(absolute(label("first coefficient, beta", beta), limit, mapped, 1e-12));
  }
  return checks;
}

template <class Draw>
WeightedMoments sample_mean(const RunOptions& run, Draw&& draw) {
  return reduce_blocks<WeightedMoments>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
    WeightedMoments acc;
    for (std::uint64_t i = b; i < e; ++i) {
      RandomStream stream(run.seed, i);
      acc.add(draw(stream));
    }
    return acc;
  });
}

std::vector<SuiteCheck> moments(const SuiteOptions& o) {
  std::vector<SuiteCheck> checks;
  const auto run = run_options(o, 1000000, 100000);
  // Orders chosen with 2 gamma < beta so the sample variance is finite.
  for (auto [beta, gamma] : {std::pair{0.75, 0.25}, std::pair{0.5, 0.2}, std::pair{0.25, 0.1}}) {
    const auto m = sample_mean(run, [&](RandomStream& s) { return std::pow(sample_stable(beta, 1.0, s), gamma); });
    checks.push_back(statistical(label("E S^gamma, beta", beta) + label(" gamma", gamma), stable_moment(beta, gamma),
                                 m.mean(), m.std_error(), 0.0));
  }
  for (auto [beta, p] : {std::pair{0.5, 0.5}, std::pair{0.25, 1.0}, std::pair{0.75, 2.0}}) {
    const TimeChangeSpec spec{LaplaceExponent(Stable{beta}), TimeChangeKind::InverseSubordinator};
    const auto m = sample_mean(run, [&](RandomStream& s) { return std::pow(sample_inverse(spec, 1.0, s), p); });
    checks.push_back(statistical(label("E E_1^p, beta", beta) + label(" p", p), inverse_moment(beta, p), m.mean(),
                                 m.std_error(), 0.0));
  }
  const TimeChangeSpec half{LaplaceExponent(Stable{0.5}), TimeChangeKind::InverseSubordinator};
  const auto report = check_inverse_moments(half, 0.5, {1e-2, 1e-4, 1e-6}, run);
  for (const auto& pt : report.moments.points) {
    checks.push_back(statistical(label("scaled E E_t^p at t", pt.t), report.moments.target, pt.statistic, pt.error, 0.0));
  }
  const auto& tr = report.truncated.points.back();
  checks.push_back(absolute("truncated / full at smallest t", 1.0, tr.statistic / report.moments.points.back().statistic,
                            report.truncated.tolerance));
  return checks;
}

std::vector<SuiteCheck> levy_convergence(const SuiteOptions& o) {
  const auto report = check_levy_convergence(LaplaceExponent(Stable{0.25}), {TestFunction::Kind::PowerExp, 0.5},
                                             {1e-2, 1e-3, 1e-4}, run_options(o, 1000000, 100000));
  const auto& last = report.points.back();
  return {statistical("E f(D_t)/t at t=1e-4", report.target, last.statistic, last.error, report.tolerance)};
}

std::vector<SuiteCheck> small_ball(const SuiteOptions& o) {
  const auto run = run_options(o, 100000, 20000);
  const auto q = check_small_ball(LaplaceExponent(Stable{0.25}), 1.0, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, run);
  const auto h = check_small_ball(LaplaceExponent(Stable{0.5}), 1.0, {0.05, 0.02, 0.01, 0.005, 0.002}, run);
  return {absolute("slope beta=0.25", q.target, q.fitted, q.tolerance),
          absolute("slope beta=0.5", h.target, h.fitted, h.tolerance)};
}

std::vector<SuiteCheck> oracles(const SuiteOptions& o) {
  std::vector<SuiteCheck> checks;
  double jump = 0.0;
  for (double len : {0.3, 1.0, 7.0}) {
    const Interval dom{0.0, len};
    const double u = 0.1 * len * len;
    jump = std::max(jump, std::abs(exact_Q_interval(dom, std::nextafter(u, 0.0)) - exact_Q_interval(dom, u)) / len);
  }
  checks.push_back(absolute("series switch jump", 0.0, jump, 1e-12));

  const Interval unit{0.0, 1.0};
  const double u = 1e-10;
  const double lead = 4.0 / std::sqrt(pi);
  checks.push_back(absolute("deficit / sqrt(u) at u=1e-10", lead, exact_deficit_interval(unit, u) / std::sqrt(u),
                            1e-4 * lead));

  // The full walker budget is used in quick mode too; the check has no
  // statistical allowance and needs the precision.
  const auto walker = mc_Q_interval(unit, 1e-3, 1000000, o.seed, o.workers);
  const double exact = exact_deficit_interval(unit, 1e-3);
  checks.push_back({"bridge walker deficit on (0,1), u=1e-3", exact, 1.0 - walker.value, walker.std_error,
                    0.005 * exact, std::abs(1.0 - walker.value - exact) <= 0.005 * exact});

  // On the unit disk the Brownian deficit is 4 sqrt(pi u) - pi u + O(u^{3/2}).
  const double ud = 1e-4;
  const auto disk = mc_Q_disk(Disk{1.0}, ud, o.quick ? 200000 : 1000000, o.seed, o.workers);
  const double predicted = 4.0 * std::sqrt(pi) - pi * std::sqrt(ud);
  checks.push_back(statistical("disk deficit / sqrt(u), u=1e-4", predicted, (pi - disk.value) / std::sqrt(ud),
                               disk.std_error / std::sqrt(ud), 0.005));
  return checks;
}

std::vector<SuiteCheck> determinism(const SuiteOptions& o) {
  std::vector<SuiteCheck> checks;
  auto csv = [&](const char* exponent, TimeChangeKind kind, std::vector<double> ladder, std::uint64_t n,
                 unsigned workers) {
    cli::RunConfig c;
    c.exponent = exponent;
    c.time_change = kind;
    c.t_ladder = std::move(ladder);
    c.n_paths = n;
    c.seed = o.seed;
    c.workers = workers;
    c.grid_step = 1e-2;
    return cli::render_estimate(cli::run_estimate(c), cli::OutputFormat::Csv);
  };
  const auto a1 = csv("stable:0.75", TimeChangeKind::Subordinator, {1e-4, 1e-6}, 20000, 1);
  const auto a4 = csv("stable:0.75", TimeChangeKind::Subordinator, {1e-4, 1e-6}, 20000, 4);
  const auto again = csv("stable:0.75", TimeChangeKind::Subordinator, {1e-4, 1e-6}, 20000, 1);
  const auto b1 = csv("tempered:0.5,1", TimeChangeKind::InverseSubordinator, {1e-2, 1e-3}, 9000, 1);
  const auto b3 = csv("tempered:0.5,1", TimeChangeKind::InverseSubordinator, {1e-2, 1e-3}, 9000, 3);
  auto same = [](const std::string& x, const std::string& y) { return x == y ? 1.0 : 0.0; };
  checks.push_back(absolute("subordinator CSV, 1 vs 4 workers", 1.0, same(a1, a4), 0.0));
  checks.push_back(absolute("subordinator CSV, repeated run", 1.0, same(a1, again), 0.0));
  checks.push_back(absolute("inverse tempered CSV, 1 vs 3 workers", 1.0, same(b1, b3), 0.0));
  return checks;
}

using SuiteFn = std::function<std::vector<SuiteCheck>(const SuiteOptions&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites{
      {"oracles", oracles},
      {"high-index", high_index},
      {"critical", [](const SuiteOptions& o) { return critical_ladder(o, LaplaceExponent(Stable{0.5})); }},
      {"low-index", low_index},
      {"mixed-critical",
       [](const SuiteOptions& o) {
         return critical_ladder(o, LaplaceExponent(MixedStable{{{0.25, 1.0}, {0.5, 1.0}}}));
       }},
      {"inverse", inverse},
      {"inverse-tempered", inverse_tempered},
      {"expansion", expansion_identity},
      {"moments", moments},
      {"levy-convergence", levy_convergence},
      {"small-ball", small_ball},
      {"determinism", determinism},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

SuiteResult run_suite(std::string_view name, const SuiteOptions& options) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
  if (it == reg.end()) throw ConfigError("unknown suite '" + std::string(name) + "'");
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result;
  result.suite = it->first;
  result.checks = it->second(options);
  for (const auto& c : result.checks) result.pass = result.pass && c.pass;
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace subheat

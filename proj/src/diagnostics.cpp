#include "subheat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "subheat/asymptotics.hpp"
#include "subheat/errors.hpp"
#include "subheat/numerics.hpp"
#include "subheat/parallel.hpp"

namespace subheat {
namespace {

void check_ladder(const std::vector<double>& ladder, std::size_t min_points) {
  if (ladder.size() < min_points) throw DomainError("ladder has too few points");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw DomainError("ladder values must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw DomainError("ladder must be strictly decreasing");
  }
}

/// Weighted sum of exp(l_i) kept as a shifted sum so that weights far below
/// the double range still add up.
struct LogWeights {
  double shift = -std::numeric_limits<double>::infinity();
  double s1 = 0.0;  // sum exp(l - shift)
  double s2 = 0.0;  // sum exp(2 (l - shift))
  std::uint64_t n = 0;

  void rebase(double new_shift) {
    if (new_shift <= shift) return;
    if (std::isfinite(shift)) {
      const double f = std::exp(shift - new_shift);
      s1 *= f;
      s2 *= f * f;
    }
    shift = new_shift;
  }

  void add(double l) {
    ++n;
    if (l == -std::numeric_limits<double>::infinity()) return;
    rebase(l);
    const double e = std::exp(l - shift);
    s1 += e;
    s2 += e * e;
  }

  void merge(const LogWeights& o) {
    n += o.n;
    if (o.s1 == 0.0) return;
    rebase(o.shift);
    const double f = std::exp(o.shift - shift);
    s1 += o.s1 * f;
    s2 += o.s2 * f * f;
  }

  double log_mean() const { return shift + std::log(s1 / static_cast<double>(n)); }

  double relative_error() const {
    const double nn = static_cast<double>(n);
    return std::sqrt(std::max(0.0, nn * s2 / (s1 * s1) - 1.0) / (nn - 1.0));
  }
};

/// One stable component at time tau conditioned to stay below x:
/// S <= x iff E >= a with a = A(U) (tau^{1/beta} / x)^{beta/(1-beta)}; E is
/// drawn as a + Exp(1) and the path carries log-weight -a.
double conditioned_stable(double beta, double tau, double x, RandomStream& stream, double& log_weight) {
  const double eps = stream.uniform();
  const double log_a = kanter_log_amplitude(beta, 1.0 - eps, eps);
  const double kappa = (1.0 - beta) / beta;
  const double log_scale = std::log(tau) / beta;
  const double a = std::exp(log_a + (log_scale - std::log(x)) / kappa);
  const double e = a + stream.exponential();
  log_weight -= a;
  return std::exp(log_scale + kappa * (log_a - std::log(e)));
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::PowerExp: return std::pow(std::min(x, 1.0), gamma) * std::exp(-x);
    case Kind::Bump: {
      if (!(x > lo && x < hi)) return 0.0;
      const double s = (2.0 * x - lo - hi) / (hi - lo);
      return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
  }
  return 0.0;
}

double levy_test_integral(const LaplaceExponent& exp, const TestFunction& f) {
  auto integrand = [&](double x) { return x > 0.0 ? f(x) * levy_density(exp, x) : 0.0; };
  switch (f.kind) {
    case TestFunction::Kind::Zero: return 0.0;
    case TestFunction::Kind::Bump: return integrate(integrand, f.lo, f.hi);
    case TestFunction::Kind::PowerExp: {
      // On (0,1] f = x^gamma e^{-x}; fold the power into the density.
      auto inner = [&](double x) { return x > 0.0 ? std::exp(-x) * levy_density_power(exp, x, f.gamma) : 0.0; };
      return integrate(inner, 0.0, 1.0) + integrate_to_infinity(integrand, 1.0);
    }
  }
  return 0.0;
}

double stable_power_exp_integral(double beta, double gamma) {
  if (!(gamma > beta)) throw DomainError("need gamma > beta");
  return beta / std::tgamma(1.0 - beta) *
         (boost::math::tgamma_lower(gamma - beta, 1.0) + upper_incomplete_gamma_negative(-beta, 1.0));
}

LadderReport check_levy_convergence(const LaplaceExponent& exp, const TestFunction& f,
                                    const std::vector<double>& t_ladder, const RunOptions& run, double rel_tol) {
  check_ladder(t_ladder, 1);
  if (f.kind == TestFunction::Kind::PowerExp && !(f.gamma > exp.leading_index())) {
    throw DomainError("test function must vanish faster than x^beta at 0 (gamma > beta)");
  }
  if (f.kind == TestFunction::Kind::Bump && !(0.0 < f.lo && f.lo < f.hi)) {
    throw DomainError("bump support must be 0 < lo < hi");
  }
  LadderReport report;
  report.target = levy_test_integral(exp, f);
  report.tolerance = rel_tol;
  for (double t : t_ladder) {
    const auto m = reduce_blocks<WeightedMoments>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
      WeightedMoments acc;
      for (std::uint64_t i = b; i < e; ++i) {
        RandomStream stream(run.seed, i);
        if (run.importance) {
          const auto d = sample_subordinator_tail_weighted(exp, t, 1.0, stream);
          acc.add(f(d.value), d.weight);
        } else {
          acc.add(f(sample_subordinator(exp, t, stream)));
        }
      }
      return acc;
    });
    report.points.push_back({t, m.mean() / t, m.std_error() / t});
  }
  const auto& last = report.points.back();
  report.fitted = last.statistic;
  const double allowed =
      report.target == 0.0 ? 1e-12 : std::max(4.0 * last.error, rel_tol * std::abs(report.target));
  report.pass = std::abs(last.statistic - report.target) <= allowed;
  return report;
}

SmallBallEstimate small_ball_probability(const LaplaceExponent& exp, double delta, double x,
                                         const RunOptions& run) {
  if (!(delta > 0.0) || !(x > 0.0)) throw DomainError("small-ball check needs delta > 0 and x > 0");
  const auto acc = reduce_blocks<LogWeights>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
    LogWeights lw;
    for (std::uint64_t i = b; i < e; ++i) {
      RandomStream stream(run.seed, i);
      double log_w = 0.0;
      double sum = 0.0;
      if (const auto* st = std::get_if<Stable>(&exp.variant())) {
        sum = conditioned_stable(st->beta, delta, x, stream, log_w);
      } else if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
        // Tempered law = stable law tilted by exp(-theta s + delta theta^beta).
        sum = conditioned_stable(ts->beta, delta, x, stream, log_w);
        log_w += delta * std::pow(ts->theta, ts->beta) - ts->theta * sum;
      } else {
        for (const auto& c : std::get<MixedStable>(exp.variant()).components) {
          sum += conditioned_stable(c.beta, c.weight * delta, x, stream, log_w);
        }
      }
      lw.add(sum <= x ? log_w : -std::numeric_limits<double>::infinity());
    }
    return lw;
  });
  if (acc.s1 == 0.0) throw DomainError("no path stayed below the small-ball level; ladder too deep");
  return {acc.log_mean(), acc.relative_error()};
}

LadderReport check_small_ball(const LaplaceExponent& exp, double delta, const std::vector<double>& x_ladder,
                              const RunOptions& run, double slope_tol) {
  check_ladder(x_ladder, 2);
  const double beta = exp.leading_index();
  LadderReport report;
  report.target = beta / (1.0 - beta);
  report.tolerance = slope_tol;
  std::vector<double> xs, ys;
  for (double x : x_ladder) {
    const auto p = small_ball_probability(exp, delta, x, run);
    // -log P has standard error equal to the relative error of P.
    report.points.push_back({x, -p.log_probability, p.relative_error});
    if (!(p.log_probability < 0.0)) {
      throw DomainError("small-ball probability is not below one at x = " + std::to_string(x));
    }
    xs.push_back(std::log(1.0 / x));
    ys.push_back(std::log(-p.log_probability));
  }
  report.fitted = slope(xs, ys);
  report.pass = std::abs(report.fitted - report.target) <= slope_tol;
  return report;
}

namespace {

struct Histogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
  void merge(const Histogram& o) {
    if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
    for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
    n += o.n;
  }
};

}  // namespace

std::vector<LadderPoint> heat_kernel_ratio_profile(const LaplaceExponent& exp, double t,
                                                   const std::vector<double>& x_grid, const RunOptions& run) {
  if (x_grid.size() < 2 || !std::is_sorted(x_grid.begin(), x_grid.end()) || !(x_grid.front() > 0.0)) {
    throw DomainError("x_grid must hold at least two increasing positive edges");
  }
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const std::size_t bins = x_grid.size() - 1;
  const auto hist = reduce_blocks<Histogram>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
    Histogram h;
    h.counts.assign(bins, 0);
    for (std::uint64_t i = b; i < e; ++i) {
      RandomStream stream(run.seed, i);
      const double d = sample_subordinator(exp, t, stream);
      ++h.n;
      const auto it = std::upper_bound(x_grid.begin(), x_grid.end(), d);
      if (it == x_grid.begin() || it == x_grid.end()) continue;
      ++h.counts[static_cast<std::size_t>(it - x_grid.begin()) - 1];
    }
    return h;
  });
  std::vector<LadderPoint> profile;
  const double n = static_cast<double>(hist.n);
  for (std::size_t k = 0; k < bins; ++k) {
    const double width = x_grid[k + 1] - x_grid[k];
    const double centre = std::sqrt(x_grid[k] * x_grid[k + 1]);
    const double bound = t / centre * phi(exp, 1.0 / centre);
    const double c = static_cast<double>(k < hist.counts.size() ? hist.counts[k] : 0);
    profile.push_back({centre, c / (n * width) / bound, std::sqrt(c) / (n * width) / bound});
  }
  return profile;
}

LadderReport check_heat_kernel_bound(const LaplaceExponent& exp, const std::vector<double>& t_values,
                                     const std::vector<double>& x_grid, const RunOptions& run) {
  if (t_values.size() < 2) throw DomainError("heat-kernel check needs at least two t values");
  LadderReport report;
  report.tolerance = 2.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool finite = true;
  for (double t : t_values) {
    const auto profile = heat_kernel_ratio_profile(exp, t, x_grid, run);
    const auto top = std::max_element(profile.begin(), profile.end(),
                                      [](const auto& a, const auto& b) { return a.statistic < b.statistic; });
    report.points.push_back({t, top->statistic, top->error});
    finite = finite && std::isfinite(top->statistic);
    lo = std::min(lo, top->statistic);
    hi = std::max(hi, top->statistic);
  }
  report.fitted = hi;
  report.target = lo;
  report.pass = finite && lo > 0.0 && hi / lo <= report.tolerance;
  return report;
}

namespace {

struct MomentPair {
  WeightedMoments full;
  WeightedMoments truncated;
  void merge(const MomentPair& o) {
    full.merge(o.full);
    truncated.merge(o.truncated);
  }
};

}  // namespace

InverseMomentReport check_inverse_moments(const TimeChangeSpec& spec, double p, const std::vector<double>& t_ladder,
                                          const RunOptions& run, double delta, double rel_tol) {
  spec.validate();
  check_ladder(t_ladder, 1);
  const double target = inverse_moment(spec.exponent.leading_index(), p);
  InverseMomentReport report;
  for (auto* r : {&report.moments, &report.truncated}) {
    r->target = target;
    r->tolerance = rel_tol;
  }
  for (double t : t_ladder) {
    const auto m = reduce_blocks<MomentPair>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
      MomentPair acc;
      for (std::uint64_t i = b; i < e; ++i) {
        RandomStream stream(run.seed, i);
        const double et = sample_inverse(spec, t, stream);
        const double v = std::pow(et, p);
        acc.full.add(v);
        acc.truncated.add(et <= delta ? v : 0.0);
      }
      return acc;
    });
    const double scale = std::pow(phi(spec.exponent, 1.0 / t), p);
    report.moments.points.push_back({t, m.full.mean() * scale, m.full.std_error() * scale});
    report.truncated.points.push_back({t, m.truncated.mean() * scale, m.truncated.std_error() * scale});
  }
  const auto& last = report.moments.points.back();
  const auto& last_trunc = report.truncated.points.back();
  report.moments.fitted = last.statistic;
  report.truncated.fitted = last_trunc.statistic;
  const bool near_target = std::abs(last.statistic - target) <= std::max(4.0 * last.error, rel_tol * target);
  const bool truncation_negligible = std::abs(last_trunc.statistic / last.statistic - 1.0) <= rel_tol;
  report.moments.pass = near_target && truncation_negligible;
  report.truncated.pass = truncation_negligible;
  return report;
}

}  // namespace subheat

#include "subheat/estimators.hpp"

#include <chrono>

#include "subheat/errors.hpp"
#include "subheat/parallel.hpp"

namespace subheat {
namespace {

const Interval& require_interval(const Domain& dom) {
  const auto* i = std::get_if<Interval>(&dom.variant());
  if (i == nullptr) {
    throw UnsupportedConfiguration("exact-oracle estimators need an interval; use the path estimator for " +
                                   dom.to_string());
  }
  return *i;
}

void check_run(const RunOptions& run, double t) {
  if (run.n_paths < 2) throw DomainError("need at least two paths");
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
}

/// Runs `path(stream, index) -> {g, w}` over all paths and wraps the weighted
/// mean of g as an Estimate of offset + sign * mean.
template <class PathFn>
Estimate run_paths(const RunOptions& run, double offset, double sign, PathFn&& path) {
  const auto start = std::chrono::steady_clock::now();
  const auto moments =
      reduce_blocks<WeightedMoments>(run.n_paths, run.workers, [&](std::uint64_t b, std::uint64_t e) {
        WeightedMoments acc;
        for (std::uint64_t i = b; i < e; ++i) {
          RandomStream stream(run.seed, i);
          const WeightedDraw d = path(stream, i);
          acc.add(d.value, d.weight);
        }
        return acc;
      });
  Estimate est;
  est.value = offset + sign * moments.mean();
  est.std_error = moments.std_error();
  est.n_paths = run.n_paths;
  est.seed = run.seed;
  est.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

Estimate trivial(double value, const RunOptions& run) {
  Estimate est;
  est.value = value;
  est.n_paths = run.n_paths;
  est.seed = run.seed;
  return est;
}

/// Mean of oracle(U_t) over clocks. Subordinator clocks use the tail mixture
/// when requested; oracle saturation sets its scale.
template <class Oracle>
Estimate clock_average(const TimeChangeSpec& spec, double t, const RunOptions& run, double offset,
                       double sign, double saturation, Oracle&& oracle) {
  if (spec.kind == TimeChangeKind::Subordinator && run.importance) {
    return run_paths(run, offset, sign, [&](RandomStream& stream, std::uint64_t) {
      const auto draw = sample_subordinator_tail_weighted(spec.exponent, t, saturation, stream);
      return WeightedDraw{oracle(draw.value), draw.weight};
    });
  }
  return run_paths(run, offset, sign, [&](RandomStream& stream, std::uint64_t) {
    return WeightedDraw{oracle(sample_time_change(spec, t, stream)), 1.0};
  });
}

}  // namespace

Estimate estimate_spectral(const TimeChangeSpec& spec, const Domain& dom, double t, const RunOptions& run) {
  spec.validate();
  const Interval& interval = require_interval(dom);
  check_run(run, t);
  const double len = dom.volume();
  if (t == 0.0) return trivial(len, run);
  return clock_average(spec, t, run, len, -1.0, len * len,
                       [&](double u) { return exact_deficit_interval(interval, u); });
}

Estimate estimate_spectral_subordinate(const LaplaceExponent& exp, const Domain& dom, double t,
                                       const RunOptions& run) {
  return estimate_spectral(TimeChangeSpec{exp, TimeChangeKind::Subordinator}, dom, t, run);
}

Estimate estimate_spectral_inverse(const TimeChangeSpec& spec, const Domain& dom, double t,
                                   const RunOptions& run) {
  TimeChangeSpec inverse = spec;
  inverse.kind = TimeChangeKind::InverseSubordinator;
  return estimate_spectral(inverse, dom, t, run);
}

Estimate estimate_regular(const TimeChangeSpec& spec, const Domain& dom, double t, const RunOptions& run) {
  spec.validate();
  const Interval& interval = require_interval(dom);
  check_run(run, t);
  if (t == 0.0) return trivial(0.0, run);
  const double len = dom.volume();
  return clock_average(spec, t, run, 0.0, 1.0, len * len,
                       [&](double u) { return exact_H_interval(interval, u); });
}

Estimate estimate_spectral_paths(const TimeChangeSpec& spec, const Domain& dom, double t,
                                 const RunOptions& run, const WalkerOptions& walker) {
  spec.validate();
  check_run(run, t);
  if (t == 0.0) return trivial(dom.volume(), run);
  const double n = static_cast<double>(run.n_paths);
  return run_paths(run, dom.volume(), -1.0, [&](RandomStream& stream, std::uint64_t i) {
    const double u = sample_time_change(spec, t, stream);
    const double stratum = (static_cast<double>(i) + stream.uniform()) / n;
    return WeightedDraw{bridge_walk_deficit(dom, u, stratum, stream, walker), 1.0};
  });
}

Estimate estimate_spectral_disk(const TimeChangeSpec& spec, const Domain& dom, double t,
                                const RunOptions& run, const WalkerOptions& walker) {
  if (dom.is_interval()) {
    throw UnsupportedConfiguration("disk estimator called with " + dom.to_string());
  }
  return estimate_spectral_paths(spec, dom, t, run, walker);
}

Estimate estimate_adaptive(const std::function<Estimate(const RunOptions&)>& estimate,
                           const std::function<double(const Estimate&)>& deficit_of, RunOptions run,
                           double rel_target, std::uint64_t max_paths) {
  if (!(rel_target > 0.0)) throw DomainError("relative stderr target must be positive");
  double elapsed = 0.0;
  while (true) {
    Estimate est = estimate(run);
    elapsed += est.wall_time;
    const bool converged = est.std_error <= rel_target * std::abs(deficit_of(est));
    if (converged || run.n_paths * 2 > max_paths) {
      est.wall_time = elapsed;
      return est;
    }
    run.n_paths *= 2;
  }
}

}  // namespace subheat

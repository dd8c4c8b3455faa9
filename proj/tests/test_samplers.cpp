#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "subheat/asymptotics.hpp"
#include "subheat/errors.hpp"
#include "subheat/samplers.hpp"

using namespace subheat;
using doctest::Approx;

namespace {

struct MeanError {
  double mean;
  double std_error;
};

template <class Draw>
MeanError mc_mean(int n, std::uint64_t seed, Draw&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream stream(seed, static_cast<std::uint64_t>(i));
    const double g = draw(stream);
    s += g;
    s2 += g * g;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / (n - 1))};
}

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Critical value at level 0.01 for equal sample sizes n.
double ks_critical(std::size_t n) { return 1.628 * std::sqrt(2.0 / static_cast<double>(n)); }

template <class Draw>
std::vector<double> draws(int n, std::uint64_t seed, Draw&& draw) {
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    RandomStream stream(seed, static_cast<std::uint64_t>(i));
    out.push_back(draw(stream));
  }
  return out;
}

void check_within(const MeanError& m, double target, double sigmas) {
  CAPTURE(m.mean);
  CAPTURE(m.std_error);
  CAPTURE(target);
  CHECK(std::abs(m.mean - target) <= sigmas * m.std_error);
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("streams are pure functions of seed and key") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_key = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_key |= x != c.next_u64();
    differs_seed |= x != d.next_u64();
  }
  CHECK(differs_key);
  CHECK(differs_seed);
}

TEST_CASE("uniforms stay strictly inside (0,1)") {
  RandomStream s(1, 1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == Approx(0.5).epsilon(0.01));
}

TEST_CASE("Kanter amplitude keeps precision near u = 1") {
  const double beta = 0.6, u = 0.3;
  const double direct = std::log(std::pow(std::sin(beta * std::numbers::pi * u), beta) *
                                 std::pow(std::sin((1 - beta) * std::numbers::pi * u), 1 - beta) /
                                 std::sin(std::numbers::pi * u)) /
                        (1 - beta);
  CHECK(kanter_log_amplitude(beta, u, 1 - u) == Approx(direct).epsilon(1e-13));
  CHECK(std::isfinite(kanter_log_amplitude(beta, 1.0, 1e-300)));
}

TEST_CASE("stable Laplace transform") {
  for (double beta : {0.25, 0.5, 0.75}) {
    for (double s : {0.5, 2.0}) {
      const auto m = mc_mean(200000, 3, [&](RandomStream& r) { return std::exp(-s * sample_stable(beta, 1.5, r)); });
      check_within(m, std::exp(-1.5 * std::pow(s, beta)), 4.0);
    }
  }
}

TEST_CASE("one-half stable law is t^2 / (2 Z^2)") {
  const int n = 100000;
  const double t = 0.7;
  const auto a = draws(n, 5, [&](RandomStream& r) { return sample_stable(0.5, t, r); });
  const auto b = draws(n, 6, [&](RandomStream& r) {
    const double z = r.normal();
    return t * t / (2.0 * z * z);
  });
  CHECK(ks_statistic(a, b) < ks_critical(n));
  // The same transform check rejects the variance-one-half scaling t^2/(4Z^2).
  const auto m = mc_mean(200000, 7, [&](RandomStream& r) {
    const double z = r.normal();
    return std::exp(-t * t / (2.0 * z * z));
  });
  check_within(m, std::exp(-t), 4.0);
  const auto wrong = mc_mean(200000, 7, [&](RandomStream& r) {
    const double z = r.normal();
    return std::exp(-t * t / (4.0 * z * z));
  });
  CHECK(std::abs(wrong.mean - std::exp(-t)) > 20.0 * wrong.std_error);
}

TEST_CASE("stable fractional moments") {
  const std::pair<double, double> pairs[] = {{0.75, 0.25}, {0.5, 0.2}, {0.25, 0.1}};
  for (auto [beta, gamma] : pairs) {
    const auto m = mc_mean(1000000, 11, [&](RandomStream& r) { return std::pow(sample_stable(beta, 1.0, r), gamma); });
    check_within(m, stable_moment(beta, gamma), 4.0);
  }
}

TEST_CASE("stable self-similarity") {
  const int n = 100000;
  for (double beta : {0.3, 0.75}) {
    const auto a = draws(n, 13, [&](RandomStream& r) { return sample_stable(beta, 4.0, r) / std::pow(4.0, 1.0 / beta); });
    const auto b = draws(n, 14, [&](RandomStream& r) { return sample_stable(beta, 1.0, r); });
    CHECK(ks_statistic(a, b) < ks_critical(n));
  }
}

TEST_CASE("tempered stable moments and transform") {
  const auto mean = mc_mean(1000000, 17, [](RandomStream& r) { return sample_tempered(0.5, 1.0, 1.0, r); });
  check_within(mean, 0.5, 3.0);
  const auto lt = mc_mean(1000000, 18, [](RandomStream& r) { return std::exp(-sample_tempered(0.5, 1.0, 1.0, r)); });
  check_within(lt, std::exp(-(std::sqrt(2.0) - 1.0)), 3.0);
  // Long horizon: five chunks.
  const auto chunked = mc_mean(200000, 19, [](RandomStream& r) { return std::exp(-0.3 * sample_tempered(0.5, 1.0, 5.0, r)); });
  check_within(chunked, std::exp(-5.0 * (std::sqrt(1.3) - 1.0)), 4.0);
}

TEST_CASE("tempering with theta near zero recovers the stable law") {
  const int n = 100000;
  const auto a = draws(n, 21, [](RandomStream& r) { return sample_tempered(0.6, 1e-12, 1.0, r); });
  const auto b = draws(n, 22, [](RandomStream& r) { return sample_stable(0.6, 1.0, r); });
  CHECK(ks_statistic(a, b) < ks_critical(n));
}

TEST_CASE("mixed stable sums") {
  const std::vector<StableComponent> one{{0.4, 1.0}};
  for (int i = 0; i < 50; ++i) {
    RandomStream a(23, i), b(23, i);
    CHECK(sample_mixed(one, 2.0, a) == sample_stable(0.4, 2.0, b));
  }

  const std::vector<StableComponent> two{{0.25, 1.0}, {0.75, 2.0}};
  const auto lt = mc_mean(300000, 24, [&](RandomStream& r) { return std::exp(-0.8 * sample_mixed(two, 0.5, r)); });
  check_within(lt, std::exp(-0.5 * (std::pow(0.8, 0.25) + 2.0 * std::pow(0.8, 0.75))), 4.0);

  // Adding a nonnegative component shifts every quantile up.
  const int n = 20000;
  const std::vector<StableComponent> both{{0.25, 1.0}, {0.75, 1.0}};
  auto mixed = draws(n, 25, [&](RandomStream& r) { return sample_mixed(both, 1.0, r); });
  auto alone = draws(n, 26, [](RandomStream& r) { return sample_stable(0.75, 1.0, r); });
  std::sort(mixed.begin(), mixed.end());
  std::sort(alone.begin(), alone.end());
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto k = static_cast<std::size_t>(q * n);
    CHECK(mixed[k] > alone[k]);
  }
}

TEST_CASE("tail-weighted draws reproduce the nominal law") {
  const LaplaceExponent exps[] = {LaplaceExponent(Stable{0.75}), LaplaceExponent(TemperedStable{0.5, 1.0}),
                                  LaplaceExponent(MixedStable{{{0.25, 1.0}, {0.5, 1.0}}})};
  for (const auto& e : exps) {
    CAPTURE(e.to_string());
    const double t = 1e-3, s = 30.0;
    const auto w = mc_mean(200000, 27, [&](RandomStream& r) { return sample_subordinator_tail_weighted(e, t, 1.0, r).weight; });
    check_within(w, 1.0, 4.0);
    const auto lt = mc_mean(200000, 28, [&](RandomStream& r) {
      const auto d = sample_subordinator_tail_weighted(e, t, 1.0, r);
      return d.weight * std::exp(-s * d.value);
    });
    check_within(lt, std::exp(-t * phi(e, s)), 4.0);
  }
}

TEST_CASE("exact inverse stable sampler") {
  const TimeChangeSpec spec{LaplaceExponent(Stable{0.5}), TimeChangeKind::InverseSubordinator};
  const auto m = mc_mean(1000000, 29, [&](RandomStream& r) { return sample_inverse(spec, 1.0, r); });
  check_within(m, 2.0 / std::sqrt(std::numbers::pi), 4.0);
  const auto m2 = mc_mean(1000000, 30, [&](RandomStream& r) { return std::pow(sample_inverse(spec, 1.0, r), 0.5); });
  check_within(m2, inverse_moment(0.5, 0.5), 4.0);
}

TEST_CASE("inverse levels are nondecreasing along one path") {
  const double levels[] = {0.1, 0.2, 0.5, 0.5, 1.0, 3.0};
  for (const char* e : {"stable:0.6", "tempered:0.5,1", "mixed:0.3+0.7"}) {
    TimeChangeSpec spec{parse_exponent(e), TimeChangeKind::InverseSubordinator};
    spec.grid_step = 1e-2;
    for (int i = 0; i < 200; ++i) {
      RandomStream r(31, i);
      const auto out = sample_inverse_levels(spec, levels, r);
      CHECK(std::is_sorted(out.begin(), out.end()));
      CHECK(out.front() >= 0.0);
    }
  }
  TimeChangeSpec spec{LaplaceExponent(Stable{0.5}), TimeChangeKind::InverseSubordinator};
  RandomStream r(1, 1);
  const double bad[] = {1.0, 0.5};
  CHECK_THROWS_AS(sample_inverse_levels(spec, bad, r), DomainError);
}

TEST_CASE("grid inverse sampler converges to the renewal mean") {
  // E[E_1] for phi(s) = sqrt(s+1) - 1, from inverting 1/(s phi(s)).
  const double exact = 2.471604938134870;
  for (double g : {1e-2, 1e-3}) {
    TimeChangeSpec spec{LaplaceExponent(TemperedStable{0.5, 1.0}), TimeChangeKind::InverseSubordinator};
    spec.grid_step = g;
    const auto m = mc_mean(20000, 33, [&](RandomStream& r) { return sample_inverse(spec, 1.0, r); });
    check_within(m, exact, 4.0);
  }
}

TEST_CASE("grid walk respects its step budget") {
  TimeChangeSpec spec{LaplaceExponent(TemperedStable{0.5, 1.0}), TimeChangeKind::InverseSubordinator};
  spec.grid_step = 1e-6;
  spec.max_grid_steps = 1000;
  RandomStream r(1, 1);
  CHECK_THROWS_AS(sample_inverse(spec, 1.0, r), RunawaySampler);
  spec.grid_step = 0.0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

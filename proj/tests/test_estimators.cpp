#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subheat/asymptotics.hpp"
#include "subheat/errors.hpp"
#include "subheat/estimators.hpp"

using namespace subheat;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;
const Domain unit{Interval{0.0, 1.0}};
const Domain disk{Disk{1.0}};

TimeChangeSpec sub(const char* e) { return {parse_exponent(e), TimeChangeKind::Subordinator}; }
TimeChangeSpec inv(const char* e) { return {parse_exponent(e), TimeChangeKind::InverseSubordinator}; }

RunOptions run(std::uint64_t n, std::uint64_t seed, bool importance = true) {
  RunOptions r;
  r.n_paths = n;
  r.seed = seed;
  r.importance = importance;
  return r;
}

/// |ratio - target| <= max(sigmas * stderr, rel * target), reported with context.
void check_ratio(double deficit, double err, double rate, double target, double rel, double sigmas = 4.0) {
  const double ratio = deficit / rate;
  const double ratio_err = err / rate;
  CAPTURE(ratio);
  CAPTURE(ratio_err);
  CAPTURE(target);
  CHECK(std::abs(ratio - target) <= std::max(sigmas * ratio_err, rel * target));
}

}  // namespace

TEST_CASE("trivial times") {
  CHECK(estimate_spectral(sub("stable:0.5"), unit, 0.0, run(10, 1)).value == 1.0);
  CHECK(estimate_regular(sub("stable:0.5"), unit, 0.0, run(10, 1)).value == 0.0);
  CHECK(estimate_spectral(sub("stable:0.75"), unit, 1e6, run(1000, 1)).value < 1e-6);
  CHECK(estimate_spectral(inv("stable:0.5"), unit, 1e12, run(1000, 1)).value < 1e-3);
  CHECK(estimate_regular(inv("stable:0.5"), unit, 1e12, run(1000, 1)).value == Approx(1.0).epsilon(1e-3));
  // Tiny t: nothing has moved.
  CHECK(estimate_spectral(inv("stable:0.5"), unit, 1e-40, run(1000, 1)).value == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(estimate_spectral(sub("stable:0.5"), unit, 1e-3, run(1, 1)), DomainError);
  CHECK_THROWS_AS(estimate_spectral(sub("stable:0.5"), unit, -1.0, run(10, 1)), DomainError);
  CHECK_THROWS_AS(estimate_spectral(sub("stable:0.5"), disk, 1e-3, run(10, 1)), UnsupportedConfiguration);
  CHECK_THROWS_AS(estimate_regular(sub("stable:0.5"), disk, 1e-3, run(10, 1)), UnsupportedConfiguration);
  CHECK_THROWS_AS(estimate_spectral_disk(sub("stable:0.5"), unit, 1e-3, run(10, 1)), UnsupportedConfiguration);
}

TEST_CASE("high-index subordinate content") {
  const double t = 1e-8;
  const auto est = estimate_spectral(sub("stable:0.75"), unit, t, run(200000, 2));
  const double rate = std::pow(t, 2.0 / 3.0);
  check_ratio(1.0 - est.value, est.std_error, rate, 3.4109304803047764, 0.03);
  const auto reg = estimate_regular(sub("stable:0.75"), unit, t, run(200000, 2));
  check_ratio(reg.value, reg.std_error, rate, 1.7054652401523882, 0.03);
}

TEST_CASE("low-index subordinate content") {
  const double t = 1e-6;
  const auto est = estimate_spectral(sub("stable:0.25"), unit, t, run(200000, 3));
  check_ratio(1.0 - est.value, est.std_error, t, 2.426238091745, 0.02);
  const auto reg = estimate_regular(sub("stable:0.25"), unit, t, run(200000, 3));
  check_ratio(reg.value, reg.std_error, t, 1.595769121605731, 0.02);
}

TEST_CASE("inverse stable content") {
  const double t = 1e-6;
  const double c = 2.0 / std::tgamma(1.25);
  const auto est = estimate_spectral_inverse(inv("stable:0.5"), unit, t, run(200000, 4));
  check_ratio(1.0 - est.value, est.std_error, std::pow(t, 0.25), c, 0.02);
  const auto reg = estimate_regular(inv("stable:0.5"), unit, t, run(200000, 4));
  check_ratio(reg.value, reg.std_error, std::pow(t, 0.25), 0.5 * c, 0.02);
}

TEST_CASE("clock averages match the exact eigenmode sums") {
  // |Omega| - Q~(t) = sum_{k odd} 8/(k pi)^2 (1 - exp(-t phi(k^2 pi^2))), summed
  // directly to k = 4e7 with the remaining tail added in closed form.
  struct Case {
    const char* exponent;
    double t;
    double deficit;
  };
  const Case cases[] = {
      {"stable:0.5", 1e-2, 0.06561786283056906},     {"mixed:0.25+0.5", 1e-2, 0.08529934435194683},
      {"tempered:0.5,1", 1e-2, 0.05751743970237875}, {"stable:0.75", 1e-2, 0.13891015234837326},
      {"stable:0.5", 1e-6, 1.8288720959748673e-05},  {"mixed:0.25+0.5", 1e-6, 2.071043895801814e-05},
      {"tempered:0.5,1", 1e-6, 1.74213002956042e-05}, {"stable:0.75", 1e-6, 3.391624898295317e-04},
  };
  for (const auto& c : cases) {
    const std::string name = c.exponent;
    CAPTURE(name);
    CAPTURE(c.t);
    const auto is = estimate_spectral(sub(c.exponent), unit, c.t, run(200000, 5, true));
    CAPTURE(is.value);
    CAPTURE(is.std_error);
    CHECK(std::abs(1.0 - is.value - c.deficit) <= 4.0 * is.std_error);
    const auto plain = estimate_spectral(sub(c.exponent), unit, c.t, run(200000, 6, false));
    CAPTURE(plain.value);
    CAPTURE(plain.std_error);
    if (c.t > 1e-3) {
      // Large clocks are not rare here, so plain sampling is reliable.
      CHECK(std::abs(1.0 - plain.value - c.deficit) <= 4.0 * plain.std_error);
    } else {
      // Here plain sampling rarely sees the jumps that carry the mean.
      CHECK(is.std_error < plain.std_error);
    }
  }
}

TEST_CASE("oracle averaging agrees with two-stage path simulation") {
  const double t = 1e-3;
  const auto oracle = estimate_spectral(inv("stable:0.5"), unit, t, run(20000, 7, false));
  const auto paths = estimate_spectral_paths(inv("stable:0.5"), unit, t, run(20000, 7), {64, false, false});
  CHECK(oracle.std_error < paths.std_error);
  CHECK(std::abs(oracle.value - paths.value) <= 4.0 * std::hypot(oracle.std_error, paths.std_error));
}

TEST_CASE("disk content scales with the perimeter") {
  const double t = 1e-4;
  const auto est = estimate_spectral_disk(inv("stable:0.5"), disk, t, run(20000, 8));
  // Two terms of the inverse-clock expansion with Brownian coefficients
  // 4 sqrt(pi) and -pi on the unit disk.
  const auto terms = expansion(0.5, {4.0 * std::sqrt(pi), -pi});
  const double predicted = terms[0].coefficient + terms[1].coefficient * std::pow(t, 0.25);
  check_ratio(pi - est.value, est.std_error, std::pow(t, 0.25), predicted, 0.01);
}

TEST_CASE("results are identical for any worker count") {
  for (const char* e : {"stable:0.75", "tempered:0.5,1"}) {
    RunOptions a = run(10000, 9), b = run(10000, 9);
    b.workers = 4;
    const auto x = estimate_spectral(sub(e), unit, 1e-4, a);
    const auto y = estimate_spectral(sub(e), unit, 1e-4, b);
    CHECK(x.value == y.value);
    CHECK(x.std_error == y.std_error);
  }
  RunOptions a = run(10000, 9), b = run(10000, 9);
  b.workers = 3;
  CHECK(estimate_regular(inv("tempered:0.5,1"), unit, 1e-2, a).value ==
        estimate_regular(inv("tempered:0.5,1"), unit, 1e-2, b).value);
}

TEST_CASE("adaptive path counts") {
  const auto spec = sub("stable:0.75");
  const auto f = [&](const RunOptions& r) { return estimate_spectral(spec, unit, 1e-6, r); };
  const auto deficit = [](const Estimate& e) { return 1.0 - e.value; };
  const auto est = estimate_adaptive(f, deficit, run(1000, 10), 0.01, 1 << 20);
  CHECK(est.std_error <= 0.01 * (1.0 - est.value));
  CHECK(est.n_paths > 1000);
  const auto capped = estimate_adaptive(f, deficit, run(1000, 10), 1e-9, 4000);
  CHECK(capped.n_paths == 4000);
  CHECK_THROWS_AS(estimate_adaptive(f, deficit, run(1000, 10), 0.0, 4000), DomainError);
}

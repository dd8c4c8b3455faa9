#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subheat/asymptotics.hpp"
#include "subheat/errors.hpp"
#include "subheat/random_stream.hpp"

using namespace subheat;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);
const Domain unit{Interval{0.0, 1.0}};
const Domain disk{Disk{1.0}};
const double inverse_half = 2.2065253026416745;  // 2 / Gamma(5/4)
}  // namespace

TEST_CASE("stable moments") {
  CHECK(stable_moment(0.75, 0.5) == Approx(1.5114292162468006).epsilon(1e-13));
  CHECK(stable_moment(0.6, 0.0) == 1.0);
  CHECK_THROWS_AS(stable_moment(0.5, 0.5), DomainError);
  CHECK_THROWS_AS(stable_moment(1.2, 0.5), DomainError);
  // For beta = 1/2 the law is 1/(2 Z^2), so E S^g = 2^{-g} E|Z|^{-2g}.
  const double g = 0.3;
  const double direct = std::pow(2.0, -g) * std::pow(2.0, -g) * std::tgamma(0.5 - g) / sqrt_pi;
  CHECK(stable_moment(0.5, g) == Approx(direct).epsilon(1e-13));
}

TEST_CASE("inverse moments") {
  CHECK(inverse_moment(0.5, 1.0) == Approx(2.0 / sqrt_pi).epsilon(1e-14));
  CHECK(inverse_moment(0.5, 0.5) == Approx(0.9777410674469238).epsilon(1e-13));
  CHECK(inverse_moment(0.3, 1e-12) == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(inverse_moment(0.5, 0.0), DomainError);
}

TEST_CASE("running maximum constants") {
  CHECK(running_max_constant(RunningMaxKind::Inverse, 0.5) == Approx(1.1032626513208373).epsilon(1e-13));
  CHECK(running_max_constant(RunningMaxKind::Stable, 0.75) == Approx(1.7054652401523882).epsilon(1e-13));

  // Path check: sup of W over [0, s] has the law of |W_s| = sqrt(2 s) |Z|.
  // The inverse clock has all moments, so 4 standard errors is meaningful.
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream r(3, i);
    const double e1 = std::pow(1.0 / (1.0 / (2.0 * std::pow(r.normal(), 2))), 0.5);
    const double sup = std::sqrt(2.0 * e1) * std::abs(r.normal());
    sum += sup;
    sum2 += sup * sup;
  }
  const double mean = sum / n;
  const double err = std::sqrt((sum2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - running_max_constant(RunningMaxKind::Inverse, 0.5)) <= 4.0 * err);
}

TEST_CASE("stable kernel and perimeter") {
  CHECK(stable_kernel_constant(1, 1.0) == Approx(1.0 / pi).epsilon(1e-14));
  CHECK(stable_kernel_constant(1, 0.5) == Approx(0.19947114020071633).epsilon(1e-13));
  CHECK(stable_interval_perimeter(0.25, 1.0) == Approx(1.5957691216057306).epsilon(1e-13));
  CHECK_THROWS_AS(stable_interval_perimeter(0.5, 1.0), DomainError);
  // Perimeter scales like L^{1 - 2 beta}.
  CHECK(stable_interval_perimeter(0.2, 3.0) ==
        Approx(std::pow(3.0, 0.6) * stable_interval_perimeter(0.2, 1.0)).epsilon(1e-13));
}

TEST_CASE("low-index constants by quadrature") {
  const LaplaceExponent quarter(Stable{0.25});
  const Interval i{0.0, 1.0};
  CHECK(low_index_spectral_constant(quarter, i) == Approx(2.4262380917451).epsilon(1e-10));
  // The regular constant is the nonlocal perimeter of the time-changed process.
  for (double beta : {0.1, 0.25, 0.4}) {
    const LaplaceExponent e(Stable{beta});
    CHECK(low_index_regular_constant(e, i) == Approx(stable_interval_perimeter(beta, 1.0)).epsilon(1e-9));
    CHECK(low_index_regular_constant(e, Interval{2.0, 4.5}) ==
          Approx(stable_interval_perimeter(beta, 2.5)).epsilon(1e-9));
  }
  // Tempering removes int (1 - e^{-theta u}) nu(du) = theta^beta from the
  // range where the Brownian deficit is already 1.
  const double weak = low_index_spectral_constant(LaplaceExponent(TemperedStable{0.25, 1e-8}), i);
  CHECK(weak == Approx(2.4262380917451 - 1e-2).epsilon(1e-7));
  CHECK(low_index_spectral_constant(LaplaceExponent(TemperedStable{0.25, 1.0}), i) < weak);
  // Mixtures add.
  const LaplaceExponent mix(MixedStable{{{0.1, 1.0}, {0.25, 2.0}}});
  CHECK(low_index_spectral_constant(mix, i) ==
        Approx(low_index_spectral_constant(LaplaceExponent(Stable{0.1}), i) + 2.0 * 2.4262380917451).epsilon(1e-9));
  CHECK_THROWS_AS(low_index_spectral_constant(LaplaceExponent(Stable{0.5}), i), DomainError);
}

TEST_CASE("subordinator predictions") {
  const auto high = predict_spectral(LaplaceExponent(Stable{0.75}), unit, TimeChangeKind::Subordinator);
  CHECK(high.theorem_tag == "subordinator/high-index");
  CHECK(high.rate.kind == RateKind::PowerInverseTwiceBeta);
  CHECK(high.rate(1e-6) == Approx(1e-4).epsilon(1e-12));
  CHECK(high.constant == Approx(3.4109304803047764).epsilon(1e-13));

  const auto crit = predict_spectral(LaplaceExponent(Stable{0.5}), unit, TimeChangeKind::Subordinator);
  CHECK(crit.theorem_tag == "subordinator/critical");
  CHECK(crit.rate.kind == RateKind::TLogInverseT);
  CHECK(crit.constant == Approx(4.0 / pi).epsilon(1e-15));
  const auto mixed =
      predict_spectral(LaplaceExponent(MixedStable{{{0.25, 1.0}, {0.5, 1.0}}}), unit, TimeChangeKind::Subordinator);
  CHECK(mixed.constant == Approx(4.0 / pi).epsilon(1e-15));
  const auto weighted =
      predict_spectral(LaplaceExponent(MixedStable{{{0.25, 1.0}, {0.5, 3.0}}}), unit, TimeChangeKind::Subordinator);
  CHECK(weighted.constant == Approx(12.0 / pi).epsilon(1e-15));

  const auto low = predict_spectral(LaplaceExponent(Stable{0.25}), unit, TimeChangeKind::Subordinator);
  CHECK(low.theorem_tag == "subordinator/low-index");
  CHECK(low.rate.kind == RateKind::Linear);
  CHECK(low.constant == Approx(2.4262380917451).epsilon(1e-10));
  CHECK_THROWS_AS(predict_spectral(LaplaceExponent(Stable{0.25}), disk, TimeChangeKind::Subordinator),
                  UnsupportedConfiguration);

  const auto tempered = predict_spectral(LaplaceExponent(TemperedStable{0.75, 2.0}), unit, TimeChangeKind::Subordinator);
  CHECK(tempered.rate.kind == RateKind::PhiInverseSqrt);
  CHECK(tempered.constant == Approx(high.constant).epsilon(1e-15));

  // Constants are proportional to the perimeter.
  const auto high_disk = predict_spectral(LaplaceExponent(Stable{0.75}), disk, TimeChangeKind::Subordinator);
  CHECK(high_disk.constant / high.constant == Approx(pi).epsilon(1e-14));
}

TEST_CASE("regular predictions") {
  CHECK(predict_regular(LaplaceExponent(Stable{0.75}), unit, TimeChangeKind::Subordinator).constant ==
        Approx(1.7054652401523882).epsilon(1e-13));
  const auto low = predict_regular(LaplaceExponent(Stable{0.25}), unit, TimeChangeKind::Subordinator);
  CHECK(low.constant == Approx(1.5957691216057306).epsilon(1e-9));
  CHECK(low.rate.kind == RateKind::Linear);
  const auto inv = predict_regular(LaplaceExponent(Stable{0.5}), unit, TimeChangeKind::InverseSubordinator);
  CHECK(inv.constant == Approx(1.1032626513208373).epsilon(1e-13));
  CHECK(inv.rate.kind == RateKind::PowerHalfBeta);
  CHECK(inv.rate(1e-8) == Approx(1e-2).epsilon(1e-12));
}

TEST_CASE("inverse predictions") {
  const auto p = predict_spectral(LaplaceExponent(Stable{0.5}), unit, TimeChangeKind::InverseSubordinator);
  CHECK(p.theorem_tag == "inverse");
  CHECK(p.constant == Approx(inverse_half).epsilon(1e-14));
  for (double beta : {0.25, 0.75}) {
    const auto q = predict_spectral(LaplaceExponent(Stable{beta}), unit, TimeChangeKind::InverseSubordinator);
    CHECK(q.constant == Approx(2.0 / std::tgamma(0.5 * beta + 1.0)).epsilon(1e-14));
  }
  // Only the index enters the constant.
  const auto t = predict_spectral(LaplaceExponent(TemperedStable{0.5, 1.0}), unit, TimeChangeKind::InverseSubordinator);
  CHECK(t.constant == p.constant);
  CHECK(t.rate.kind == RateKind::PhiSqrt);
  CHECK(t.rate(1e-5) == Approx(1.0 / std::sqrt(std::sqrt(1e5 + 1.0) - 1.0)).epsilon(1e-14));
}

TEST_CASE("rate functions") {
  const LaplaceExponent s(Stable{0.6});
  const RateFunction a{RateKind::PhiInverseSqrt, 0.6, s}, b{RateKind::PowerInverseTwiceBeta, 0.6, std::nullopt};
  const RateFunction c{RateKind::PhiSqrt, 0.6, s}, d{RateKind::PowerHalfBeta, 0.6, std::nullopt};
  for (double t : {1e-10, 1e-4, 0.3}) {
    CHECK(a(t) == Approx(b(t)).epsilon(1e-11));
    CHECK(c(t) == Approx(d(t)).epsilon(1e-13));
  }
  // Slower decay for larger index at small t: t^{2/3} >> t log(1/t) >> t.
  const double t = 1e-8;
  const RateFunction high{RateKind::PowerInverseTwiceBeta, 0.75, std::nullopt};
  const RateFunction crit{RateKind::TLogInverseT, 0.5, std::nullopt};
  const RateFunction low{RateKind::Linear, 0.25, std::nullopt};
  CHECK(high(t) > crit(t));
  CHECK(crit(t) > low(t));
  CHECK(crit.name() == "t*log(1/t)");
  CHECK_THROWS_AS(low(0.0), DomainError);
}

TEST_CASE("expansion under the inverse clock") {
  const auto first = expansion(0.5, {4.0 / sqrt_pi});
  REQUIRE(first.size() == 1);
  CHECK(std::abs(first[0].coefficient - inverse_half) <= 1e-12);
  CHECK(first[0].exponent == 0.25);
  const auto zero = expansion(0.3, {0.0, 0.0});
  CHECK(zero[1].coefficient == 0.0);
  const auto near_one = expansion(1.0 - 1e-9, {1.0, 2.0, 3.0});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(near_one[i].coefficient == Approx(i + 1.0).epsilon(1e-8));
    CHECK(near_one[i].exponent == Approx(0.5 * (i + 1.0)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(expansion(0.5, {}), DomainError);
}

TEST_CASE("rate fitting") {
  const auto pred = predict_spectral(LaplaceExponent(Stable{0.75}), unit, TimeChangeKind::Subordinator);
  const double c = pred.constant;
  auto ladder = [&](std::vector<double> ts, auto value) {
    std::vector<LadderSample> out;
    for (double t : ts) out.push_back({t, value(t), 0.0});
    return out;
  };

  const auto exact = fit_rate(ladder({1e-2, 1e-4, 1e-6}, [&](double t) { return c * pred.rate(t); }), pred, 0.01);
  CHECK(exact.final_deviation <= 1e-15);
  CHECK(exact.extrapolated_deviation <= 1e-13);
  CHECK(exact.pass);

  auto corrected = [&](double t) { return c * pred.rate(t) * (1.0 + std::sqrt(t)); };
  const auto coarse = fit_rate(ladder({1e-1, 5e-2, 2e-2}, corrected), pred, 0.01);
  const auto fine = fit_rate(ladder({1e-5, 5e-6, 2e-6}, corrected), pred, 0.01);
  CHECK(coarse.extrapolated_deviation < 1e-12);
  CHECK(fine.extrapolated_deviation < 1e-12);
  CHECK(fine.final_deviation < coarse.final_deviation);
  CHECK_FALSE(coarse.pass);
  CHECK(fine.pass);

  const auto doubled = fit_rate(ladder({1e-2, 1e-4, 1e-6}, [&](double t) { return 2.0 * c * pred.rate(t); }), pred, 0.1);
  CHECK_FALSE(doubled.pass);

  // The statistical allowance: a wide error bar can rescue a point.
  auto noisy = ladder({1e-2, 1e-4, 1e-6}, [&](double t) { return 1.2 * c * pred.rate(t); });
  CHECK_FALSE(fit_rate(noisy, pred, 0.1).pass);
  noisy.back().std_error = 0.06 * c * pred.rate(1e-6);
  CHECK(fit_rate(noisy, pred, 0.1).pass);

  CHECK_THROWS_AS(fit_rate(ladder({1e-2, 1e-4}, corrected), pred, 0.1), DomainError);
  CHECK_THROWS_AS(fit_rate(ladder({1e-2, 1e-4, 1e-3}, corrected), pred, 0.1), DomainError);
}

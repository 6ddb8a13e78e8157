#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rrs/coupling.hpp"
#include "rrs/errors.hpp"
#include "rrs/math.hpp"

using namespace rrs;

TEST_CASE("uniform component of Exp(1) on (0,1)") {
  const ScalarFn density = [](double x) {
    return x < 0.0 ? 0.0 : std::exp(-x);
  };
  const UniformComponent comp = uniform_component(density, 0.0, 1.0);
  CHECK(comp.alpha == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(comp.eps == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));

  // Mixture reconstruction on a fine grid.
  for (int i = 0; i < 10000; ++i) {
    const double x = 5.0 * (i + 0.5) / 10000.0;
    const double ind = (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    const double rebuilt =
        comp.eps / comp.b * ind + (1.0 - comp.eps) * comp.residual(x);
    REQUIRE(rebuilt == doctest::Approx(density(x)).epsilon(1e-12));
    REQUIRE(comp.residual(x) >= 0.0);
  }
}

TEST_CASE("already-uniform density gives eps = 1") {
  const ScalarFn unit = [](double x) {
    return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
  };
  const UniformComponent comp = uniform_component(unit, 0.0, 1.0);
  CHECK(comp.eps == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(comp.residual(0.5) == 0.0);
}

TEST_CASE("degenerate component is rejected") {
  const ScalarFn vanishing = [](double x) { return std::max(0.0, x - 2.0); };
  CHECK_THROWS_AS(uniform_component(vanishing, 0.0, 1.0), DegenerateComponent);
}

TEST_CASE("coupling delta matches the closed form") {
  // (lambda/2) e^{-lambda b} (1 - e^{-2 lambda A}) * b at lambda=1, A=4, b=1.
  const double expected = 0.5 * std::exp(-1.0) * (1.0 - std::exp(-8.0));
  CHECK(coupling_delta(CouplingFamily::gamma2, 1.0, 4.0, 1.0) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.18387801568367781).epsilon(1e-12));
  CHECK(coupling_delta(CouplingFamily::exponential, 1.0, 4.0, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("residual_draw reproduces the Exp(1) residual law") {
  const ScalarFn density = [](double x) {
    return x < 0.0 ? 0.0 : std::exp(-x);
  };
  const UniformComponent comp = uniform_component(density, 0.0, 1.0);
  const Envelope envelope{
      [](RandomStream& s) { return s.exponential(1.0); }, density,
      1.0};  // (1-eps) h <= f pointwise
  RandomStream stream(31, 0);
  const int n = 100000;
  KahanSum sum;
  for (int i = 0; i < n; ++i) {
    const double y = residual_draw(comp, envelope, stream);
    REQUIRE(comp.residual(y) >= 0.0);
    sum.add(y);
  }
  const double quad_mean = integrate_semi_inf(
      [&](double x) { return x * comp.residual(x); }, 0.0, 1e-10);
  CHECK(sum.total() / n == doctest::Approx(quad_mean).epsilon(0.01));
}

TEST_CASE("coupled simulation: geometric sigma and exact merging") {
  const double A = 4.0, b = 1.0;
  const double delta = coupling_delta(CouplingFamily::gamma2, 1.0, A, b);
  const long runs = 100000;
  std::vector<double> sigmas(runs), v_finals(runs), Ts(runs);
  std::vector<long> counts;
  for (long r = 0; r < runs; ++r) {
    RandomStream stream = make_stream(32, 0, static_cast<std::uint64_t>(r));
    const CouplingRun run =
        coupled_simulation(CouplingFamily::gamma2, 1.0, A, b, stream);
    sigmas[r] = static_cast<double>(run.sigma);
    v_finals[r] = run.v_final;
    Ts[r] = run.T;
    // Construction invariants.
    REQUIRE(run.checkpoints.size() == static_cast<std::size_t>(run.sigma) + 2);
    const auto& last = run.checkpoints.back();
    REQUIRE(last.r == last.r_prime);
    REQUIRE(run.T == doctest::Approx(last.t + last.r));
    for (std::size_t k = 0; k + 1 < run.checkpoints.size(); ++k) {
      const auto& c0 = run.checkpoints[k];
      const auto& c1 = run.checkpoints[k + 1];
      REQUIRE(c1.t == doctest::Approx(c0.t + std::max(c0.r, c0.r_prime) + A));
    }
    if (static_cast<long>(counts.size()) <= run.sigma)
      counts.resize(run.sigma + 1, 0);
    ++counts[run.sigma];
  }

  // Mean sigma = (1-delta)/delta.
  CHECK(mean(sigmas) ==
        doctest::Approx((1.0 - delta) / delta).epsilon(0.05 / 4.44));

  // Chi-square against Geom(delta), tail-merged at expected >= 5.
  double chi2 = 0.0;
  long df = 0;
  double tail_expected = static_cast<double>(runs);
  long tail_observed = runs;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double exp_k =
        runs * delta * std::pow(1.0 - delta, static_cast<double>(k));
    if (tail_expected - exp_k < 5.0) break;
    chi2 += (counts[k] - exp_k) * (counts[k] - exp_k) / exp_k;
    tail_expected -= exp_k;
    tail_observed -= counts[k];
    ++df;
  }
  chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) /
          tail_expected;
  const double p = chi2_sf(chi2, static_cast<double>(df));
  CHECK(p > 0.01);

  // sigma is independent of the shared uniform that merged the copies.
  CHECK(std::abs(pearson_corr(sigmas, v_finals)) < 0.02);

  // Exponential moment: stable across halves at eps = 0.01.
  KahanSum h1, h2;
  for (long r = 0; r < runs / 2; ++r) h1.add(std::exp(0.01 * Ts[r]));
  for (long r = runs / 2; r < runs; ++r) h2.add(std::exp(0.01 * Ts[r]));
  const double m1 = h1.total() / (runs / 2), m2 = h2.total() / (runs / 2);
  CHECK(std::abs(m1 - m2) / m1 < 0.05);
}

TEST_CASE("marginal preservation at the first checkpoint") {
  const Gamma2Oracle oracle = gamma2_oracle(1.0);
  const long runs = 100000;
  std::vector<double> pit_r(runs), pit_rp(runs);
  for (long r = 0; r < runs; ++r) {
    RandomStream stream = make_stream(33, 0, static_cast<std::uint64_t>(r));
    const CouplingRun run =
        coupled_simulation(CouplingFamily::gamma2, 1.0, 4.0, 1.0, stream);
    const auto& c1 = run.checkpoints[1];
    // R(t_1) ~ F_R at the conditional elapsed time s_0 = R'(0) + A = t_1.
    pit_r[r] = oracle.F_R(c1.t, c1.r);
    // The stationary copy is F0 at every checkpoint.
    pit_rp[r] = oracle.F0(c1.r_prime);
  }
  const auto uniform_cdf = [](double u) { return std::min(1.0, std::max(0.0, u)); };
  CHECK(ks_statistic(pit_r, uniform_cdf) < 0.015);
  CHECK(ks_statistic(pit_rp, uniform_cdf) < 0.015);
}

TEST_CASE("exponential family couples too") {
  RandomStream stream(34, 0);
  const CouplingRun run =
      coupled_simulation(CouplingFamily::exponential, 1.0, 1.0, 1.0, stream);
  CHECK(run.T > 0.0);
  CHECK(run.checkpoints.back().r == run.checkpoints.back().r_prime);
}

TEST_CASE("coupling inequality on the grid") {
  std::vector<double> grid;
  for (int t = 1; t <= 10; ++t) grid.push_back(t);
  const auto rows = coupling_inequality_check(CouplingFamily::gamma2, 1.0, 4.0,
                                              1.0, grid, 20000, 35, 1);
  for (const auto& row : rows) {
    CHECK(row.pass);
    CHECK(row.tv_oracle <= row.p_tail + 3.0 * row.p_stderr);
  }
  // Exp family: stationary start makes the TV side identically zero.
  const auto exp_rows = coupling_inequality_check(
      CouplingFamily::exponential, 1.0, 1.0, 1.0, {1.0, 5.0}, 5000, 36, 1);
  for (const auto& row : exp_rows) {
    CHECK(row.tv_oracle == 0.0);
    CHECK(row.pass);
  }
}

TEST_CASE("coupling-time tail is eventually log-linear with negative slope") {
  const long runs = 50000;
  std::vector<double> Ts(runs);
  for (long r = 0; r < runs; ++r) {
    RandomStream stream = make_stream(37, 0, static_cast<std::uint64_t>(r));
    Ts[r] = coupled_simulation(CouplingFamily::gamma2, 1.0, 4.0, 1.0, stream).T;
  }
  std::vector<double> sorted = Ts;
  std::sort(sorted.begin(), sorted.end());
  // Fit log P(T > t) between the median and the 99th percentile.
  const double lo = quantile_sorted(sorted, 0.5), hi = quantile_sorted(sorted, 0.99);
  const auto slope_of = [&](std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
      const double t = lo + (hi - lo) * i / 11.0;
      const double tail =
          static_cast<double>(sample.end() -
                              std::upper_bound(sample.begin(), sample.end(), t)) /
          sample.size();
      xs.push_back(t);
      ys.push_back(std::log(tail));
    }
    return ols_slope(xs, ys);
  };
  const double slope = slope_of(Ts);
  CHECK(slope < 0.0);
  // Stability: replicate halves agree on the slope within 25%.
  const double s1 = slope_of({Ts.begin(), Ts.begin() + runs / 2});
  const double s2 = slope_of({Ts.begin() + runs / 2, Ts.end()});
  CHECK(std::abs(s1 - s2) < 0.25 * std::abs(slope));
}

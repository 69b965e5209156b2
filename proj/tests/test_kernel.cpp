#include <catch2/catch_amalgamated.hpp>

#include "iftem/iftem.hpp"
#include "oracles.hpp"

using namespace iftem;
using Catch::Approx;

TEST_CASE("design_kernel validates arguments") {
  REQUIRE_THROWS_AS(design_kernel(0, true, 1.0), config_error);
  REQUIRE_THROWS_AS(design_kernel(3, true, 0.0), config_error);
  const auto spec = design_kernel(3, false, 2.0);
  REQUIRE(spec.K == 3);
  REQUIRE_FALSE(spec.include_dc);
  REQUIRE(spec.indices() == std::vector<int>{-3, -2, -1, 1, 2, 3});
  REQUIRE(design_kernel(2, true, 1.0).indices() ==
          std::vector<int>{-2, -1, 0, 1, 2});
}

TEST_CASE("kernel Fourier coefficients are the index-set indicator") {
  for (bool dc : {true, false}) {
    const auto spec = design_kernel(3, dc, 1.0);
    for (int k = -2 * spec.K; k <= 2 * spec.K; ++k) {
      const cplx ghat = oracle::fourier_coefficient(
          [&](double t) { return spec.evaluate(t > 0.5 ? t - 1.0 : t); }, k,
          1.0, 256);
      const double want = (std::abs(k) <= spec.K && (k != 0 || dc)) ? 1.0 : 0.0;
      REQUIRE(std::abs(ghat - cplx(want, 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("kernel is supported on one period and peaks at zero") {
  const auto spec = design_kernel(4, true, 1.0);
  REQUIRE(spec.evaluate(0.51) == 0.0);
  REQUIRE(spec.evaluate(-0.5) == 0.0);
  REQUIRE(spec.evaluate(0.0) == Approx(spec.sup_norm()));
  REQUIRE(spec.sup_norm() == 9.0);
  REQUIRE(design_kernel(4, false, 1.0).sup_norm() == 8.0);
  double grid_max = 0.0;
  for (int i = 0; i <= 4000; ++i)
    grid_max = std::max(grid_max, std::abs(spec.evaluate(-0.5 + i * 0.00025)));
  REQUIRE(grid_max <= spec.sup_norm() + 1e-12);
}

TEST_CASE("filter keeps exactly the in-band coefficients") {
  const FriSignal x(BSplinePulse{3, 20.0}, {0.5, -0.45, 0.4}, {0.2, 0.4, 0.8},
                    1.0);
  const auto spec = design_kernel(3, false, 1.0);
  const auto y = filter(x, spec);
  REQUIRE(y.fscs.indices == spec.indices());
  for (int k : spec.indices())
    REQUIRE(std::abs(y.fscs.at(k) - fsc(x, k)) < 1e-15);
  REQUIRE_FALSE(y.fscs.has(0));

  REQUIRE_THROWS_AS(filter(x, design_kernel(3, true, 2.0)), config_error);
}

TEST_CASE("filtered signal evaluates against direct quadrature") {
  const FriSignal x(BSplinePulse{3, 20.0}, {0.5, -0.45}, {0.3, 0.66}, 1.0);
  const auto y = filter(x, design_kernel(2, true, 1.0));
  // y(t) has only the |k| <= 2 coefficients of x.
  for (double t : {0.0, 0.21, 0.5, 0.93}) {
    cplx want(0.0, 0.0);
    for (int k = -2; k <= 2; ++k) {
      want += oracle::fourier_coefficient(
                  [&](double s) { return oracle::stream_value(x, s); }, k,
                  1.0) *
              std::exp(cplx(0.0, k * 2.0 * M_PI * t));
    }
    REQUIRE(y.evaluate(t) == Approx(want.real()).margin(1e-9));
  }
}

TEST_CASE("antiderivative differences equal the integral of y") {
  const FriSignal x(BSplinePulse{3, 20.0}, {0.5, -0.45, 0.4}, {0.2, 0.4, 0.8},
                    1.0);
  const auto y = filter(x, design_kernel(3, true, 1.0));
  for (auto [a, b] : {std::pair{0.1, 0.35}, {0.0, 1.0}, {0.9, 1.3}}) {
    const double direct =
        oracle::integrate([&](double t) { return y.evaluate(t); }, a, b, 128);
    REQUIRE(y.antiderivative(b) - y.antiderivative(a) ==
            Approx(direct).margin(1e-11));
  }
}

TEST_CASE("bound_c: grid mode is tight, analytic mode dominates") {
  const FriSignal x(BSplinePulse{3, 20.0}, {0.5, -0.45, 0.4}, {0.2, 0.4, 0.8},
                    1.0);
  const auto spec = design_kernel(3, true, 1.0);
  const auto y = filter(x, spec);
  const double grid = bound_c(x, spec, BoundMode::grid);
  const double analytic = bound_c(x, spec, BoundMode::analytic);
  // Young's inequality: L a_max |K| ||h||_1.
  REQUIRE(analytic == Approx(3 * 0.5 * 7.0 * 0.05));
  REQUIRE(grid <= analytic);
  double dense = 0.0;
  for (int i = 0; i < 20000; ++i)
    dense = std::max(dense, std::abs(y.evaluate(i / 20000.0)));
  REQUIRE(grid >= dense - 1e-9);
  REQUIRE(grid <= dense + 1e-6);
}

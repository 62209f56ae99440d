#include "censadd/inference.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

using namespace censadd;

namespace {

double
kronrod(const std::function<double(double)>& fn, double a, double b)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, a, b, 15, 1e-14);
}

VariancePieces
uniform_pieces(std::function<double(std::span<const double>)> h)
{
  VariancePieces pieces;
  pieces.h = std::move(h);
  pieces.joint_density = [](std::span<const double> x) {
    return std::abs(x[0]) <= 1.0 && std::abs(x[1]) <= 1.0 ? 0.25 : 0.0;
  };
  pieces.axis_density = [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; };
  return pieces;
}

} // namespace

TEST_SUITE("inference")
{
  TEST_CASE("rates and bandwidths")
  {
    CHECK(convergence_rate(1000, 2) == doctest::Approx(std::pow(1000.0, 0.4)).epsilon(1e-15));
    CHECK(1.0 / convergence_rate(1000, 2) == doctest::Approx(0.0630957).epsilon(1e-6));
    CHECK(undersmoothed_bandwidth(55, 1.0, 2) ==
          doctest::Approx(std::pow(55.0, -0.2) / std::sqrt(std::log(55.0))).epsilon(1e-15));
    for (std::size_t n : { 3u, 10u, 1000u, 100000u }) {
      const double ratio = undersmoothed_bandwidth(n, 0.7, 2) / bandwidth_h2(n, 0.7, 2);
      CHECK(ratio == doctest::Approx(1.0 / std::sqrt(std::log(static_cast<double>(n)))).epsilon(1e-14));
      CHECK(ratio < 1.0);
    }
    CHECK_THROWS_AS(undersmoothed_bandwidth(2, 1.0, 2), std::invalid_argument);
  }

  TEST_CASE("bias oracle")
  {
    const Kernel1D e = Kernel1D::epanechnikov();
    const IntegrationDensity bump = IntegrationDensity::smooth_bump(-1.0, 1.0, 4);
    const IntegrationDensity flat = IntegrationDensity::uniform(-1.0, 1.0);

    const auto zero = bias_oracle(AnalyticFunction::zero(), bump, e, 1.0, 2);
    CHECK(zero(0.3) == 0.0);

    const AnalyticFunction m = AnalyticFunction::half_cos_squared();
    const double inner = kronrod([&](double t) { return m(t) * bump.derivative(t, 2); }, -1.0, 1.0);
    const auto classical = bias_oracle(m, bump, e, 1.0, 2, BiasRoute::classical);
    const auto weak = bias_oracle(m, bump, e, 1.0, 2, BiasRoute::weak);
    const auto doubled = bias_oracle(m, bump, e, 2.0, 2);
    for (double x = -0.9; x <= 0.9; x += 0.3) {
      const double expected = (0.2 / 2.0) * (-std::cos(2.0 * x) - inner);
      CHECK(classical(x) == doctest::Approx(expected).epsilon(1e-10));
      CHECK(weak(x) == doctest::Approx(expected).epsilon(1e-10));
      CHECK(doubled(x) == doctest::Approx(4.0 * classical(x)).epsilon(1e-14));
    }

    // for uniform q the weak route integrates m'' against q
    const auto automatic = bias_oracle(m, flat, e, 1.0, 2);
    const double weak_inner = kronrod([&](double t) { return -std::cos(2.0 * t) * 0.5; }, -1.0, 1.0);
    CHECK(automatic(0.0) == doctest::Approx(0.1 * (-1.0 - weak_inner)).epsilon(1e-12));
    CHECK_THROWS_AS(bias_oracle(m, flat, e, 1.0, 2, BiasRoute::classical), std::logic_error);

    // a quadratic has constant second derivative, which the centring removes
    const auto quad = bias_oracle(AnalyticFunction::quadratic(3.0), flat, e, 1.0, 2);
    CHECK(std::abs(quad(0.4)) < 1e-12);

    CHECK_THROWS_AS(bias_oracle(m, flat, e, 1.0, 4), std::invalid_argument);
    const Kernel1D e4 = make_kernel("epanechnikov", 4);
    const auto fourth = bias_oracle(AnalyticFunction::sine(1.0, 2.0), bump, e4, 1.0, 4);
    const double inner4 = kronrod([&](double t) { return std::sin(2.0 * t) * bump.derivative(t, 4); }, -1.0, 1.0);
    CHECK(fourth(0.2) == doctest::Approx((-1.0 / 21.0) / 24.0 * (16.0 * std::sin(0.4) - inner4)).epsilon(1e-9));
  }

  TEST_CASE("variance formula with known pieces")
  {
    const Kernel1D e = Kernel1D::epanechnikov();
    const std::vector<IntegrationDensity> q(2, IntegrationDensity::uniform(-1.0, 1.0));
    const std::vector<double> grid{ -0.5, 0.0, 0.5 };

    // H = 1: sigma^2 = R(K) / (c f_1) * \int_{-1}^{1} q^2 / (f / f_1) = 0.6 / (0.5 c) * 1
    const SigmaResult one = sigma_plugin(uniform_pieces([](std::span<const double>) { return 1.0; }), q, 0, e, 2.0, grid);
    for (double s : one.sigma) {
      CHECK(s * s == doctest::Approx(0.6).epsilon(1e-12));
    }

    const SigmaResult none = sigma_plugin(uniform_pieces([](std::span<const double>) { return 0.0; }), q, 1, e, 1.0, grid);
    for (double s : none.sigma) {
      CHECK(s == 0.0);
    }

    // scaling q_{-l} by 2 scales the integrand by 4, as does scaling H by 4
    const auto h = [](std::span<const double> x) { return 1.0 + x[0] * x[0] + std::exp(x[1]); };
    const SigmaResult base = sigma_plugin(uniform_pieces(h), q, 0, e, 1.0, grid);
    const SigmaResult four = sigma_plugin(uniform_pieces([&](std::span<const double> x) { return 4.0 * h(x); }), q, 0, e, 1.0, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(four.sigma[j] * four.sigma[j] == doctest::Approx(4.0 * base.sigma[j] * base.sigma[j]).epsilon(1e-13));
      const double x = grid[j];
      const double oracle = 0.6 / 0.5 * kronrod([&](double t) { return (1.0 + x * x + std::exp(t)) * 0.5; }, -1.0, 1.0);
      CHECK(base.sigma[j] * base.sigma[j] == doctest::Approx(oracle).epsilon(1e-10));
    }

    VariancePieces empty = uniform_pieces(h);
    empty.axis_density = [](double) { return 0.0; };
    CHECK_THROWS_AS(sigma_plugin(empty, q, 0, e, 1.0, grid), std::domain_error);

    VariancePieces thin = uniform_pieces(h);
    thin.joint_density = [](std::span<const double> x) { return x[1] > 0.5 ? 0.0 : 0.25; };
    const SigmaResult floored = sigma_plugin(thin, q, 0, e, 1.0, grid);
    CHECK(floored.floored_nodes > 0);
    CHECK_FALSE(floored.warnings.empty());
  }

  TEST_CASE("plug-in variance needs squared responses")
  {
    const CensoredSample s({ 0.2, 0.5, 0.7 }, { 1, 1, 0 }, { 0.0, 0.1, 0.5, -0.2, -0.4, 0.3 }, 2);
    const ProductKernel pk = ProductKernel::replicate(Kernel1D::epanechnikov(), 2);
    const DensityModel f = fit_kde(s.covariates(), 2, pk, 1.0);
    const DensityModel f1 = marginal_kde(s.column(0), Kernel1D::epanechnikov(), 1.0);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(f),
                                            pk.factors(), { 0.8, 0.8 }, PsiSpec::indicator(0.6));
    const std::vector<IntegrationDensity> q(2, IntegrationDensity::uniform(-1.0, 1.0));
    const std::vector<double> grid{ 0.0 };
    CHECK_THROWS_AS(sigma_plugin(m, q, 0, Kernel1D::epanechnikov(), 1.0, f, f1, grid), std::invalid_argument);
    const SigmaResult r = sigma_plugin(h_plugin(m), q, 0, Kernel1D::epanechnikov(), 1.0, f, f1, grid);
    CHECK(r.sigma[0] > 0.0);
  }

  TEST_CASE("normal intervals")
  {
    const std::vector<double> eta{ 0.5, -0.25, 0.0 };
    const std::vector<double> sigma{ 1.2, 0.0, 3.0 };
    const ConfidenceBand band = normal_ci(eta, sigma, 1000, 2);
    CHECK(band.hi[0] - 0.5 == doctest::Approx(0.14838).epsilon(1e-4));
    CHECK(band.lo[1] == -0.25);
    CHECK(band.hi[1] == -0.25);
    CHECK(band.warnings.empty());
    CHECK_FALSE(normal_ci(eta, sigma, 1000, 2, 1.96, false).warnings.empty());

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int r = 0; r < 1000; ++r) {
      const double e = unif(rng);
      const double s = std::abs(unif(rng));
      const std::vector<double> ev{ e };
      const std::vector<double> sv{ s };
      const ConfidenceBand b = normal_ci(ev, sv, 500, 2);
      // both ends use the same half-width; the subtraction can round by an ulp
      const double ulp = std::numeric_limits<double>::epsilon() * std::max(std::abs(e), std::abs(b.hi[0]));
      CHECK(std::abs((b.hi[0] - e) - (e - b.lo[0])) <= 2.0 * ulp);
      const ConfidenceBand big = normal_ci(ev, sv, 4000, 2);
      CHECK((big.hi[0] - big.lo[0]) ==
            doctest::Approx((b.hi[0] - b.lo[0]) * std::pow(500.0 / 4000.0, 0.4)).epsilon(1e-9));
    }
  }

  TEST_CASE("standardized statistic")
  {
    CHECK(standardized_stat(0.3, 0.3, 0.0, 1.0, 100, 2) == 0.0);
    const std::size_t n = 2000;
    const double sigma = 1.7;
    const double eta_hat = 0.42;
    const double base = standardized_stat(eta_hat, 0.4, 0.1, sigma, n, 2);
    CHECK(standardized_stat(eta_hat + sigma / convergence_rate(n, 2), 0.4, 0.1, sigma, n, 2) ==
          doctest::Approx(base + 1.0).epsilon(1e-12));
    for (double lambda : { 0.1, 3.0, 17.0 }) {
      CHECK(standardized_stat(0.4 + lambda * (eta_hat - 0.4), 0.4, lambda * 0.1, lambda * sigma, n, 2) ==
            doctest::Approx(base).epsilon(1e-12));
    }
    CHECK_THROWS_AS(standardized_stat(0.1, 0.0, 0.0, 0.0, n, 2), std::domain_error);
  }

  TEST_CASE("mean squared error expansion")
  {
    CHECK(mse_expansion(0.0, 1.0) == 1.0);
    CHECK(mse_expansion(0.3, 0.4) == doctest::Approx(0.25).epsilon(1e-15));
  }
}

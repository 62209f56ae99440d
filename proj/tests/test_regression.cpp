#include "censadd/regression.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace censadd;

namespace {

struct Data
{
  std::vector<double> z;
  std::vector<std::uint8_t> delta;
  std::vector<double> x;
};

Data
censored_data(std::size_t n, std::size_t d, unsigned seed, double censor_probability)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  std::bernoulli_distribution censored(censor_probability);
  Data data;
  for (std::size_t i = 0; i < n; ++i) {
    data.z.push_back(time(rng));
    data.delta.push_back(censored(rng) ? 0 : 1);
    for (std::size_t a = 0; a < d; ++a) {
      data.x.push_back(unif(rng));
    }
  }
  return data;
}

DensityModel
kde(const CensoredSample& s, double h)
{
  return fit_kde(s.covariates(), s.dim(), ProductKernel::replicate(Kernel1D::epanechnikov(), s.dim()), h);
}

} // namespace

TEST_SUITE("regression")
{
  TEST_CASE("bandwidth rule")
  {
    CHECK(bandwidth_h2(1000, 0.2 * std::pow(1000.0, 0.2), 2) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(bandwidth_h2(1, 0.7, 2) == 0.7);
    CHECK(bandwidth_h2(32, 1.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(bandwidth_h2(10, -1.0, 2), std::invalid_argument);
  }

  TEST_CASE("two-term hand value")
  {
    const CensoredSample s({ 0.3, 0.6 }, { 1, 1 }, { 0.0, 0.05 }, 1);
    const auto f = [](std::span<const double> x) { return std::abs(x[0]) <= 1.0 ? 0.5 : 0.0; };
    const RegressionSurface m = fit_surface(s,
                                            CensoringSource::kaplan_meier(),
                                            CovariateDensitySource::analytic(f),
                                            { Kernel1D::epanechnikov() },
                                            { 0.1 },
                                            PsiSpec::identity_truncated(1.0));
    // K(0)/h * 0.3 + K(-0.5)/h * 0.6, divided by n f = 1
    const double expected = (0.75 / 0.1) * 0.3 + (0.75 * 0.75 / 0.1) * 0.6;
    const double x0[] = { 0.0 };
    CHECK(eval_surface(m, x0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(5.625).epsilon(1e-15));
    const double outside[] = { 0.5 };
    CHECK(m(outside) == 0.0);
  }

  TEST_CASE("zero psi gives a zero surface")
  {
    const Data data = censored_data(50, 2, 4, 0.3);
    const CensoredSample s(data.z, data.delta, data.x, 2);
    const PsiSpec zero = PsiSpec::custom([](double) { return 0.0; }, 0.0, 1.0);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(kde(s, 0.5)),
                                            { Kernel1D::epanechnikov(), Kernel1D::epanechnikov() }, { 0.4, 0.4 }, zero);
    for (double a = -1.0; a <= 1.0; a += 0.25) {
      const double x[] = { a, -a };
      CHECK(m(x) == 0.0);
    }
  }

  TEST_CASE("pruned evaluation equals a naive double loop")
  {
    for (std::size_t d : { 1u, 2u }) {
      for (std::size_t n = 1; n <= 5; ++n) {
        const Data data = censored_data(n, d, static_cast<unsigned>(10 * n + d), 0.3);
        const CensoredSample s(data.z, data.delta, data.x, d);
        const DensityModel f = kde(s, 0.8);
        const std::vector<Kernel1D> kernels(d, Kernel1D::epanechnikov());
        const std::vector<double> h(d, 0.6);
        const PsiSpec psi = PsiSpec::identity_truncated(0.9);
        const RegressionSurface m =
          fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(f), kernels, h, psi);
        const StepSurvival g = fit_censoring_survival(s);
        for (double a = -1.2; a <= 1.2; a += 0.3) {
          std::vector<double> x(d, a);
          if (d == 2) {
            x[1] = -0.5 * a;
          }
          double naive = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (!s.delta(i) || psi(s.z(i)) == 0.0) {
              continue;
            }
            double w = 1.0;
            for (std::size_t l = 0; l < d; ++l) {
              w *= Kernel1D::epanechnikov()((x[l] - s.x(i, l)) / 0.6) / 0.6;
            }
            naive += w / (static_cast<double>(n) * f.floored(s.x(i))) * psi(s.z(i)) / g(s.z(i));
          }
          CHECK(m(x) == doctest::Approx(naive).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("linearity in psi")
  {
    const Data data = censored_data(120, 2, 21, 0.4);
    const CensoredSample s(data.z, data.delta, data.x, 2);
    const DensityModel f = kde(s, 0.5);
    const std::vector<Kernel1D> kernels(2, Kernel1D::epanechnikov());
    const std::vector<double> h{ 0.35, 0.35 };
    const PsiSpec p1 = PsiSpec::indicator(0.8);
    const PsiSpec p2 = PsiSpec::identity_truncated(0.8);
    const PsiSpec combo = PsiSpec::custom([&](double y) { return 2.0 * p1(y) - 3.0 * p2(y); }, 5.0, 0.8);
    auto fit = [&](const PsiSpec& psi) {
      return fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(f), kernels, h, psi);
    };
    const RegressionSurface m1 = fit(p1);
    const RegressionSurface m2 = fit(p2);
    const RegressionSurface mc = fit(combo);
    const RegressionSurface doubled = fit(p1.scaled(2.0));
    for (double a = -0.9; a <= 0.9; a += 0.15) {
      const double x[] = { a, 0.3 - a / 2 };
      CHECK(mc(x) == doctest::Approx(2.0 * m1(x) - 3.0 * m2(x)).epsilon(1e-12));
      CHECK(doubled(x) == 2.0 * m1(x));
    }
  }

  TEST_CASE("bounded by the synthetic maximum times the weight sum")
  {
    const Data data = censored_data(200, 2, 8, 0.5);
    const CensoredSample s(data.z, data.delta, data.x, 2);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(kde(s, 0.3)),
                                            std::vector<Kernel1D>(2, Kernel1D::epanechnikov()), { 0.25, 0.25 },
                                            PsiSpec::indicator(0.7));
    for (double a = -1.0; a <= 1.0; a += 0.2) {
      const double x[] = { a, a * a - 0.5 };
      double weights = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        weights += std::abs(m.weight(i, x));
      }
      CHECK(std::abs(m(x)) <= m.diagnostics().max_synthetic * weights * (1.0 + 1e-12));
    }
  }

  TEST_CASE("fully censored sample is a warning")
  {
    const CensoredSample s({ 0.2, 0.5, 0.9 }, { 0, 0, 0 }, { 0.0, 0.5, -0.5 }, 1);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(kde(s, 0.5)),
                                            { Kernel1D::epanechnikov() }, { 0.5 }, PsiSpec::indicator(0.6));
    CHECK(m.diagnostics().fully_censored);
    CHECK_FALSE(m.diagnostics().warnings.empty());
    const double x[] = { 0.0 };
    CHECK(m(x) == 0.0);
  }

  TEST_CASE("diagnostics")
  {
    const CensoredSample s({ 0.2, 0.5, 0.9 }, { 1, 0, 1 }, { 0.0, 0.5, 3.0 }, 1);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(kde(s, 0.5)),
                                            { Kernel1D::epanechnikov() }, { 0.5 }, PsiSpec::indicator(2.0));
    const FitDiagnostics& diag = m.diagnostics();
    CHECK(diag.uncensored_fraction == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(diag.tau0_below_max_time);
    CHECK(diag.floored_density_count == 0);
    // G(0.9) = 1/2 after the censored 0.5 with two at risk
    CHECK(diag.max_synthetic == 2.0);
  }

  TEST_CASE("squared responses")
  {
    const Data data = censored_data(60, 1, 5, 0.3);
    const CensoredSample s(data.z, data.delta, data.x, 1);
    const PsiSpec psi = PsiSpec::identity_truncated(0.8);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::kde(kde(s, 0.4)),
                                            { Kernel1D::epanechnikov() }, { 0.3 }, psi);
    const RegressionSurface h = m.with_response_power(2);
    CHECK(h.response_power() == 2);
    const StepSurvival g = fit_censoring_survival(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double expected = s.delta(i) ? psi(s.z(i)) * psi(s.z(i)) / (g(s.z(i)) * g(s.z(i))) : 0.0;
      CHECK(h.synthetic()[i] == doctest::Approx(expected).epsilon(1e-15));
    }
  }

  TEST_CASE("validation")
  {
    const CensoredSample s({ 0.2, 0.5 }, { 1, 1 }, { 0.0, 0.5, 0.1, 0.2 }, 2);
    const auto f = [](std::span<const double>) { return 1.0; };
    CHECK_THROWS_AS(fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::analytic(f),
                                { Kernel1D::epanechnikov() }, { 0.5 }, PsiSpec::indicator(1.0)),
                    std::invalid_argument);
    const RegressionSurface m = fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::analytic(f),
                                            std::vector<Kernel1D>(2, Kernel1D::epanechnikov()), { 0.5, 0.5 },
                                            PsiSpec::indicator(1.0));
    const double wrong[] = { 0.0 };
    CHECK_THROWS_AS(m(wrong), std::invalid_argument);
    const auto zero_density = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS_AS(fit_surface(s, CensoringSource::kaplan_meier(), CovariateDensitySource::analytic(zero_density),
                                std::vector<Kernel1D>(2, Kernel1D::epanechnikov()), { 0.5, 0.5 },
                                PsiSpec::indicator(1.0)),
                    std::domain_error);
  }
}

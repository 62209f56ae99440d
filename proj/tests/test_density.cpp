#include "censadd/density.hpp"
#include "censadd/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace censadd;

namespace {

std::vector<double>
uniform_rows(std::size_t n, std::size_t d, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> rows(n * d);
  for (double& v : rows) {
    v = unif(rng);
  }
  return rows;
}

double
naive_kde(const std::vector<double>& rows, std::size_t d, const Kernel1D& k, double h, std::span<const double> x)
{
  const std::size_t n = rows.size() / d;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      w *= k((x[a] - rows[j * d + a]) / h);
    }
    sum += w;
  }
  return sum / (static_cast<double>(n) * std::pow(h, static_cast<double>(d)));
}

} // namespace

TEST_SUITE("density")
{
  TEST_CASE("bandwidth rule")
  {
    CHECK(bandwidth_h1(7, 1.0, 6, 2) == doctest::Approx(std::pow(std::log(7.0) / 7.0, 1.0 / 14.0)).epsilon(1e-15));
    CHECK(bandwidth_h1(500, 2.0, 6, 2) == 2.0 * bandwidth_h1(500, 1.0, 6, 2));
    CHECK(bandwidth_h1(100, 1.0, 2, 1) > bandwidth_h1(1000, 1.0, 2, 1));
    CHECK(bandwidth_h1(1000, 1.0, 2, 1) > bandwidth_h1(10000, 1.0, 2, 1));
    CHECK_THROWS_AS(bandwidth_h1(1, 1.0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(bandwidth_h1(10, 0.0, 2, 1), std::invalid_argument);
  }

  TEST_CASE("hand examples")
  {
    const Kernel1D e = Kernel1D::epanechnikov();
    const std::vector<double> one{ 0.3 };
    const DensityModel single = marginal_kde(one, e, 0.5);
    const double at[] = { 0.3 };
    CHECK(single(at) == 1.5);

    const std::vector<double> two{ 0.0, 1.0 };
    const DensityModel pair = fit_kde(two, 1, ProductKernel::replicate(e, 1), 1.0);
    const double zero[] = { 0.0 };
    CHECK(pair(zero) == 0.375);
    const double far[] = { 10.0 };
    CHECK(pair(far) == 0.0);
  }

  TEST_CASE("floor")
  {
    const Kernel1D e = Kernel1D::epanechnikov();
    const std::vector<double> two{ 0.0, 1.0 };
    const DensityModel floored = fit_kde(two, 1, ProductKernel::replicate(e, 1), 1.0, 1e-12);
    const double far[] = { 10.0 };
    CHECK(floored_eval(floored, far) == 1e-12);
    CHECK(floored.floored_count() == 1);
    const double x[] = { 0.5 };
    CHECK(floored_eval(floored, x) == floored(x));
    CHECK(floored.floored_count() == 1);
    floored.reset_floored_count();
    CHECK(floored.floored_count() == 0);
    const DensityModel raw = fit_kde(two, 1, ProductKernel::replicate(e, 1), 1.0, 0.0);
    CHECK(floored_eval(raw, far) == 0.0);
  }

  TEST_CASE("pruned evaluation equals the naive sum")
  {
    for (std::size_t d : { 1u, 2u, 3u }) {
      const auto rows = uniform_rows(150, d, 7 + static_cast<unsigned>(d));
      const Kernel1D k = make_kernel("epanechnikov", 4);
      const DensityModel model = fit_kde(rows, d, ProductKernel::replicate(k, d), 0.35);
      const auto probes = uniform_rows(40, d, 99);
      for (std::size_t p = 0; p < 40; ++p) {
        const std::span<const double> x(probes.data() + p * d, d);
        CHECK(model(x) == doctest::Approx(naive_kde(rows, d, k, 0.35, x)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("integrates to one over the inflated hull")
  {
    const auto rows = uniform_rows(60, 2, 5);
    const double h = 0.3;
    const DensityModel model = fit_kde(rows, 2, ProductKernel::replicate(Kernel1D::epanechnikov(), 2), h);
    const std::vector<QuadAxis> axes{ { { -1.0 - h, 1.0 + h }, 32, 16 }, { { -1.0 - h, 1.0 + h }, 32, 16 } };
    CHECK(std::abs(quad_integrate([&](std::span<const double> x) { return model(x); }, axes) - 1.0) < 1e-3);
  }

  TEST_CASE("non-negative kernels give non-negative estimates")
  {
    const auto rows = uniform_rows(40, 2, 13);
    const DensityModel model = fit_kde(rows, 2, ProductKernel::replicate(Kernel1D::uniform(), 2), 0.2, 0.0);
    const auto probes = uniform_rows(500, 2, 14);
    for (std::size_t p = 0; p < 500; ++p) {
      CHECK(model(std::span<const double>(probes.data() + 2 * p, 2)) >= 0.0);
    }
  }

  TEST_CASE("higher-order estimates may be negative and are used raw")
  {
    const std::vector<double> rows{ 0.0 };
    const DensityModel model = marginal_kde(rows, make_kernel("epanechnikov", 4), 1.0);
    const double x[] = { 0.9 };
    CHECK(model(x) < 0.0);
    CHECK(model.floored(x) == 1e-12);
  }

  TEST_CASE("scaling equivariance")
  {
    const auto rows = uniform_rows(80, 2, 17);
    const double s = 3.0;
    std::vector<double> scaled = rows;
    for (double& v : scaled) {
      v *= s;
    }
    const ProductKernel k = ProductKernel::replicate(Kernel1D::epanechnikov(), 2);
    const DensityModel a = fit_kde(rows, 2, k, 0.4);
    const DensityModel b = fit_kde(scaled, 2, k, 0.4 * s);
    const double x[] = { 0.1, -0.2 };
    const double xs[] = { 0.1 * s, -0.2 * s };
    CHECK(b(xs) == doctest::Approx(a(x) / (s * s)).epsilon(1e-12));
  }

  TEST_CASE("validation")
  {
    const std::vector<double> rows{ 0.0, 1.0 };
    const ProductKernel k2 = ProductKernel::replicate(Kernel1D::epanechnikov(), 2);
    CHECK_THROWS_AS(fit_kde(rows, 1, k2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_kde(rows, 1, ProductKernel::replicate(Kernel1D::epanechnikov(), 1), 0.0),
                    std::invalid_argument);
  }
}

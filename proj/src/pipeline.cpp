#include "censadd/pipeline.hpp"

#include "censadd/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace censadd {

Kernel1D
build_kernel(const KernelSpec& spec)
{
  return make_kernel(spec.family, spec.order);
}

int
default_density_order(int k, std::size_t d)
{
  const int kd = k * static_cast<int>(d);
  return kd % 2 == 0 ? kd + 2 : kd + 1;
}

FitResult
fit_additive_model(const CensoredSample& sample, const FitSettings& settings, std::size_t threads)
{
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  FitResult result;
  FitMetadata& meta = result.metadata;
  meta.n = n;
  meta.d = d;

  const Kernel1D kernel = build_kernel(settings.regression_kernel);
  const int k = kernel.order();
  double h = 0.0;
  if (settings.regression_h) {
    h = *settings.regression_h;
    if (!(h > 0.0)) {
      throw std::invalid_argument("regression bandwidth must be positive");
    }
  } else if (settings.undersmooth) {
    h = undersmoothed_bandwidth(n, settings.regression_c, k);
  } else {
    h = bandwidth_h2(n, settings.regression_c, k);
  }
  meta.undersmoothed = settings.undersmooth;
  meta.k = k;
  meta.c = h * std::pow(static_cast<double>(n), 1.0 / (2.0 * k + 1.0));
  meta.z = settings.z;
  meta.bandwidths.assign(d, h);
  meta.regression_kernel = to_string(kernel.family()) + ":" + std::to_string(k);

  const KernelSpec density_spec =
    settings.density_kernel.value_or(KernelSpec{ "epanechnikov", default_density_order(k, d) });
  const Kernel1D density_kernel = build_kernel(density_spec);
  const int k_prime = density_kernel.order();
  double h1 = 0.0;
  if (settings.density_h) {
    h1 = *settings.density_h;
    if (!(h1 > 0.0)) {
      throw std::invalid_argument("density bandwidth must be positive");
    }
  } else {
    h1 = bandwidth_h1(n, settings.density_c_prime, k_prime, d);
  }
  meta.k_prime = k_prime;
  meta.density_bandwidth = h1;
  meta.density_kernel = to_string(density_kernel.family()) + ":" + std::to_string(k_prime);

  const ProductKernel product = ProductKernel::replicate(density_kernel, d);
  DensityModel f_hat = fit_kde(sample.covariates(), d, product, h1, settings.density_floor);
  const RegressionSurface surface = fit_surface(sample,
                                                settings.censoring_survival
                                                  ? CensoringSource::analytic(*settings.censoring_survival)
                                                  : CensoringSource::kaplan_meier(),
                                                settings.covariate_density
                                                  ? CovariateDensitySource::analytic(*settings.covariate_density)
                                                  : CovariateDensitySource::kde(f_hat),
                                                std::vector<Kernel1D>(d, kernel),
                                                meta.bandwidths,
                                                settings.psi);
  result.diagnostics = surface.diagnostics();
  result.kaplan_meier = surface.kaplan_meier();
  result.warnings = result.diagnostics.warnings;

  std::vector<IntegrationDensity> q = settings.q;
  if (q.empty()) {
    for (std::size_t a = 0; a < d; ++a) {
      const auto column = sample.column(a);
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      if (!(*hi > *lo)) {
        throw std::invalid_argument("covariate x" + std::to_string(a + 1) +
                                    " is constant; supply q explicitly");
      }
      q.push_back(IntegrationDensity::uniform(*lo, *hi));
    }
  }
  if (q.size() != d) {
    throw std::invalid_argument("need one integration density per covariate (got " +
                                std::to_string(q.size()) + " for d = " + std::to_string(d) + ")");
  }
  for (const auto& density : q) {
    meta.q.push_back(density.name() + "[" + std::to_string(density.support().lo) + ", " +
                     std::to_string(density.support().hi) + "]");
  }
  meta.integration = to_string(settings.quadrature.method);

  EvaluationDomain domain;
  if (settings.grids) {
    if (settings.grids->size() != d) {
      throw std::invalid_argument("need one evaluation grid per covariate");
    }
    domain = EvaluationDomain::from_grids(*settings.grids);
  } else {
    domain = EvaluationDomain::centered(q, settings.grid_points, settings.grid_fraction);
  }

  if (k_prime <= k * static_cast<int>(d)) {
    result.warnings.push_back("density kernel order k' = " + std::to_string(k_prime) +
                              " does not exceed k d = " + std::to_string(k * static_cast<int>(d)) +
                              "; the limit theory assumes k' > k d");
  }
  for (std::size_t a = 0; a < d; ++a) {
    if (q[a].continuous_derivatives() < k + 1) {
      result.warnings.push_back("q" + std::to_string(a + 1) + " (" + q[a].name() + ") has " +
                                std::to_string(q[a].continuous_derivatives()) +
                                " continuous derivatives; the limit theory assumes k + 1 = " +
                                std::to_string(k + 1));
    }
  }
  result.notes.emplace_back(
    "the bandwidth condition n^{2p-1} |log h| / h -> infinity on the censoring tail is not checked");

  const MarginalIntegrator integrator(surface, q, settings.quadrature);
  result.fit.constant = integrator.constant();

  std::optional<RegressionSurface> h_surface;
  if (settings.compute_sigma) {
    h_surface.emplace(h_plugin(surface));
  }
  bool warned_bias = false;
  for (std::size_t a = 0; a < d; ++a) {
    ComponentBand band;
    band.axis = a;
    band.grid = domain.grids[a];
    band.eta_hat = marginal_component(integrator, a, band.grid, threads);
    if (h_surface) {
      const DensityModel f_axis =
        marginal_kde(sample.column(a), density_kernel, h1, settings.density_floor);
      SigmaResult sigma = sigma_plugin(
        *h_surface, q, a, kernel, meta.c, f_hat, f_axis, band.grid, settings.sigma_quadrature, threads);
      for (auto& w : sigma.warnings) {
        result.warnings.push_back(std::move(w));
      }
      band.sigma_hat = std::move(sigma.sigma);
      ConfidenceBand ci = normal_ci(band.eta_hat, band.sigma_hat, n, k, settings.z, meta.undersmoothed);
      if (!ci.warnings.empty() && !warned_bias) {
        result.warnings.insert(result.warnings.end(), ci.warnings.begin(), ci.warnings.end());
        warned_bias = true;
      }
      band.ci_lo = std::move(ci.lo);
      band.ci_hi = std::move(ci.hi);
    }
    result.fit.components.push_back(std::move(band));
  }
  return result;
}

} // namespace censadd

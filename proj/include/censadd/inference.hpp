#pragma once

#include "censadd/additive.hpp"
#include "censadd/analytic.hpp"
#include "censadd/density.hpp"
#include "censadd/kernels.hpp"
#include "censadd/regression.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace censadd {

//! n^{k/(2k+1)}
double convergence_rate(std::size_t n, int k);

enum class BiasRoute
{
  //! classical q^{(k)} when available, otherwise the weak route
  automatic,
  //! \int m q^{(k)} with the analytic derivative of q
  classical,
  //! (-1)^k \int m^{(k)} q, valid by integration by parts
  weak
};

//! x -> (c^k / k!) mu_k(K) ((-1)^k m^{(k)}(x) - \int m q^{(k)}).
//! The inner integral is computed once. Throws std::invalid_argument when k
//! differs from the kernel order and std::logic_error when the requested
//! route needs a derivative of q that is not available.
std::function<double(double)> bias_oracle(const AnalyticFunction& m,
                                          const IntegrationDensity& q,
                                          const Kernel1D& kernel,
                                          double c,
                                          int k,
                                          BiasRoute route = BiasRoute::automatic);

//! Estimate of H(x) = E[psi^2(Y) / G(Y) | X = x]: the same weights applied to
//! delta psi^2(Z) / G^2(Z).
RegressionSurface h_plugin(const RegressionSurface& surface);

//! Functions entering the variance formula.
struct VariancePieces
{
  MultivariateFunction h;                   //!< H(x)
  MultivariateFunction joint_density;       //!< f(x)
  std::function<double(double)> axis_density; //!< f_l(x_l)
  double floor = 1e-12;
};

struct SigmaResult
{
  std::vector<double> sigma;
  //! quadrature nodes where the conditional density was floored
  std::size_t floored_nodes = 0;
  std::size_t total_nodes = 0;
  std::vector<std::string> warnings;
};

//! sigma_l(x_l) = sqrt( R(K_l) / (c f_l(x_l))
//!                      \int H(x) q_{-l}^2(x_{-l}) / f(x_{-l} | x_l) dx_{-l} )
//! with f(x_{-l} | x_l) = f(x) / f_l(x_l), at every grid point. `q` holds
//! one density per axis; the (d-1)-dimensional integral uses
//! options.nodes x options.panels Gauss-Legendre nodes per axis, or
//! options.mc_draws draws from q_{-l} above options.max_tensor_dim
//! dimensions. Throws std::domain_error when f_l(x_l) <= floor at a grid
//! point.
SigmaResult sigma_plugin(const VariancePieces& pieces,
                         std::span<const IntegrationDensity> q,
                         std::size_t axis,
                         const Kernel1D& kernel,
                         double c,
                         std::span<const double> grid,
                         const QuadratureOptions& options = {},
                         std::size_t threads = 1);

//! Plug-in version: H from h_plugin(surface), f and f_l from kernel density
//! estimates. `h_surface` must have response power 2.
SigmaResult sigma_plugin(const RegressionSurface& h_surface,
                         std::span<const IntegrationDensity> q,
                         std::size_t axis,
                         const Kernel1D& kernel,
                         double c,
                         const DensityModel& f_hat,
                         const DensityModel& f_axis_hat,
                         std::span<const double> grid,
                         const QuadratureOptions& options = {},
                         std::size_t threads = 1);

//! c n^{-1/(2k+1)} (log n)^{-1/2}. Throws std::invalid_argument for n < 3.
double undersmoothed_bandwidth(std::size_t n, double c, int k);

struct ConfidenceBand
{
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::string> warnings;
};

//! eta_hat -/+ z sigma_hat n^{-k/(2k+1)}. A fit that was not undersmoothed
//! still gets intervals, with a warning that they are biased.
ConfidenceBand normal_ci(std::span<const double> eta_hat,
                         std::span<const double> sigma_hat,
                         std::size_t n,
                         int k,
                         double z = 1.96,
                         bool undersmoothed = true);

//! (n^{k/(2k+1)} (eta_hat - eta) - b) / sigma. Throws std::domain_error when
//! sigma <= 0.
double standardized_stat(double eta_hat, double eta_true, double b, double sigma, std::size_t n, int k);

//! b^2 + sigma^2
double mse_expansion(double b, double sigma);

} // namespace censadd

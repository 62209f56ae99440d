#pragma once

#include "censadd/analytic.hpp"
#include "censadd/quadrature.hpp"
#include "censadd/random.hpp"
#include "censadd/regression.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace censadd {

//! Known univariate density q_l used to integrate out the other covariates.
class IntegrationDensity
{
public:
  //! 1/(b-a) on [a, b]. Its derivatives exist only in the weak sense.
  static IntegrationDensity uniform(double a, double b);
  //! Normalised (1 - t^2)^power with t mapping [a, b] onto [-1, 1]; it has
  //! power - 1 continuous derivatives on the real line.
  static IntegrationDensity smooth_bump(double a, double b, int power);

  double operator()(double x) const;

  const std::string& name() const { return name_; }
  Interval support() const { return support_; }
  double max_value() const { return max_value_; }

  //! Number of continuous derivatives on R (0 for the uniform density).
  int continuous_derivatives() const { return continuous_derivatives_; }
  bool has_derivative() const { return static_cast<bool>(derivative_); }
  //! q^{(k)}(x) for k >= 1; throws std::logic_error when unavailable.
  double derivative(double x, int k) const;
  //! Whether \int m q^{(k)} may be computed as (-1)^k \int m^{(k)} q.
  bool weak_derivatives() const { return weak_derivatives_; }

  //! Draw by rejection from the bounding box.
  double sample(std::mt19937_64& rng) const;

private:
  std::string name_;
  Interval support_{ 0.0, 1.0 };
  std::function<double(double)> pdf_;
  std::function<double(double, int)> derivative_;
  double max_value_ = 1.0;
  int continuous_derivatives_ = 0;
  bool weak_derivatives_ = false;
};

//! Compact evaluation intervals C_l and a sorted grid inside each.
struct EvaluationDomain
{
  std::vector<Interval> regions;
  std::vector<std::vector<double>> grids;

  //! `points` equispaced nodes over the central `fraction` of each q_l's
  //! support.
  static EvaluationDomain centered(std::span<const IntegrationDensity> q,
                                   std::size_t points = 81,
                                   double fraction = 0.9);
  static EvaluationDomain from_grids(std::vector<std::vector<double>> grids);

  //! Throws std::invalid_argument if a grid is empty, unsorted or leaves
  //! its region.
  void validate() const;
};

enum class IntegrationMethod
{
  //! tensor Gauss-Legendre (Monte Carlo above max_tensor_dim dimensions)
  tensor,
  //! exact per-row integrals for kernel-sum surfaces
  kernel_local
};

std::string to_string(IntegrationMethod method);
IntegrationMethod integration_method_from_string(const std::string& name);

struct QuadratureOptions
{
  std::size_t nodes = 48;
  std::size_t panels = 1;
  std::size_t max_tensor_dim = 3;
  std::size_t mc_draws = 20000;
  std::uint64_t mc_seed = 20070101;
  IntegrationMethod method = IntegrationMethod::kernel_local;
  std::size_t local_nodes = 16;
  std::size_t local_panels = 2;
};

//! Marginal integration of a d-variate function m against q = prod q_l:
//!   partial_l(x_l)   = \int m(x) q_{-l}(x_{-l}) dx_{-l}
//!   constant         = \int m(x) q(x) dx
//!   component_l(x_l) = partial_l(x_l) - constant.
//! The constant is computed once at construction.
class MarginalIntegrator
{
public:
  //! Generic route for any function of d variables.
  MarginalIntegrator(MultivariateFunction m,
                     std::vector<IntegrationDensity> q,
                     QuadratureOptions options = {});
  //! Route chosen by options.method; kernel_local integrates each kernel
  //! term over its own support. The tensor route keeps a reference to
  //! `surface`, which must then outlive the integrator.
  MarginalIntegrator(const RegressionSurface& surface,
                     std::vector<IntegrationDensity> q,
                     QuadratureOptions options = {});

  std::size_t dim() const { return q_.size(); }
  double constant() const { return constant_; }
  double partial(std::size_t axis, double x) const;
  double component(std::size_t axis, double x) const { return partial(axis, x) - constant_; }
  const std::vector<IntegrationDensity>& densities() const { return q_; }
  const QuadratureOptions& options() const { return options_; }

  //! \int fn(x) q_{-axis}(x_{-axis}) dx_{-axis} with x_axis fixed, using the
  //! tensor or Monte Carlo rule of this integrator.
  double integrate_others(const MultivariateFunction& fn, std::size_t axis, double x) const;
  //! \int fn(x) q(x) dx with the tensor or Monte Carlo rule.
  double integrate_all(const MultivariateFunction& fn) const;

private:
  struct LocalTerms
  {
    // per axis: rows sorted by X_{i,axis}
    std::vector<std::vector<double>> keys;
    std::vector<std::vector<double>> coefficients;
    std::vector<Kernel1D> kernels;
    std::vector<double> bandwidths;
  };

  void init_monte_carlo();

  std::vector<IntegrationDensity> q_;
  QuadratureOptions options_;
  MultivariateFunction m_;
  std::optional<LocalTerms> local_;
  std::vector<double> draws_; // row-major Monte Carlo draws from q
  double constant_ = 0.0;
};

//! Component estimates at each grid node of `axis`.
std::vector<double> marginal_component(const MarginalIntegrator& integrator,
                                       std::size_t axis,
                                       std::span<const double> grid,
                                       std::size_t threads = 1);

struct ComponentBand
{
  std::size_t axis = 0;
  std::vector<double> grid;
  std::vector<double> eta_hat;
  std::vector<double> sigma_hat;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::optional<std::vector<double>> eta_true;
};

struct AdditiveFit
{
  std::vector<ComponentBand> components;
  double constant = 0.0;
};

//! sum_l eta_l(x_l) + constant, each component linearly interpolated on its
//! grid. Throws std::out_of_range outside a grid.
double additive_predict(const AdditiveFit& fit, std::span<const double> x);

//! x -> m(x) - \int m q.
std::function<double(double)> true_component_oracle(const std::function<double(double)>& m,
                                                     const IntegrationDensity& q);

} // namespace censadd

#include "censadd/inference.hpp"

#include "censadd/parallel.hpp"
#include "censadd/random.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace censadd {

double
convergence_rate(std::size_t n, int k)
{
  if (n < 1 || k < 1) {
    throw std::invalid_argument("convergence_rate: need n >= 1 and k >= 1");
  }
  return std::pow(static_cast<double>(n), static_cast<double>(k) / (2.0 * k + 1.0));
}

std::function<double(double)>
bias_oracle(const AnalyticFunction& m,
            const IntegrationDensity& q,
            const Kernel1D& kernel,
            double c,
            int k,
            BiasRoute route)
{
  if (k != kernel.order()) {
    throw std::invalid_argument("bias_oracle: k = " + std::to_string(k) +
                                " differs from the kernel order " + std::to_string(kernel.order()));
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("bias_oracle: c must be positive");
  }
  if (route == BiasRoute::automatic) {
    route = q.has_derivative() ? BiasRoute::classical : BiasRoute::weak;
  }
  if (route == BiasRoute::weak && !q.weak_derivatives()) {
    throw std::logic_error("bias_oracle: q has no usable k-th derivative");
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  double inner = 0.0;
  if (route == BiasRoute::classical) {
    if (!q.has_derivative()) {
      throw std::logic_error("bias_oracle: q^(k) is not available for '" + q.name() + "'");
    }
    inner = integrate_1d([&](double t) { return m(t) * q.derivative(t, k); }, q.support(), 16, 32);
  } else {
    inner = sign * integrate_1d([&](double t) { return m.derivative(t, k) * q(t); }, q.support(), 16, 32);
  }
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) {
    factorial *= j;
  }
  const double scale = std::pow(c, k) / factorial * kernel_moment(kernel, k);
  auto derivative = m.derivative;
  return [=](double x) { return scale * (sign * derivative(x, k) - inner); };
}

RegressionSurface
h_plugin(const RegressionSurface& surface)
{
  return surface.with_response_power(2);
}

SigmaResult
sigma_plugin(const VariancePieces& pieces,
             std::span<const IntegrationDensity> q,
             std::size_t axis,
             const Kernel1D& kernel,
             double c,
             std::span<const double> grid,
             const QuadratureOptions& options,
             std::size_t threads)
{
  const std::size_t d = q.size();
  if (axis >= d) {
    throw std::out_of_range("sigma_plugin: axis out of range");
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("sigma_plugin: c must be positive");
  }
  const double roughness = kernel_roughness(kernel);

  std::vector<std::size_t> others;
  std::vector<QuadAxis> axes;
  for (std::size_t a = 0; a < d; ++a) {
    if (a != axis) {
      others.push_back(a);
      axes.push_back({ q[a].support(), options.nodes, options.panels });
    }
  }
  const bool monte_carlo = others.size() > options.max_tensor_dim;
  std::vector<double> draws;
  if (monte_carlo) {
    std::mt19937_64 rng(options.mc_seed);
    draws.resize(options.mc_draws * others.size());
    for (std::size_t r = 0; r < options.mc_draws; ++r) {
      for (std::size_t j = 0; j < others.size(); ++j) {
        draws[r * others.size() + j] = q[others[j]].sample(rng);
      }
    }
  }

  SigmaResult result;
  result.sigma.resize(grid.size());
  std::atomic<std::size_t> floored{ 0 };
  std::atomic<std::size_t> total{ 0 };
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    const double xl = grid[g];
    const double fl = pieces.axis_density(xl);
    if (!(fl > pieces.floor)) {
      throw std::domain_error("sigma_plugin: marginal density at x = " + std::to_string(xl) +
                              " is not above the floor");
    }
    std::vector<double> point(d);
    point[axis] = xl;
    std::size_t local_floored = 0;
    std::size_t local_total = 0;
    // H(x) q_{-l}(x_{-l})^{power} / f(x_{-l} | x_l)
    auto integrand = [&](std::span<const double> y, int power) {
      double weight = 1.0;
      for (std::size_t j = 0; j < others.size(); ++j) {
        point[others[j]] = y[j];
        weight *= q[others[j]](y[j]);
      }
      ++local_total;
      if (weight == 0.0) {
        return 0.0;
      }
      double conditional = pieces.joint_density(point) / fl;
      if (conditional < pieces.floor) {
        conditional = pieces.floor;
        ++local_floored;
      }
      const double qw = power == 2 ? weight * weight : weight;
      return pieces.h(point) * qw / conditional;
    };
    double integral = 0.0;
    if (monte_carlo) {
      const std::size_t m = others.size();
      for (std::size_t r = 0; r < options.mc_draws; ++r) {
        integral += integrand(std::span<const double>(draws.data() + r * m, m), 1);
      }
      integral /= static_cast<double>(options.mc_draws);
    } else {
      integral = quad_integrate([&](std::span<const double> y) { return integrand(y, 2); }, axes);
    }
    const double variance = roughness / (c * fl) * integral;
    result.sigma[g] = std::sqrt(std::max(variance, 0.0));
    floored += local_floored;
    total += local_total;
  });
  result.floored_nodes = floored.load();
  result.total_nodes = total.load();
  if (result.floored_nodes > 0) {
    result.warnings.push_back("conditional density floored at " + std::to_string(result.floored_nodes) +
                              " of " + std::to_string(result.total_nodes) + " quadrature nodes on axis " +
                              std::to_string(axis + 1));
  }
  return result;
}

SigmaResult
sigma_plugin(const RegressionSurface& h_surface,
             std::span<const IntegrationDensity> q,
             std::size_t axis,
             const Kernel1D& kernel,
             double c,
             const DensityModel& f_hat,
             const DensityModel& f_axis_hat,
             std::span<const double> grid,
             const QuadratureOptions& options,
             std::size_t threads)
{
  if (h_surface.response_power() != 2) {
    throw std::invalid_argument("sigma_plugin: the H surface must use squared responses");
  }
  if (f_hat.dim() != h_surface.dim() || f_axis_hat.dim() != 1) {
    throw std::invalid_argument("sigma_plugin: density model dimensions do not match");
  }
  VariancePieces pieces;
  pieces.h = [&](std::span<const double> x) { return h_surface(x); };
  pieces.joint_density = [&](std::span<const double> x) { return f_hat(x); };
  pieces.axis_density = [&](double x) { return f_axis_hat(std::span<const double>(&x, 1)); };
  pieces.floor = f_hat.floor();
  return sigma_plugin(pieces, q, axis, kernel, c, grid, options, threads);
}

double
undersmoothed_bandwidth(std::size_t n, double c, int k)
{
  if (n < 3) {
    throw std::invalid_argument("undersmoothed_bandwidth: need n >= 3");
  }
  return bandwidth_h2(n, c, k) / std::sqrt(std::log(static_cast<double>(n)));
}

ConfidenceBand
normal_ci(std::span<const double> eta_hat,
          std::span<const double> sigma_hat,
          std::size_t n,
          int k,
          double z,
          bool undersmoothed)
{
  if (eta_hat.size() != sigma_hat.size()) {
    throw std::invalid_argument("normal_ci: estimate and sigma lengths differ");
  }
  if (!(z >= 0.0)) {
    throw std::invalid_argument("normal_ci: z must be non-negative");
  }
  const double scale = 1.0 / convergence_rate(n, k);
  ConfidenceBand band;
  band.lo.resize(eta_hat.size());
  band.hi.resize(eta_hat.size());
  for (std::size_t j = 0; j < eta_hat.size(); ++j) {
    if (!(sigma_hat[j] >= 0.0)) {
      throw std::invalid_argument("normal_ci: sigma must be non-negative");
    }
    const double half = z * sigma_hat[j] * scale;
    band.lo[j] = eta_hat[j] - half;
    band.hi[j] = eta_hat[j] + half;
  }
  if (!undersmoothed) {
    band.warnings.emplace_back(
      "bandwidth is not undersmoothed: the intervals ignore a non-vanishing bias term");
  }
  return band;
}

double
standardized_stat(double eta_hat, double eta_true, double b, double sigma, std::size_t n, int k)
{
  if (!(sigma > 0.0)) {
    throw std::domain_error("standardized_stat: sigma must be positive");
  }
  return (convergence_rate(n, k) * (eta_hat - eta_true) - b) / sigma;
}

double
mse_expansion(double b, double sigma)
{
  return b * b + sigma * sigma;
}

} // namespace censadd

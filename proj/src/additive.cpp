#include "censadd/additive.hpp"

#include "censadd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace censadd {

namespace {

std::vector<double>
differentiate(const std::vector<double>& poly)
{
  if (poly.size() <= 1) {
    return { 0.0 };
  }
  std::vector<double> out(poly.size() - 1);
  for (std::size_t j = 1; j < poly.size(); ++j) {
    out[j - 1] = static_cast<double>(j) * poly[j];
  }
  return out;
}

double
horner(const std::vector<double>& poly, double t)
{
  double value = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    value = value * t + *it;
  }
  return value;
}

double
binomial(int n, int k)
{
  double value = 1.0;
  for (int j = 1; j <= k; ++j) {
    value = value * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return value;
}

} // namespace

IntegrationDensity
IntegrationDensity::uniform(double a, double b)
{
  if (!(b > a)) {
    throw std::invalid_argument("uniform integration density needs a < b");
  }
  IntegrationDensity q;
  q.name_ = "uniform";
  q.support_ = { a, b };
  const double height = 1.0 / (b - a);
  q.pdf_ = [a, b, height](double x) { return (x >= a && x <= b) ? height : 0.0; };
  q.max_value_ = height;
  q.continuous_derivatives_ = 0;
  q.weak_derivatives_ = true;
  return q;
}

IntegrationDensity
IntegrationDensity::smooth_bump(double a, double b, int power)
{
  if (!(b > a)) {
    throw std::invalid_argument("smooth_bump integration density needs a < b");
  }
  if (power < 1) {
    throw std::invalid_argument("smooth_bump power must be >= 1");
  }
  // (1 - t^2)^p expanded in powers of t
  std::vector<double> poly(2 * static_cast<std::size_t>(power) + 1, 0.0);
  for (int j = 0; j <= power; ++j) {
    poly[2 * static_cast<std::size_t>(j)] = binomial(power, j) * ((j % 2 == 0) ? 1.0 : -1.0);
  }
  // \int_{-1}^{1} (1 - t^2)^p dt = 2^{2p+1} (p!)^2 / (2p+1)!
  double norm = 2.0;
  for (int j = 1; j <= power; ++j) {
    norm *= 4.0 * j * j / (static_cast<double>(2 * j) * (2 * j + 1));
  }
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double scale = 1.0 / (norm * half);

  IntegrationDensity q;
  q.name_ = "smooth_bump";
  q.support_ = { a, b };
  q.pdf_ = [=](double x) {
    const double t = (x - mid) / half;
    return std::abs(t) <= 1.0 ? scale * horner(poly, t) : 0.0;
  };
  q.derivative_ = [=](double x, int k) {
    const double t = (x - mid) / half;
    if (!(std::abs(t) <= 1.0)) {
      return 0.0;
    }
    std::vector<double> p = poly;
    for (int j = 0; j < k; ++j) {
      p = differentiate(p);
    }
    return scale * std::pow(1.0 / half, k) * horner(p, t);
  };
  q.max_value_ = scale;
  q.continuous_derivatives_ = power - 1;
  q.weak_derivatives_ = true;
  return q;
}

double
IntegrationDensity::operator()(double x) const
{
  return pdf_(x);
}

double
IntegrationDensity::derivative(double x, int k) const
{
  if (!derivative_) {
    throw std::logic_error("integration density '" + name_ + "' has no classical derivatives");
  }
  return derivative_(x, k);
}

double
IntegrationDensity::sample(std::mt19937_64& rng) const
{
  while (true) {
    const double x = support_.lo + support_.length() * unit_uniform(rng);
    if (unit_uniform(rng) * max_value_ <= (*this)(x)) {
      return x;
    }
  }
}

EvaluationDomain
EvaluationDomain::centered(std::span<const IntegrationDensity> q, std::size_t points, double fraction)
{
  if (points == 0 || !(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("EvaluationDomain: need points >= 1 and 0 < fraction <= 1");
  }
  EvaluationDomain domain;
  for (const auto& density : q) {
    const Interval s = density.support();
    const double mid = 0.5 * (s.lo + s.hi);
    const double half = 0.5 * fraction * s.length();
    domain.regions.push_back({ mid - half, mid + half });
    std::vector<double> grid(points);
    if (points == 1) {
      grid[0] = mid;
    } else {
      for (std::size_t j = 0; j < points; ++j) {
        grid[j] = mid - half + 2.0 * half * static_cast<double>(j) / static_cast<double>(points - 1);
      }
      grid.back() = mid + half;
    }
    domain.grids.push_back(std::move(grid));
  }
  return domain;
}

EvaluationDomain
EvaluationDomain::from_grids(std::vector<std::vector<double>> grids)
{
  EvaluationDomain domain;
  for (const auto& g : grids) {
    if (g.empty()) {
      throw std::invalid_argument("EvaluationDomain: empty grid");
    }
    domain.regions.push_back({ g.front(), g.back() });
  }
  domain.grids = std::move(grids);
  domain.validate();
  return domain;
}

void
EvaluationDomain::validate() const
{
  if (regions.size() != grids.size()) {
    throw std::invalid_argument("EvaluationDomain: one region per grid required");
  }
  for (std::size_t a = 0; a < grids.size(); ++a) {
    const auto& g = grids[a];
    if (g.empty()) {
      throw std::invalid_argument("EvaluationDomain: empty grid on axis " + std::to_string(a + 1));
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!regions[a].contains(g[j])) {
        throw std::invalid_argument("EvaluationDomain: grid leaves its region on axis " +
                                    std::to_string(a + 1));
      }
      if (j > 0 && !(g[j] > g[j - 1])) {
        throw std::invalid_argument("EvaluationDomain: grid not strictly increasing on axis " +
                                    std::to_string(a + 1));
      }
    }
  }
}

std::string
to_string(IntegrationMethod method)
{
  return method == IntegrationMethod::tensor ? "tensor" : "kernel_local";
}

IntegrationMethod
integration_method_from_string(const std::string& name)
{
  if (name == "tensor") {
    return IntegrationMethod::tensor;
  }
  if (name == "kernel_local") {
    return IntegrationMethod::kernel_local;
  }
  throw std::invalid_argument("unknown integration method '" + name + "'");
}

MarginalIntegrator::MarginalIntegrator(MultivariateFunction m,
                                       std::vector<IntegrationDensity> q,
                                       QuadratureOptions options)
  : q_(std::move(q))
  , options_(options)
  , m_(std::move(m))
{
  if (q_.empty()) {
    throw std::invalid_argument("MarginalIntegrator: need at least one integration density");
  }
  init_monte_carlo();
  constant_ = integrate_all(m_);
}

MarginalIntegrator::MarginalIntegrator(const RegressionSurface& surface,
                                       std::vector<IntegrationDensity> q,
                                       QuadratureOptions options)
  : q_(std::move(q))
  , options_(options)
{
  const std::size_t d = surface.dim();
  if (q_.size() != d) {
    throw std::invalid_argument("MarginalIntegrator: one integration density per covariate required");
  }
  if (options_.method == IntegrationMethod::tensor) {
    m_ = [&surface](std::span<const double> x) { return surface(x); };
    init_monte_carlo();
    constant_ = integrate_all(m_);
    return;
  }

  // m(x) = sum_i c_i prod_l K_l((x_l - X_il)/h_l)/h_l with c_i = s_i / (n f(X_i)),
  // so each integral factorises into one-dimensional kernel integrals.
  const std::size_t n = surface.size();
  const auto& kernels = surface.kernels();
  const auto& h = surface.bandwidths();
  const auto& synthetic = surface.synthetic();
  const auto& denom = surface.denominators();
  const CensoredSample& sample = surface.sample();

  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (synthetic[i] != 0.0) {
      coef[i] = synthetic[i] / denom[i];
    }
  }
  std::vector<double> local(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (coef[i] == 0.0) {
      continue;
    }
    for (std::size_t a = 0; a < d; ++a) {
      const double xi = sample.x(i, a);
      const double radius = h[a] * kernels[a].support_radius();
      const Interval s = q_[a].support();
      const Interval range{ std::max(xi - radius, s.lo), std::min(xi + radius, s.hi) };
      if (!(range.hi > range.lo)) {
        continue;
      }
      const Kernel1D& kernel = kernels[a];
      const IntegrationDensity& qa = q_[a];
      const double ha = h[a];
      local[i * d + a] = integrate_1d(
        [&](double t) { return kernel((t - xi) / ha) / ha * qa(t); },
        range,
        options_.local_panels,
        options_.local_nodes);
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double term = coef[i];
    for (std::size_t a = 0; a < d && term != 0.0; ++a) {
      term *= local[i * d + a];
    }
    total += term;
  }
  constant_ = total;

  LocalTerms terms;
  terms.kernels = kernels;
  terms.bandwidths = h;
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (coef[i] != 0.0) {
        order.push_back(i);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
      return sample.x(u, a) < sample.x(v, a);
    });
    std::vector<double> keys;
    std::vector<double> coefficients;
    keys.reserve(order.size());
    coefficients.reserve(order.size());
    for (std::size_t i : order) {
      double b = coef[i];
      for (std::size_t other = 0; other < d; ++other) {
        if (other != a) {
          b *= local[i * d + other];
        }
      }
      keys.push_back(sample.x(i, a));
      coefficients.push_back(b);
    }
    terms.keys.push_back(std::move(keys));
    terms.coefficients.push_back(std::move(coefficients));
  }
  local_ = std::move(terms);
}

void
MarginalIntegrator::init_monte_carlo()
{
  const std::size_t d = q_.size();
  if (d <= options_.max_tensor_dim) {
    return;
  }
  std::mt19937_64 rng(options_.mc_seed);
  draws_.resize(options_.mc_draws * d);
  for (std::size_t r = 0; r < options_.mc_draws; ++r) {
    for (std::size_t a = 0; a < d; ++a) {
      draws_[r * d + a] = q_[a].sample(rng);
    }
  }
}

double
MarginalIntegrator::integrate_all(const MultivariateFunction& fn) const
{
  const std::size_t d = q_.size();
  if (d > options_.max_tensor_dim) {
    double sum = 0.0;
    for (std::size_t r = 0; r < options_.mc_draws; ++r) {
      sum += fn(std::span<const double>(draws_.data() + r * d, d));
    }
    return sum / static_cast<double>(options_.mc_draws);
  }
  std::vector<QuadAxis> axes;
  for (const auto& density : q_) {
    axes.push_back({ density.support(), options_.nodes, options_.panels });
  }
  return quad_integrate(
    [&](std::span<const double> x) {
      double weight = 1.0;
      for (std::size_t a = 0; a < d; ++a) {
        weight *= q_[a](x[a]);
      }
      return weight == 0.0 ? 0.0 : weight * fn(x);
    },
    axes);
}

double
MarginalIntegrator::integrate_others(const MultivariateFunction& fn, std::size_t axis, double x) const
{
  const std::size_t d = q_.size();
  if (axis >= d) {
    throw std::out_of_range("MarginalIntegrator: axis out of range");
  }
  std::vector<double> point(d);
  if (d - 1 > options_.max_tensor_dim) {
    double sum = 0.0;
    for (std::size_t r = 0; r < options_.mc_draws; ++r) {
      std::copy_n(draws_.data() + r * d, d, point.begin());
      point[axis] = x;
      sum += fn(point);
    }
    return sum / static_cast<double>(options_.mc_draws);
  }
  std::vector<QuadAxis> axes;
  std::vector<std::size_t> others;
  for (std::size_t a = 0; a < d; ++a) {
    if (a != axis) {
      axes.push_back({ q_[a].support(), options_.nodes, options_.panels });
      others.push_back(a);
    }
  }
  return quad_integrate(
    [&](std::span<const double> y) {
      double weight = 1.0;
      for (std::size_t j = 0; j < others.size(); ++j) {
        point[others[j]] = y[j];
        weight *= q_[others[j]](y[j]);
      }
      point[axis] = x;
      return weight == 0.0 ? 0.0 : weight * fn(point);
    },
    axes);
}

double
MarginalIntegrator::partial(std::size_t axis, double x) const
{
  if (axis >= q_.size()) {
    throw std::out_of_range("MarginalIntegrator: axis out of range");
  }
  if (!local_) {
    return integrate_others(m_, axis, x);
  }
  const auto& keys = local_->keys[axis];
  const auto& coefficients = local_->coefficients[axis];
  const Kernel1D& kernel = local_->kernels[axis];
  const double h = local_->bandwidths[axis];
  const double radius = h * kernel.support_radius();
  const auto lo = std::lower_bound(keys.begin(), keys.end(), x - radius);
  const auto hi = std::upper_bound(lo, keys.end(), x + radius);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const std::size_t j = static_cast<std::size_t>(it - keys.begin());
    sum += coefficients[j] * (kernel((x - *it) / h) / h);
  }
  return sum;
}

std::vector<double>
marginal_component(const MarginalIntegrator& integrator,
                   std::size_t axis,
                   std::span<const double> grid,
                   std::size_t threads)
{
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t j) { out[j] = integrator.component(axis, grid[j]); });
  return out;
}

double
additive_predict(const AdditiveFit& fit, std::span<const double> x)
{
  if (x.size() != fit.components.size()) {
    throw std::invalid_argument("additive_predict: dimension mismatch");
  }
  double total = fit.constant;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto& band = fit.components[a];
    const auto& g = band.grid;
    const double v = x[a];
    if (g.empty() || v < g.front() || v > g.back()) {
      throw std::out_of_range("additive_predict: x" + std::to_string(a + 1) + " outside the grid");
    }
    if (g.size() == 1) {
      total += band.eta_hat.front();
      continue;
    }
    auto it = std::upper_bound(g.begin(), g.end(), v);
    std::size_t j = static_cast<std::size_t>(it - g.begin());
    j = std::clamp<std::size_t>(j, 1, g.size() - 1);
    const double t = (v - g[j - 1]) / (g[j] - g[j - 1]);
    total += (1.0 - t) * band.eta_hat[j - 1] + t * band.eta_hat[j];
  }
  return total;
}

std::function<double(double)>
true_component_oracle(const std::function<double(double)>& m, const IntegrationDensity& q)
{
  const double centre = integrate_1d([&](double t) { return m(t) * q(t); }, q.support(), 16, 32);
  return [m, centre](double x) { return m(x) - centre; };
}

} // namespace censadd

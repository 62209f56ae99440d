#include "censadd/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace censadd {

namespace {

// Newton iteration on P_n from the Tricomi initial guess; symmetric nodes are
// mirrored. Requires n >= 2.
QuadratureRule
compute_gauss_legendre(std::size_t n)
{
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

} // namespace

const QuadratureRule&
gauss_legendre(std::size_t n)
{
  if (n == 0) {
    throw std::invalid_argument("gauss_legendre: need at least one node");
  }
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    if (n == 1) {
      slot = std::make_unique<QuadratureRule>(QuadratureRule{ { 0.0 }, { 2.0 } });
    } else {
      slot = std::make_unique<QuadratureRule>(compute_gauss_legendre(n));
    }
  }
  return *slot;
}

QuadratureRule
composite_gauss_legendre(Interval range,
                         std::size_t panels,
                         std::size_t nodes_per_panel)
{
  if (panels == 0) {
    throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
  }
  const QuadratureRule& base = gauss_legendre(nodes_per_panel);
  QuadratureRule rule;
  rule.nodes.reserve(panels * nodes_per_panel);
  rule.weights.reserve(panels * nodes_per_panel);
  const double width = range.length() / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = range.lo + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (std::size_t j = 0; j < base.size(); ++j) {
      rule.nodes.push_back(mid + half * base.nodes[j]);
      rule.weights.push_back(half * base.weights[j]);
    }
  }
  return rule;
}

double
quad_integrate(const MultivariateFunction& fn, std::span<const QuadAxis> axes)
{
  const std::size_t dim = axes.size();
  if (dim == 0) {
    return fn(std::span<const double>{});
  }
  std::vector<QuadratureRule> rules;
  rules.reserve(dim);
  for (const auto& axis : axes) {
    if (axis.nodes * axis.panels < 2) {
      throw std::invalid_argument("quad_integrate: at least two nodes per axis");
    }
    rules.push_back(composite_gauss_legendre(axis.range, axis.panels, axis.nodes));
  }

  // odometer over the tensor grid
  std::vector<std::size_t> index(dim, 0);
  std::vector<double> point(dim);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      point[a] = rules[a].nodes[index[a]];
      weight *= rules[a].weights[index[a]];
    }
    total += weight * fn(point);

    std::size_t a = dim;
    while (a > 0) {
      --a;
      if (++index[a] < rules[a].size()) {
        break;
      }
      index[a] = 0;
      if (a == 0) {
        return total;
      }
    }
  }
}

double
integrate_1d(const std::function<double(double)>& fn,
             Interval range,
             std::size_t panels,
             std::size_t nodes_per_panel)
{
  const QuadratureRule rule = composite_gauss_legendre(range, panels, nodes_per_panel);
  double total = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    total += rule.weights[j] * fn(rule.nodes[j]);
  }
  return total;
}

} // namespace censadd

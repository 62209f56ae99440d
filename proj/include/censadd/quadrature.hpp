#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace censadd {

//! Closed interval [lo, hi].
struct Interval
{
  double lo;
  double hi;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

//! Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

//! n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree
//! up to 2n - 1. Results are cached per n.
const QuadratureRule& gauss_legendre(std::size_t n);

//! Composite Gauss-Legendre rule on [a, b] made of `panels` equal panels
//! with `nodes_per_panel` nodes each.
QuadratureRule composite_gauss_legendre(Interval range,
                                        std::size_t panels,
                                        std::size_t nodes_per_panel);

//! One axis of a tensor-product rule.
struct QuadAxis
{
  Interval range;
  std::size_t nodes = 48;
  std::size_t panels = 1;
};

using MultivariateFunction = std::function<double(std::span<const double>)>;

//! Tensor-product composite Gauss-Legendre quadrature of fn over the box
//! spanned by `axes`. With no axes the integral of fn over R^0 is fn().
double quad_integrate(const MultivariateFunction& fn,
                      std::span<const QuadAxis> axes);

//! Integrates fn over [a, b] with a composite Gauss-Legendre rule.
double integrate_1d(const std::function<double(double)>& fn,
                    Interval range,
                    std::size_t panels = 1,
                    std::size_t nodes_per_panel = 48);

} // namespace censadd

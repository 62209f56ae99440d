#pragma once

#include <functional>
#include <string>

namespace censadd {

//! Smooth univariate function with closed-form derivatives of every order.
struct AnalyticFunction
{
  std::string name;
  std::function<double(double)> value;
  //! derivative(x, k) for k >= 1
  std::function<double(double, int)> derivative;

  double operator()(double x) const { return value(x); }

  static AnalyticFunction zero();
  //! 0.5 cos^2(x)
  static AnalyticFunction half_cos_squared();
  //! 0.5 sin^2(x)
  static AnalyticFunction half_sin_squared();
  static AnalyticFunction linear(double slope);
  static AnalyticFunction quadratic(double coefficient);
  static AnalyticFunction sine(double amplitude, double frequency);
};

} // namespace censadd

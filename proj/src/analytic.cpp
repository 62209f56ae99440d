#include "censadd/analytic.hpp"

#include <cmath>
#include <numbers>

namespace censadd {

namespace {

// d^k/dx^k cos(2x) = 2^k cos(2x + k pi / 2)
double
cos2x_derivative(double x, int k)
{
  return std::pow(2.0, k) * std::cos(2.0 * x + k * std::numbers::pi / 2.0);
}

} // namespace

AnalyticFunction
AnalyticFunction::zero()
{
  return { "zero", [](double) { return 0.0; }, [](double, int) { return 0.0; } };
}

AnalyticFunction
AnalyticFunction::half_cos_squared()
{
  return { "half_cos_squared",
           [](double x) {
             const double c = std::cos(x);
             return 0.5 * c * c;
           },
           [](double x, int k) { return 0.25 * cos2x_derivative(x, k); } };
}

AnalyticFunction
AnalyticFunction::half_sin_squared()
{
  return { "half_sin_squared",
           [](double x) {
             const double s = std::sin(x);
             return 0.5 * s * s;
           },
           [](double x, int k) { return -0.25 * cos2x_derivative(x, k); } };
}

AnalyticFunction
AnalyticFunction::linear(double slope)
{
  return { "linear",
           [slope](double x) { return slope * x; },
           [slope](double, int k) { return k == 1 ? slope : 0.0; } };
}

AnalyticFunction
AnalyticFunction::quadratic(double coefficient)
{
  return { "quadratic",
           [coefficient](double x) { return coefficient * x * x; },
           [coefficient](double x, int k) {
             if (k == 1) {
               return 2.0 * coefficient * x;
             }
             return k == 2 ? 2.0 * coefficient : 0.0;
           } };
}

AnalyticFunction
AnalyticFunction::sine(double amplitude, double frequency)
{
  return { "sine",
           [=](double x) { return amplitude * std::sin(frequency * x); },
           [=](double x, int k) {
             return amplitude * std::pow(frequency, k) *
                    std::sin(frequency * x + k * std::numbers::pi / 2.0);
           } };
}

} // namespace censadd

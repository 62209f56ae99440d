#include "censadd/density.hpp"

#include <cmath>
#include <stdexcept>

namespace censadd {

double
bandwidth_h1(std::size_t n, double c_prime, int k_prime, std::size_t d)
{
  if (n < 2) {
    throw std::invalid_argument("bandwidth_h1: need n >= 2");
  }
  if (!(c_prime > 0.0)) {
    throw std::invalid_argument("bandwidth_h1: c' must be positive");
  }
  const double nn = static_cast<double>(n);
  return c_prime * std::pow(std::log(nn) / nn,
                            1.0 / (2.0 * k_prime + static_cast<double>(d)));
}

DensityModel::DensityModel(std::span<const double> rows,
                           std::size_t d,
                           ProductKernel kernel,
                           double bandwidth,
                           double floor)
  : kernel_(std::move(kernel))
  , bandwidth_(bandwidth)
  , floor_(floor)
{
  if (d == 0 || rows.empty() || rows.size() % d != 0) {
    throw std::invalid_argument("DensityModel: malformed covariate matrix");
  }
  if (kernel_.dim() != d) {
    throw std::invalid_argument("DensityModel: kernel dimension does not match the data");
  }
  if (!(bandwidth_ > 0.0)) {
    throw std::invalid_argument("DensityModel: bandwidth must be positive");
  }
  if (!(floor_ >= 0.0)) {
    throw std::invalid_argument("DensityModel: floor must be non-negative");
  }
  points_ = detail::SortedPoints(rows, d);
  scale_ = 1.0 / (static_cast<double>(points_.size()) *
                  std::pow(bandwidth_, static_cast<double>(d)));
}

DensityModel::DensityModel(const DensityModel& other)
  : points_(other.points_)
  , kernel_(other.kernel_)
  , bandwidth_(other.bandwidth_)
  , floor_(other.floor_)
  , scale_(other.scale_)
  , floored_count_(other.floored_count_.load())
{}

DensityModel&
DensityModel::operator=(const DensityModel& other)
{
  if (this != &other) {
    points_ = other.points_;
    kernel_ = other.kernel_;
    bandwidth_ = other.bandwidth_;
    floor_ = other.floor_;
    scale_ = other.scale_;
    floored_count_.store(other.floored_count_.load());
  }
  return *this;
}

double
DensityModel::operator()(std::span<const double> x) const
{
  const std::size_t d = dim();
  if (x.size() != d) {
    throw std::invalid_argument("DensityModel: evaluation point has the wrong dimension");
  }
  const double inv_h = 1.0 / bandwidth_;
  const auto [first, last] = points_.window(x[0], bandwidth_);
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const auto p = points_.point(k);
    double w = 1.0;
    for (std::size_t a = 0; a < d && w != 0.0; ++a) {
      w *= kernel_.factor(a)((x[a] - p[a]) * inv_h);
    }
    sum += w;
  }
  return sum * scale_;
}

double
DensityModel::floored(std::span<const double> x) const
{
  const double value = (*this)(x);
  if (floor_ > 0.0 && value < floor_) {
    floored_count_.fetch_add(1, std::memory_order_relaxed);
    return floor_;
  }
  return value;
}

DensityModel
fit_kde(std::span<const double> rows,
        std::size_t d,
        const ProductKernel& kernel,
        double bandwidth,
        double floor)
{
  return DensityModel(rows, d, kernel, bandwidth, floor);
}

DensityModel
marginal_kde(std::span<const double> column,
             const Kernel1D& kernel,
             double bandwidth,
             double floor)
{
  return DensityModel(column, 1, ProductKernel({ kernel }), bandwidth, floor);
}

double
floored_eval(const DensityModel& model, std::span<const double> x)
{
  return model.floored(x);
}

} // namespace censadd

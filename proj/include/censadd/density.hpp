#pragma once

#include "censadd/detail/sorted_points.hpp"
#include "censadd/kernels.hpp"

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

namespace censadd {

//! Bandwidth c' (log n / n)^{1/(2k'+d)} for the covariate density estimate.
//! Throws std::invalid_argument for n < 2 or c' <= 0.
double bandwidth_h1(std::size_t n, double c_prime, int k_prime, std::size_t d);

//! Product-kernel density estimate
//!   f_n(x) = (1 / (n h^d)) sum_j prod_l K_l((x_l - X_{j,l}) / h)
//! with a single bandwidth h shared by all axes.
class DensityModel
{
public:
  DensityModel(std::span<const double> rows,
               std::size_t d,
               ProductKernel kernel,
               double bandwidth,
               double floor = 1e-12);

  DensityModel(const DensityModel& other);
  DensityModel& operator=(const DensityModel& other);

  double operator()(std::span<const double> x) const;

  //! max(f_n(x), floor) when floor > 0, raw f_n(x) otherwise. Evaluations
  //! where the floor binds are counted.
  double floored(std::span<const double> x) const;

  std::size_t floored_count() const { return floored_count_.load(); }
  void reset_floored_count() const { floored_count_.store(0); }

  std::size_t dim() const { return kernel_.dim(); }
  std::size_t size() const { return points_.size(); }
  double bandwidth() const { return bandwidth_; }
  double floor() const { return floor_; }
  const ProductKernel& kernel() const { return kernel_; }

private:
  detail::SortedPoints points_;
  ProductKernel kernel_;
  double bandwidth_;
  double floor_;
  double scale_;
  mutable std::atomic<std::size_t> floored_count_{ 0 };
};

DensityModel fit_kde(std::span<const double> rows,
                     std::size_t d,
                     const ProductKernel& kernel,
                     double bandwidth,
                     double floor = 1e-12);

//! One-dimensional estimate for a single covariate column.
DensityModel marginal_kde(std::span<const double> column,
                          const Kernel1D& kernel,
                          double bandwidth,
                          double floor = 1e-12);

double floored_eval(const DensityModel& model, std::span<const double> x);

} // namespace censadd

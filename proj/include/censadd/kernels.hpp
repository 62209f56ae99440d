#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace censadd {

enum class KernelFamily
{
  epanechnikov,
  uniform,
  polynomial
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

//! Compactly supported one-dimensional kernel on [-1, 1].
//!
//! Every kernel is a base density (Epanechnikov or uniform) multiplied by an
//! even polynomial P(u) = sum_j a_j u^(2j). Built-in kernels have P = 1;
//! higher-order kernels come out of construct_higher_order(). Instances are
//! immutable and safe to evaluate from any number of threads.
class Kernel1D
{
public:
  static Kernel1D epanechnikov();
  static Kernel1D uniform();

  double operator()(double u) const;

  //! polynomial whenever the multiplier is non-trivial
  KernelFamily family() const;
  KernelFamily base_family() const { return base_; }
  int order() const { return order_; }
  double support_radius() const { return 1.0; }
  //! Coefficients a_j of the even multiplier, in powers of u^2.
  const std::vector<double>& coefficients() const { return coefficients_; }

private:
  Kernel1D(KernelFamily base, int order, std::vector<double> coefficients);

  double base_value(double u) const;

  KernelFamily base_;
  int order_;
  std::vector<double> coefficients_;

  friend Kernel1D construct_higher_order(const Kernel1D& base, int target_order);
};

double eval_kernel(const Kernel1D& kernel, double u);

//! \int u^j K(u) du by 128-node composite Gauss-Legendre quadrature.
double kernel_moment(const Kernel1D& kernel, int j);

//! \int K(u)^2 du.
double kernel_roughness(const Kernel1D& kernel);

//! Multiplies `base` by the even polynomial whose coefficients solve the
//! moment system, so that the result integrates to one and its moments
//! 1..target_order-1 vanish. Throws std::domain_error when the moment matrix
//! is singular and std::invalid_argument for an odd or too small target.
Kernel1D construct_higher_order(const Kernel1D& base, int target_order);

//! Builds a kernel from a family name and order, e.g. ("epanechnikov", 6).
//! Orders above 2 are raised from the named base; "polynomial" means an
//! Epanechnikov base.
Kernel1D make_kernel(const std::string& family, int order);

//! Tensor product of d one-dimensional kernels.
class ProductKernel
{
public:
  explicit ProductKernel(std::vector<Kernel1D> factors);
  static ProductKernel replicate(const Kernel1D& factor, std::size_t d);

  double operator()(std::span<const double> u) const;

  std::size_t dim() const { return factors_.size(); }
  const Kernel1D& factor(std::size_t axis) const { return factors_[axis]; }
  const std::vector<Kernel1D>& factors() const { return factors_; }
  //! minimum order over the factors
  int order() const;

private:
  std::vector<Kernel1D> factors_;
};

} // namespace censadd

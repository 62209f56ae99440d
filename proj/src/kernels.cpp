#include "censadd/kernels.hpp"

#include "censadd/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace censadd {

namespace {

constexpr std::size_t kMomentPanels = 8;
constexpr std::size_t kMomentNodesPerPanel = 16;

std::vector<double>
multiply_even_polynomials(const std::vector<double>& a, const std::vector<double>& b)
{
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

} // namespace

std::string
to_string(KernelFamily family)
{
  switch (family) {
    case KernelFamily::epanechnikov:
      return "epanechnikov";
    case KernelFamily::uniform:
      return "uniform";
    case KernelFamily::polynomial:
      return "polynomial";
  }
  return "unknown";
}

KernelFamily
kernel_family_from_string(const std::string& name)
{
  if (name == "epanechnikov") {
    return KernelFamily::epanechnikov;
  }
  if (name == "uniform") {
    return KernelFamily::uniform;
  }
  if (name == "polynomial") {
    return KernelFamily::polynomial;
  }
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

Kernel1D::Kernel1D(KernelFamily base, int order, std::vector<double> coefficients)
  : base_(base)
  , order_(order)
  , coefficients_(std::move(coefficients))
{}

Kernel1D
Kernel1D::epanechnikov()
{
  return Kernel1D(KernelFamily::epanechnikov, 2, { 1.0 });
}

Kernel1D
Kernel1D::uniform()
{
  return Kernel1D(KernelFamily::uniform, 2, { 1.0 });
}

KernelFamily
Kernel1D::family() const
{
  if (coefficients_.size() == 1 && coefficients_[0] == 1.0) {
    return base_;
  }
  return KernelFamily::polynomial;
}

double
Kernel1D::base_value(double u) const
{
  if (base_ == KernelFamily::uniform) {
    return 0.5;
  }
  return 0.75 * (1.0 - u * u);
}

double
Kernel1D::operator()(double u) const
{
  if (!(std::abs(u) <= 1.0)) {
    return 0.0;
  }
  const double u2 = u * u;
  double poly = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    poly = poly * u2 + *it;
  }
  return base_value(u) * poly;
}

double
eval_kernel(const Kernel1D& kernel, double u)
{
  return kernel(u);
}

double
kernel_moment(const Kernel1D& kernel, int j)
{
  if (j < 0) {
    throw std::invalid_argument("kernel_moment: j must be non-negative");
  }
  return integrate_1d([&](double u) { return std::pow(u, j) * kernel(u); },
                      Interval{ -1.0, 1.0 },
                      kMomentPanels,
                      kMomentNodesPerPanel);
}

double
kernel_roughness(const Kernel1D& kernel)
{
  return integrate_1d([&](double u) {
                        const double k = kernel(u);
                        return k * k;
                      },
                      Interval{ -1.0, 1.0 },
                      kMomentPanels,
                      kMomentNodesPerPanel);
}

Kernel1D
construct_higher_order(const Kernel1D& base, int target_order)
{
  if (target_order < 2 || target_order % 2 != 0) {
    throw std::invalid_argument("construct_higher_order: target order must be even and >= 2");
  }
  if (target_order < base.order()) {
    throw std::invalid_argument("construct_higher_order: target order below the base order");
  }
  if (target_order == base.order()) {
    return base;
  }

  // Find Q(u) = sum_j c_j u^(2j), j < m, with \int u^(2i) B(u) Q(u) du = [i == 0]
  // for i < m; odd moments vanish by symmetry.
  const int m = target_order / 2;
  Eigen::MatrixXd moments(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      moments(i, j) = kernel_moment(base, 2 * (i + j));
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(0) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(moments);
  if (!lu.isInvertible()) {
    throw std::domain_error("construct_higher_order: singular moment system (degenerate base kernel)");
  }
  const Eigen::VectorXd solution = lu.solve(rhs);
  std::vector<double> multiplier(solution.data(), solution.data() + m);

  return Kernel1D(base.base_family(),
                  target_order,
                  multiply_even_polynomials(base.coefficients(), multiplier));
}

Kernel1D
make_kernel(const std::string& family, int order)
{
  const KernelFamily f = kernel_family_from_string(family);
  const Kernel1D base = (f == KernelFamily::uniform) ? Kernel1D::uniform() : Kernel1D::epanechnikov();
  if (f == KernelFamily::polynomial && order <= 2) {
    throw std::invalid_argument("polynomial kernels need an order above 2");
  }
  return construct_higher_order(base, order);
}

ProductKernel::ProductKernel(std::vector<Kernel1D> factors)
  : factors_(std::move(factors))
{
  if (factors_.empty()) {
    throw std::invalid_argument("ProductKernel: need at least one factor");
  }
}

ProductKernel
ProductKernel::replicate(const Kernel1D& factor, std::size_t d)
{
  return ProductKernel(std::vector<Kernel1D>(d, factor));
}

double
ProductKernel::operator()(std::span<const double> u) const
{
  if (u.size() != factors_.size()) {
    throw std::invalid_argument("ProductKernel: dimension mismatch");
  }
  double value = 1.0;
  for (std::size_t a = 0; a < factors_.size() && value != 0.0; ++a) {
    value *= factors_[a](u[a]);
  }
  return value;
}

int
ProductKernel::order() const
{
  int order = factors_.front().order();
  for (const auto& f : factors_) {
    order = std::min(order, f.order());
  }
  return order;
}

} // namespace censadd

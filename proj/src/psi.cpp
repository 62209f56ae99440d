#include "censadd/psi.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace censadd {

std::string
to_string(PsiKind kind)
{
  switch (kind) {
    case PsiKind::indicator_leq_tau0:
      return "indicator_leq_tau0";
    case PsiKind::identity_truncated_tau0:
      return "identity_truncated_tau0";
    case PsiKind::custom_bounded:
      return "custom_bounded";
  }
  return "unknown";
}

PsiKind
psi_kind_from_string(const std::string& name)
{
  if (name == "indicator_leq_tau0") {
    return PsiKind::indicator_leq_tau0;
  }
  if (name == "identity_truncated_tau0") {
    return PsiKind::identity_truncated_tau0;
  }
  if (name == "custom_bounded") {
    return PsiKind::custom_bounded;
  }
  throw std::invalid_argument("unknown psi kind '" + name + "'");
}

PsiSpec::PsiSpec(PsiKind kind, double tau0, double bound, std::function<double(double)> fn)
  : kind_(kind)
  , tau0_(tau0)
  , bound_(bound)
  , fn_(std::move(fn))
{
  if (!(bound_ >= 0.0)) {
    throw std::invalid_argument("PsiSpec: bound must be non-negative");
  }
}

PsiSpec
PsiSpec::indicator(double tau0)
{
  return PsiSpec(PsiKind::indicator_leq_tau0, tau0, 1.0, nullptr);
}

PsiSpec
PsiSpec::identity_truncated(double tau0)
{
  if (!std::isfinite(tau0)) {
    throw std::invalid_argument("identity_truncated psi needs a finite tau0");
  }
  return PsiSpec(PsiKind::identity_truncated_tau0, tau0, std::abs(tau0), nullptr);
}

PsiSpec
PsiSpec::custom(std::function<double(double)> fn, double bound, double tau0)
{
  if (!fn) {
    throw std::invalid_argument("custom psi needs a function");
  }
  return PsiSpec(PsiKind::custom_bounded, tau0, bound, std::move(fn));
}

double
PsiSpec::operator()(double y) const
{
  switch (kind_) {
    case PsiKind::indicator_leq_tau0:
      return y <= tau0_ ? 1.0 : 0.0;
    case PsiKind::identity_truncated_tau0:
      return y <= tau0_ ? y : 0.0;
    case PsiKind::custom_bounded:
      return y <= tau0_ ? fn_(y) : 0.0;
  }
  return 0.0;
}

PsiSpec
PsiSpec::scaled(double factor) const
{
  PsiSpec base = *this;
  return PsiSpec(PsiKind::custom_bounded,
                 tau0_,
                 std::abs(factor) * bound_,
                 [base, factor](double y) { return factor * base(y); });
}

} // namespace censadd

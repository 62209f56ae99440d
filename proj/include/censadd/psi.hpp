#pragma once

#include <functional>
#include <string>

namespace censadd {

enum class PsiKind
{
  indicator_leq_tau0,      //!< psi(y) = 1{y <= tau0}
  identity_truncated_tau0, //!< psi(y) = y 1{y <= tau0}
  custom_bounded           //!< user function, |psi| <= bound
};

std::string to_string(PsiKind kind);
PsiKind psi_kind_from_string(const std::string& name);

//! Transformation psi of the response whose conditional mean is estimated.
class PsiSpec
{
public:
  static PsiSpec indicator(double tau0);
  //! Bound |tau0|; observed times are non-negative.
  static PsiSpec identity_truncated(double tau0);
  //! `tau0` is the point beyond which fn vanishes (+inf if it never does).
  static PsiSpec custom(std::function<double(double)> fn, double bound, double tau0);

  double operator()(double y) const;

  PsiKind kind() const { return kind_; }
  double tau0() const { return tau0_; }
  double bound() const { return bound_; }

  //! Returns a copy scaled by `factor` (custom kind).
  PsiSpec scaled(double factor) const;

private:
  PsiSpec(PsiKind kind, double tau0, double bound, std::function<double(double)> fn);

  PsiKind kind_;
  double tau0_;
  double bound_;
  std::function<double(double)> fn_;
};

} // namespace censadd

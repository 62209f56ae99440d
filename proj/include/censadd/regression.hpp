#pragma once

#include "censadd/density.hpp"
#include "censadd/detail/sorted_points.hpp"
#include "censadd/kernels.hpp"
#include "censadd/psi.hpp"
#include "censadd/survival.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace censadd {

//! Bandwidth c n^{-1/(2k+1)} for the regression kernels.
double bandwidth_h2(std::size_t n, double c, int k);

using DensityFunction = std::function<double(std::span<const double>)>;

//! Where the censoring survival G comes from: the Kaplan-Meier estimate on
//! the fitted sample, or a known function.
class CensoringSource
{
public:
  static CensoringSource kaplan_meier() { return CensoringSource{}; }
  static CensoringSource analytic(SurvivalFunction g);

  bool is_kaplan_meier() const { return !g_; }
  const SurvivalFunction& function() const { return g_; }

private:
  SurvivalFunction g_;
};

//! Where the covariate density in the weight denominators comes from.
class CovariateDensitySource
{
public:
  static CovariateDensitySource kde(DensityModel model);
  static CovariateDensitySource analytic(DensityFunction f);

  bool is_kde() const { return model_.has_value(); }
  const DensityModel& model() const { return *model_; }
  const DensityFunction& function() const { return f_; }

private:
  std::optional<DensityModel> model_;
  DensityFunction f_;
};

struct FitDiagnostics
{
  std::size_t n = 0;
  double uncensored_fraction = 0.0;
  std::size_t floored_density_count = 0;
  double max_synthetic = 0.0;
  double tau0 = 0.0;
  double max_time = 0.0;
  //! tau0 < max Z, the sample proxy for tau0 < T_H
  bool tau0_below_max_time = true;
  //! every observation censored: the surface is identically zero
  bool fully_censored = false;
  std::vector<std::string> warnings;
};

//! Inverse-probability-of-censoring weighted kernel regression estimate
//!   m(x) = sum_i W_i(x) delta_i psi(Z_i) / G(Z_i),
//!   W_i(x) = prod_l K_l((x_l - X_{i,l}) / h_l) / h_l / (n f(X_i)),
//! where G and f are either estimated or known. Evaluation is pure and
//! thread-safe.
class RegressionSurface
{
public:
  double operator()(std::span<const double> x) const;

  std::size_t dim() const { return sample_.dim(); }
  std::size_t size() const { return sample_.size(); }

  const CensoredSample& sample() const { return sample_; }
  const PsiSpec& psi() const { return psi_; }
  const std::vector<Kernel1D>& kernels() const { return kernels_; }
  const std::vector<double>& bandwidths() const { return bandwidths_; }
  //! delta_i psi(Z_i)^p / G(Z_i)^p for the current response power p
  const std::vector<double>& synthetic() const { return synthetic_; }
  //! n f(X_i), floored when f is estimated
  const std::vector<double>& denominators() const { return denominators_; }
  //! G(Z_i) for every row
  const std::vector<double>& censoring_at_times() const { return g_at_times_; }
  const std::optional<StepSurvival>& kaplan_meier() const { return kaplan_meier_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }
  int response_power() const { return power_; }

  //! Same weights, synthetic responses delta psi^p / G^p.
  RegressionSurface with_response_power(int power) const;

  //! W_i(x) for row i (original sample order).
  double weight(std::size_t i, std::span<const double> x) const;

private:
  RegressionSurface(CensoredSample sample, PsiSpec psi);

  CensoredSample sample_;
  PsiSpec psi_;
  std::vector<Kernel1D> kernels_;
  std::vector<double> bandwidths_;
  std::vector<double> synthetic_;
  std::vector<double> denominators_;
  std::vector<double> g_at_times_;
  std::optional<StepSurvival> kaplan_meier_;
  detail::SortedPoints points_;
  FitDiagnostics diagnostics_;
  int power_ = 1;

  friend RegressionSurface fit_surface(const CensoredSample&,
                                       const CensoringSource&,
                                       const CovariateDensitySource&,
                                       std::vector<Kernel1D>,
                                       std::vector<double>,
                                       const PsiSpec&);
};

//! Fits the weighted estimate. Throws std::invalid_argument when the kernel
//! or bandwidth count differs from the covariate dimension. A fully censored
//! sample is not an error: the surface is identically zero and the
//! diagnostics carry a warning.
RegressionSurface fit_surface(const CensoredSample& sample,
                              const CensoringSource& g_source,
                              const CovariateDensitySource& f_source,
                              std::vector<Kernel1D> kernels,
                              std::vector<double> bandwidths,
                              const PsiSpec& psi);

double eval_surface(const RegressionSurface& surface, std::span<const double> x);

} // namespace censadd

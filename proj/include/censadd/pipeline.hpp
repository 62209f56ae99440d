#pragma once

#include "censadd/additive.hpp"
#include "censadd/inference.hpp"
#include "censadd/kernels.hpp"
#include "censadd/psi.hpp"
#include "censadd/regression.hpp"
#include "censadd/survival.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace censadd {

struct KernelSpec
{
  std::string family = "epanechnikov";
  int order = 2;
};

//! Everything needed to turn a censored sample into component bands.
struct FitSettings
{
  PsiSpec psi = PsiSpec::indicator(0.9);
  KernelSpec regression_kernel;
  //! defaults to an Epanechnikov-based kernel of the smallest even order
  //! above k d
  std::optional<KernelSpec> density_kernel;

  //! regression bandwidth: either c (rule c n^{-1/(2k+1)}) or an explicit h
  double regression_c = 1.0;
  std::optional<double> regression_h;
  //! multiply the rule by (log n)^{-1/2}; with an explicit h this only
  //! records whether h is meant to be undersmoothed
  bool undersmooth = true;

  //! density bandwidth: either c' (rule c' (log n / n)^{1/(2k'+d)}) or h
  double density_c_prime = 1.0;
  std::optional<double> density_h;

  //! known covariate density for the weights (simulation only); the kernel
  //! estimate is then used for the variance plug-in alone
  std::optional<DensityFunction> covariate_density;
  //! known censoring survival (simulation only); Kaplan-Meier otherwise
  std::optional<SurvivalFunction> censoring_survival;

  //! one density per axis; empty means uniform over the observed range
  std::vector<IntegrationDensity> q;

  std::size_t grid_points = 81;
  double grid_fraction = 0.9;
  //! explicit grids override grid_points / grid_fraction
  std::optional<std::vector<std::vector<double>>> grids;

  QuadratureOptions quadrature;
  QuadratureOptions sigma_quadrature{ .nodes = 48, .panels = 8 };
  bool compute_sigma = true;
  double z = 1.96;
  double density_floor = 1e-12;
};

struct FitMetadata
{
  std::size_t n = 0;
  std::size_t d = 0;
  bool undersmoothed = false;
  //! effective constant h n^{1/(2k+1)}
  double c = 0.0;
  int k = 0;
  int k_prime = 0;
  double z = 1.96;
  std::vector<double> bandwidths;
  double density_bandwidth = 0.0;
  std::string regression_kernel;
  std::string density_kernel;
  std::vector<std::string> q;
  std::string integration;
};

struct FitResult
{
  AdditiveFit fit;
  FitMetadata metadata;
  FitDiagnostics diagnostics;
  //! assumption violations and numerical warnings, including the surface's
  std::vector<std::string> warnings;
  //! conditions that are recorded but never checked
  std::vector<std::string> notes;
  std::optional<StepSurvival> kaplan_meier;
};

//! Kaplan-Meier G, kernel density f, weighted surface, marginal integration
//! and, when requested, plug-in sigma and normal intervals on every grid.
FitResult fit_additive_model(const CensoredSample& sample,
                             const FitSettings& settings,
                             std::size_t threads = 1);

//! Kernel built from a spec.
Kernel1D build_kernel(const KernelSpec& spec);

//! Smallest even order strictly above k d.
int default_density_order(int k, std::size_t d);

} // namespace censadd

#pragma once

#include "censadd/additive.hpp"
#include "censadd/analytic.hpp"
#include "censadd/pipeline.hpp"
#include "censadd/psi.hpp"
#include "censadd/quadrature.hpp"
#include "censadd/survival.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace censadd {

enum class ResponseMechanism
{
  //! Y ~ U(tau0 - p(x), tau0 + 1 - p(x)) so that P(Y <= tau0 | x) = p(x)
  paper_indicator_model,
  //! Y ~ U(mu(x) - w, mu(x) + w), mu(x) = intercept + sum_l m_l(x_l)
  location_model
};

std::string to_string(ResponseMechanism mechanism);
ResponseMechanism response_mechanism_from_string(const std::string& name);

//! Censoring variable C, independent of (X, Y).
class CensoringLaw
{
public:
  static CensoringLaw uniform(double a, double b);
  static CensoringLaw exponential(double rate);

  //! P(C > y)
  double survival(double y) const;
  double sample(std::mt19937_64& rng) const;

  const std::string& name() const { return name_; }
  //! (a, b) for uniform, (rate, 0) for exponential
  double first() const { return first_; }
  double second() const { return second_; }

private:
  std::string name_;
  double first_ = 0.0;
  double second_ = 1.0;
};

struct DgpSpec
{
  std::vector<Interval> covariates;
  std::vector<AnalyticFunction> components;
  ResponseMechanism mechanism = ResponseMechanism::paper_indicator_model;
  double intercept = 0.0;
  //! half-width w of the location model
  double half_width = 0.5;
  CensoringLaw censoring = CensoringLaw::uniform(0.0, 1.0);
  PsiSpec psi = PsiSpec::indicator(0.9);
  std::uint64_t seed = 1;

  std::size_t dim() const { return covariates.size(); }

  //! X ~ U(-1, 1)^2, m1 = 0.5 cos^2, m2 = 0.5 sin^2, C ~ U(0, 1),
  //! psi = 1{y <= 0.9}.
  static DgpSpec paper(std::uint64_t seed = 1);

  //! intercept + sum_l m_l(x_l)
  double additive_index(std::span<const double> x) const;
  //! Throws std::invalid_argument for an inconsistent specification.
  void validate() const;
};

//! E[psi(Y) | X = x]
double true_regression(const DgpSpec& dgp, std::span<const double> x);
//! H(x) = E[psi^2(Y) / G(Y) | X = x]
double true_h(const DgpSpec& dgp, std::span<const double> x);
//! Product of the uniform covariate densities.
double true_covariate_density(const DgpSpec& dgp, std::span<const double> x);

//! Sample of size n drawn from stream `stream` of dgp.seed. Throws
//! std::domain_error when p(x) leaves (0, 1) under the indicator model.
CensoredSample generate(const DgpSpec& dgp, std::size_t n, std::uint64_t stream = 0);

enum class SigmaMode
{
  analytic,
  plugin
};

enum class BiasMode
{
  oracle,
  none
};

std::string to_string(SigmaMode mode);
SigmaMode sigma_mode_from_string(const std::string& name);
std::string to_string(BiasMode mode);
BiasMode bias_mode_from_string(const std::string& name);

struct Probe
{
  std::size_t axis = 0; //!< 0-based
  double x = 0.0;
};

struct StudySettings
{
  FitSettings fit;
  SigmaMode sigma_mode = SigmaMode::analytic;
  BiasMode bias_mode = BiasMode::oracle;
  //! weight with the true covariate density instead of its kernel estimate
  bool known_density = false;
  //! weight with the true censoring survival instead of Kaplan-Meier
  bool known_censoring = false;
  //! q for the true components and the analytic variance; defaults to the
  //! uniform density of each covariate
  std::vector<IntegrationDensity> q;
};

struct ProbeResult
{
  Probe probe;
  double eta_true = 0.0;
  double bias = 0.0;
  double sigma_analytic = 0.0;
  std::vector<double> estimates;
  std::vector<double> sigma_used;
  std::vector<double> statistics;
  double coverage = 0.0;
  double mean_statistic = 0.0;
  double variance_statistic = 0.0;
  double ks_distance = 0.0;
  //! n^{2k/(2k+1)} mean (eta_hat - eta)^2
  double rescaled_mse = 0.0;
  double lag1_autocorrelation = 0.0;
};

struct StudyResult
{
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  double c = 0.0;
  int k = 0;
  //! mean over replicates of the empirical P(delta = 1)
  double event_rate = 0.0;
  std::vector<double> event_rates;
  std::vector<ProbeResult> probes;
};

//! Replicate r uses stream r of dgp.seed, so results do not depend on the
//! thread count. Errors are rethrown with the replicate index.
StudyResult run_study(const DgpSpec& dgp,
                      std::size_t n,
                      std::size_t replicates,
                      const std::vector<Probe>& probes,
                      const StudySettings& settings,
                      std::size_t threads = 1);

//! Kolmogorov-Smirnov distance between the sample and N(0, 1).
double ks_normal_distance(std::vector<double> values);
double lag1_autocorrelation(const std::vector<double>& values);

//! Variance-formula sigma_l(x_l) for a DGP with uniform covariates and known
//! G, with the given regression kernel and constant c.
double analytic_sigma(const DgpSpec& dgp,
                      const std::vector<IntegrationDensity>& q,
                      std::size_t axis,
                      double x,
                      const Kernel1D& kernel,
                      double c);

//! Settings of the published figure: Epanechnikov kernels, h = 0.2,
//! q_j uniform on [-1, 1], 81-point grid on [-0.9, 0.9].
FitSettings figure_settings();

struct FigureTable
{
  FitResult fit;
  std::vector<std::vector<double>> eta_true;
  double event_rate = 0.0;
  std::string csv;
};

FigureTable reproduce_figure(std::size_t n, std::uint64_t seed, std::size_t threads = 1);

} // namespace censadd

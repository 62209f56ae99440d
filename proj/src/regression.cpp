#include "censadd/regression.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace censadd {

double
bandwidth_h2(std::size_t n, double c, int k)
{
  if (n < 1) {
    throw std::invalid_argument("bandwidth_h2: need n >= 1");
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("bandwidth_h2: c must be positive");
  }
  return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * k + 1.0));
}

CensoringSource
CensoringSource::analytic(SurvivalFunction g)
{
  if (!g) {
    throw std::invalid_argument("CensoringSource: empty survival function");
  }
  CensoringSource source;
  source.g_ = std::move(g);
  return source;
}

CovariateDensitySource
CovariateDensitySource::kde(DensityModel model)
{
  CovariateDensitySource source;
  source.model_.emplace(std::move(model));
  return source;
}

CovariateDensitySource
CovariateDensitySource::analytic(DensityFunction f)
{
  if (!f) {
    throw std::invalid_argument("CovariateDensitySource: empty density function");
  }
  CovariateDensitySource source;
  source.f_ = std::move(f);
  return source;
}

RegressionSurface::RegressionSurface(CensoredSample sample, PsiSpec psi)
  : sample_(std::move(sample))
  , psi_(std::move(psi))
{}

RegressionSurface
fit_surface(const CensoredSample& sample,
            const CensoringSource& g_source,
            const CovariateDensitySource& f_source,
            std::vector<Kernel1D> kernels,
            std::vector<double> bandwidths,
            const PsiSpec& psi)
{
  const std::size_t d = sample.dim();
  const std::size_t n = sample.size();
  if (kernels.size() != d || bandwidths.size() != d) {
    throw std::invalid_argument("fit_surface: need one kernel and one bandwidth per covariate");
  }
  for (double h : bandwidths) {
    if (!(h > 0.0)) {
      throw std::invalid_argument("fit_surface: bandwidths must be positive");
    }
  }
  if (!f_source.is_kde() && f_source.function() == nullptr) {
    throw std::invalid_argument("fit_surface: missing covariate density");
  }
  if (f_source.is_kde() && f_source.model().dim() != d) {
    throw std::invalid_argument("fit_surface: density model dimension mismatch");
  }

  RegressionSurface surface(sample, psi);
  surface.kernels_ = std::move(kernels);
  surface.bandwidths_ = std::move(bandwidths);

  SurvivalFunction g;
  if (g_source.is_kaplan_meier()) {
    surface.kaplan_meier_ = fit_censoring_survival(sample);
    const StepSurvival& km = *surface.kaplan_meier_;
    g = [&km](double y) { return km(y); };
  } else {
    g = g_source.function();
  }
  surface.g_at_times_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    surface.g_at_times_[i] = g(sample.z(i));
  }
  surface.synthetic_ = ipcw_response(sample, g, psi, 1);

  const double nn = static_cast<double>(n);
  surface.denominators_.resize(n);
  std::size_t floored = 0;
  if (f_source.is_kde()) {
    const DensityModel& model = f_source.model();
    const std::size_t before = model.floored_count();
    for (std::size_t i = 0; i < n; ++i) {
      surface.denominators_[i] = nn * model.floored(sample.x(i));
    }
    floored = model.floored_count() - before;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double fi = f_source.function()(sample.x(i));
      if (!(fi > 0.0)) {
        throw std::domain_error("fit_surface: known covariate density vanishes at row " +
                                std::to_string(i));
      }
      surface.denominators_[i] = nn * fi;
    }
  }

  surface.points_ = detail::SortedPoints(sample.covariates(), d);

  FitDiagnostics& diag = surface.diagnostics_;
  diag.n = n;
  diag.uncensored_fraction = sample.uncensored_fraction();
  diag.floored_density_count = floored;
  diag.max_synthetic = 0.0;
  for (double s : surface.synthetic_) {
    diag.max_synthetic = std::max(diag.max_synthetic, std::abs(s));
  }
  diag.tau0 = psi.tau0();
  diag.max_time = sample.max_time();
  diag.tau0_below_max_time = psi.tau0() < diag.max_time;
  diag.fully_censored = diag.uncensored_fraction == 0.0;
  if (diag.fully_censored) {
    diag.warnings.emplace_back("fully censored sample: the regression surface is identically zero");
  }
  if (!diag.tau0_below_max_time) {
    std::ostringstream msg;
    msg << "tau0 = " << psi.tau0() << " is not below the largest observed time " << diag.max_time
        << "; psi should vanish beyond a point inside the support of Z";
    diag.warnings.push_back(msg.str());
  }
  if (floored > 0) {
    diag.warnings.push_back("density floor active at " + std::to_string(floored) + " of " +
                            std::to_string(n) + " covariate points");
  }
  return surface;
}

RegressionSurface
RegressionSurface::with_response_power(int power) const
{
  RegressionSurface out = *this;
  out.power_ = power;
  out.synthetic_ = ipcw_response(sample_, std::span<const double>(g_at_times_), psi_, power);
  out.diagnostics_.max_synthetic = 0.0;
  for (double s : out.synthetic_) {
    out.diagnostics_.max_synthetic = std::max(out.diagnostics_.max_synthetic, std::abs(s));
  }
  return out;
}

double
RegressionSurface::weight(std::size_t i, std::span<const double> x) const
{
  if (x.size() != dim()) {
    throw std::invalid_argument("RegressionSurface: evaluation point has the wrong dimension");
  }
  const auto xi = sample_.x(i);
  double w = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) {
    w *= kernels_[a]((x[a] - xi[a]) / bandwidths_[a]) / bandwidths_[a];
  }
  return w / denominators_[i];
}

double
RegressionSurface::operator()(std::span<const double> x) const
{
  const std::size_t d = dim();
  if (x.size() != d) {
    throw std::invalid_argument("RegressionSurface: evaluation point has the wrong dimension");
  }
  // Terms are accumulated in original row order so the result does not
  // depend on the pruning index.
  thread_local std::vector<std::pair<std::size_t, double>> terms;
  terms.clear();
  const auto [first, last] = points_.window(x[0], bandwidths_[0] * kernels_[0].support_radius());
  for (std::size_t k = first; k < last; ++k) {
    const std::size_t i = points_.original_index(k);
    const double s = synthetic_[i];
    if (s == 0.0) {
      continue;
    }
    const auto p = points_.point(k);
    double w = 1.0;
    for (std::size_t a = 0; a < d && w != 0.0; ++a) {
      w *= kernels_[a]((x[a] - p[a]) / bandwidths_[a]) / bandwidths_[a];
    }
    if (w == 0.0) {
      continue;
    }
    terms.emplace_back(i, w * s / denominators_[i]);
  }
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double sum = 0.0;
  for (const auto& term : terms) {
    sum += term.second;
  }
  return sum;
}

double
eval_surface(const RegressionSurface& surface, std::span<const double> x)
{
  return surface(x);
}

} // namespace censadd

#include "censadd/simulate.hpp"

#include "censadd/csv_io.hpp"
#include "censadd/inference.hpp"
#include "censadd/parallel.hpp"
#include "censadd/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace censadd {

std::string
to_string(ResponseMechanism mechanism)
{
  return mechanism == ResponseMechanism::paper_indicator_model ? "paper_indicator_model" : "location_model";
}

ResponseMechanism
response_mechanism_from_string(const std::string& name)
{
  if (name == "paper_indicator_model") {
    return ResponseMechanism::paper_indicator_model;
  }
  if (name == "location_model") {
    return ResponseMechanism::location_model;
  }
  throw std::invalid_argument("unknown response mechanism '" + name + "'");
}

CensoringLaw
CensoringLaw::uniform(double a, double b)
{
  if (!(a >= 0.0 && b > a)) {
    throw std::invalid_argument("uniform censoring needs 0 <= a < b");
  }
  CensoringLaw law;
  law.name_ = "uniform";
  law.first_ = a;
  law.second_ = b;
  return law;
}

CensoringLaw
CensoringLaw::exponential(double rate)
{
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exponential censoring needs a positive rate");
  }
  CensoringLaw law;
  law.name_ = "exponential";
  law.first_ = rate;
  law.second_ = 0.0;
  return law;
}

double
CensoringLaw::survival(double y) const
{
  if (name_ == "uniform") {
    if (y < first_) {
      return 1.0;
    }
    if (y >= second_) {
      return 0.0;
    }
    return (second_ - y) / (second_ - first_);
  }
  return y <= 0.0 ? 1.0 : std::exp(-first_ * y);
}

double
CensoringLaw::sample(std::mt19937_64& rng) const
{
  const double u = unit_uniform(rng);
  if (name_ == "uniform") {
    return first_ + (second_ - first_) * u;
  }
  return -std::log1p(-u) / first_;
}

DgpSpec
DgpSpec::paper(std::uint64_t seed)
{
  DgpSpec dgp;
  dgp.covariates = { { -1.0, 1.0 }, { -1.0, 1.0 } };
  dgp.components = { AnalyticFunction::half_cos_squared(), AnalyticFunction::half_sin_squared() };
  dgp.mechanism = ResponseMechanism::paper_indicator_model;
  dgp.censoring = CensoringLaw::uniform(0.0, 1.0);
  dgp.psi = PsiSpec::indicator(0.9);
  dgp.seed = seed;
  return dgp;
}

double
DgpSpec::additive_index(std::span<const double> x) const
{
  double total = intercept;
  for (std::size_t a = 0; a < components.size(); ++a) {
    total += components[a](x[a]);
  }
  return total;
}

void
DgpSpec::validate() const
{
  if (covariates.empty()) {
    throw std::invalid_argument("dgp: need at least one covariate");
  }
  if (components.size() != covariates.size()) {
    throw std::invalid_argument("dgp: need one component per covariate");
  }
  for (const auto& range : covariates) {
    if (!(range.hi > range.lo)) {
      throw std::invalid_argument("dgp: covariate ranges need lo < hi");
    }
  }
  if (mechanism == ResponseMechanism::location_model && !(half_width > 0.0)) {
    throw std::invalid_argument("dgp: half_width must be positive");
  }
  if (!std::isfinite(psi.tau0())) {
    throw std::invalid_argument("dgp: psi needs a finite tau0");
  }
}

namespace {

// Y | X = x is uniform on [lo, lo + width)
struct ResponseLaw
{
  double lo;
  double width;
};

ResponseLaw
response_law(const DgpSpec& dgp, std::span<const double> x)
{
  const double index = dgp.additive_index(x);
  if (dgp.mechanism == ResponseMechanism::paper_indicator_model) {
    return { dgp.psi.tau0() - index, 1.0 };
  }
  return { index - dgp.half_width, 2.0 * dgp.half_width };
}

// \int_lo^hi fn(y) dy / width, splitting at tau0 and the kinks of G
template<typename Fn>
double
conditional_mean(const DgpSpec& dgp, const ResponseLaw& law, Fn&& fn)
{
  const double lo = law.lo;
  const double hi = std::min(law.lo + law.width, dgp.psi.tau0());
  if (!(hi > lo)) {
    return 0.0;
  }
  std::vector<double> cuts{ lo, hi };
  if (dgp.censoring.name() == "uniform") {
    for (double kink : { dgp.censoring.first(), dgp.censoring.second() }) {
      if (kink > lo && kink < hi) {
        cuts.push_back(kink);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    total += integrate_1d(fn, { cuts[j], cuts[j + 1] }, 4, 32);
  }
  return total / law.width;
}

} // namespace

double
true_regression(const DgpSpec& dgp, std::span<const double> x)
{
  return conditional_mean(dgp, response_law(dgp, x), [&](double y) { return dgp.psi(y); });
}

double
true_h(const DgpSpec& dgp, std::span<const double> x)
{
  const ResponseLaw law = response_law(dgp, x);
  const double top = std::min(law.lo + law.width, dgp.psi.tau0());
  if (top > law.lo && !(dgp.censoring.survival(top) > 0.0)) {
    throw std::domain_error("true_h: censoring survival vanishes where psi is non-zero");
  }
  return conditional_mean(dgp, law, [&](double y) {
    const double v = dgp.psi(y);
    return v == 0.0 ? 0.0 : v * v / dgp.censoring.survival(y);
  });
}

double
true_covariate_density(const DgpSpec& dgp, std::span<const double> x)
{
  double f = 1.0;
  for (std::size_t a = 0; a < dgp.covariates.size(); ++a) {
    const Interval& r = dgp.covariates[a];
    if (!r.contains(x[a])) {
      return 0.0;
    }
    f /= r.length();
  }
  return f;
}

CensoredSample
generate(const DgpSpec& dgp, std::size_t n, std::uint64_t stream)
{
  dgp.validate();
  if (n < 1) {
    throw std::invalid_argument("generate: need n >= 1");
  }
  const std::size_t d = dgp.dim();
  std::mt19937_64 rng = stream_engine(dgp.seed, stream);
  std::vector<double> z(n);
  std::vector<std::uint8_t> delta(n);
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const Interval& r = dgp.covariates[a];
      x[i * d + a] = r.lo + r.length() * unit_uniform(rng);
    }
    const std::span<const double> xi(x.data() + i * d, d);
    if (dgp.mechanism == ResponseMechanism::paper_indicator_model) {
      const double p = dgp.additive_index(xi);
      if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("generate: p(x) = " + std::to_string(p) + " leaves (0, 1) at row " +
                                std::to_string(i));
      }
    }
    const ResponseLaw law = response_law(dgp, xi);
    const double y = law.lo + law.width * unit_uniform(rng);
    if (y < 0.0) {
      throw std::domain_error("generate: negative response at row " + std::to_string(i));
    }
    const double c = dgp.censoring.sample(rng);
    z[i] = std::min(y, c);
    delta[i] = y <= c ? 1 : 0;
  }
  return CensoredSample(std::move(z), std::move(delta), std::move(x), d);
}

std::string
to_string(SigmaMode mode)
{
  return mode == SigmaMode::analytic ? "analytic" : "plugin";
}

SigmaMode
sigma_mode_from_string(const std::string& name)
{
  if (name == "analytic") {
    return SigmaMode::analytic;
  }
  if (name == "plugin") {
    return SigmaMode::plugin;
  }
  throw std::invalid_argument("unknown sigma mode '" + name + "'");
}

std::string
to_string(BiasMode mode)
{
  return mode == BiasMode::oracle ? "oracle" : "none";
}

BiasMode
bias_mode_from_string(const std::string& name)
{
  if (name == "oracle") {
    return BiasMode::oracle;
  }
  if (name == "none") {
    return BiasMode::none;
  }
  throw std::invalid_argument("unknown bias mode '" + name + "'");
}

double
ks_normal_distance(std::vector<double> values)
{
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-values[i] / std::sqrt(2.0));
    distance = std::max(distance, std::max(static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m));
  }
  return distance;
}

double
lag1_autocorrelation(const std::vector<double>& values)
{
  if (values.size() < 3) {
    return 0.0;
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    den += (values[i] - mean) * (values[i] - mean);
    if (i + 1 < values.size()) {
      num += (values[i] - mean) * (values[i + 1] - mean);
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

double
analytic_sigma(const DgpSpec& dgp,
               const std::vector<IntegrationDensity>& q,
               std::size_t axis,
               double x,
               const Kernel1D& kernel,
               double c)
{
  VariancePieces pieces;
  pieces.h = [&](std::span<const double> p) { return true_h(dgp, p); };
  pieces.joint_density = [&](std::span<const double> p) { return true_covariate_density(dgp, p); };
  const double fl = 1.0 / dgp.covariates[axis].length();
  pieces.axis_density = [&, fl](double v) { return dgp.covariates[axis].contains(v) ? fl : 0.0; };
  QuadratureOptions options;
  options.panels = 8;
  const double grid[] = { x };
  return sigma_plugin(pieces, q, axis, kernel, c, grid, options).sigma.front();
}

namespace {

std::vector<IntegrationDensity>
study_densities(const DgpSpec& dgp, const StudySettings& settings)
{
  if (!settings.q.empty()) {
    if (settings.q.size() != dgp.dim()) {
      throw std::invalid_argument("study: need one integration density per covariate");
    }
    return settings.q;
  }
  std::vector<IntegrationDensity> q;
  for (const auto& r : dgp.covariates) {
    q.push_back(IntegrationDensity::uniform(r.lo, r.hi));
  }
  return q;
}

bool
additive_truth(const DgpSpec& dgp)
{
  return dgp.mechanism == ResponseMechanism::paper_indicator_model &&
         dgp.psi.kind() == PsiKind::indicator_leq_tau0;
}

double
sample_variance(const std::vector<double>& v, double mean)
{
  if (v.size() < 2) {
    return 0.0;
  }
  double s = 0.0;
  for (double x : v) {
    s += (x - mean) * (x - mean);
  }
  return s / static_cast<double>(v.size() - 1);
}

} // namespace

StudyResult
run_study(const DgpSpec& dgp,
          std::size_t n,
          std::size_t replicates,
          const std::vector<Probe>& probes,
          const StudySettings& settings,
          std::size_t threads)
{
  dgp.validate();
  if (replicates < 1) {
    throw std::invalid_argument("study: need at least one replicate");
  }
  const std::size_t d = dgp.dim();
  const std::vector<IntegrationDensity> q = study_densities(dgp, settings);
  for (const auto& probe : probes) {
    if (probe.axis >= d) {
      throw std::invalid_argument("study: probe axis " + std::to_string(probe.axis + 1) + " exceeds d = " +
                                  std::to_string(d));
    }
  }

  // Evaluate each replicate at the probe locations only; axes without a
  // probe get the centre of q.
  FitSettings fit = settings.fit;
  fit.q = q;
  fit.compute_sigma = settings.sigma_mode == SigmaMode::plugin;
  if (settings.known_censoring) {
    fit.censoring_survival = [law = dgp.censoring](double y) { return law.survival(y); };
  }
  if (settings.known_density) {
    fit.covariate_density = [dgp](std::span<const double> x) { return true_covariate_density(dgp, x); };
  }
  std::vector<std::vector<double>> grids(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::set<double> points;
    for (const auto& probe : probes) {
      if (probe.axis == a) {
        points.insert(probe.x);
      }
    }
    if (points.empty()) {
      points.insert(0.5 * (q[a].support().lo + q[a].support().hi));
    }
    grids[a].assign(points.begin(), points.end());
  }
  fit.grids = grids;
  auto slot = [&](const Probe& probe) {
    const auto& g = grids[probe.axis];
    return static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), probe.x) - g.begin());
  };

  const std::size_t p = probes.size();
  std::vector<double> estimates(replicates * p, 0.0);
  std::vector<double> sigma_hat(replicates * p, 0.0);
  std::vector<double> event_rates(replicates, 0.0);
  std::vector<FitMetadata> metadata(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const std::string where = "replicate " + std::to_string(r) + ": ";
    try {
      const CensoredSample sample = generate(dgp, n, r);
      event_rates[r] = sample.uncensored_fraction();
      const FitResult result = fit_additive_model(sample, fit, 1);
      metadata[r] = result.metadata;
      for (std::size_t j = 0; j < p; ++j) {
        const ComponentBand& band = result.fit.components[probes[j].axis];
        const std::size_t s = slot(probes[j]);
        estimates[r * p + j] = band.eta_hat[s];
        if (!band.sigma_hat.empty()) {
          sigma_hat[r * p + j] = band.sigma_hat[s];
        }
      }
    } catch (const std::domain_error& e) {
      throw std::domain_error(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  });

  StudyResult result;
  result.n = n;
  result.replicates = replicates;
  result.seed = dgp.seed;
  result.bandwidth = metadata.front().bandwidths.front();
  result.c = metadata.front().c;
  result.k = metadata.front().k;
  result.event_rates = event_rates;
  result.event_rate =
    std::accumulate(event_rates.begin(), event_rates.end(), 0.0) / static_cast<double>(replicates);

  const Kernel1D kernel = build_kernel(fit.regression_kernel);
  const int k = kernel.order();
  const bool oracle = settings.bias_mode == BiasMode::oracle;
  if (oracle && !additive_truth(dgp)) {
    throw std::invalid_argument("study: the bias oracle needs an additive truth (indicator model with an indicator psi)");
  }
  const double rate = convergence_rate(n, k);
  for (std::size_t j = 0; j < p; ++j) {
    const Probe& probe = probes[j];
    ProbeResult pr;
    pr.probe = probe;
    if (additive_truth(dgp)) {
      pr.eta_true = true_component_oracle(dgp.components[probe.axis].value, q[probe.axis])(probe.x);
    } else {
      QuadratureOptions options;
      options.panels = 4;
      const MarginalIntegrator truth([&](std::span<const double> x) { return true_regression(dgp, x); }, q, options);
      pr.eta_true = truth.component(probe.axis, probe.x);
    }
    if (oracle) {
      pr.bias = bias_oracle(dgp.components[probe.axis], q[probe.axis], kernel, result.c, k)(probe.x);
    }
    pr.sigma_analytic = analytic_sigma(dgp, q, probe.axis, probe.x, kernel, result.c);

    double squared_error = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
      const double est = estimates[r * p + j];
      const double sigma = settings.sigma_mode == SigmaMode::plugin ? sigma_hat[r * p + j] : pr.sigma_analytic;
      pr.estimates.push_back(est);
      pr.sigma_used.push_back(sigma);
      pr.statistics.push_back(standardized_stat(est, pr.eta_true, pr.bias, sigma, n, k));
      const double eta_arr[] = { est };
      const double sigma_arr[] = { sigma };
      const ConfidenceBand ci = normal_ci(eta_arr, sigma_arr, n, k, fit.z);
      if (ci.lo[0] <= pr.eta_true && pr.eta_true <= ci.hi[0]) {
        ++covered;
      }
      squared_error += (est - pr.eta_true) * (est - pr.eta_true);
    }
    const double m = static_cast<double>(replicates);
    pr.coverage = static_cast<double>(covered) / m;
    pr.mean_statistic = std::accumulate(pr.statistics.begin(), pr.statistics.end(), 0.0) / m;
    pr.variance_statistic = sample_variance(pr.statistics, pr.mean_statistic);
    pr.ks_distance = ks_normal_distance(pr.statistics);
    pr.rescaled_mse = rate * rate * squared_error / m;
    pr.lag1_autocorrelation = lag1_autocorrelation(pr.statistics);
    result.probes.push_back(std::move(pr));
  }
  return result;
}

FitSettings
figure_settings()
{
  FitSettings settings;
  settings.psi = PsiSpec::indicator(0.9);
  settings.regression_kernel = { "epanechnikov", 2 };
  settings.density_kernel = KernelSpec{ "epanechnikov", 2 };
  settings.regression_h = 0.2;
  settings.undersmooth = false;
  settings.density_h = 0.2;
  settings.q = { IntegrationDensity::uniform(-1.0, 1.0), IntegrationDensity::uniform(-1.0, 1.0) };
  settings.grid_points = 81;
  settings.grid_fraction = 0.9;
  return settings;
}

FigureTable
reproduce_figure(std::size_t n, std::uint64_t seed, std::size_t threads)
{
  const DgpSpec dgp = DgpSpec::paper(seed);
  const CensoredSample sample = generate(dgp, n);
  const FitSettings settings = figure_settings();
  FigureTable table;
  table.event_rate = sample.uncensored_fraction();
  table.fit = fit_additive_model(sample, settings, threads);
  for (auto& band : table.fit.fit.components) {
    const auto eta = true_component_oracle(dgp.components[band.axis].value, settings.q[band.axis]);
    std::vector<double> truth;
    for (double x : band.grid) {
      truth.push_back(eta(x));
    }
    band.eta_true = truth;
    table.eta_true.push_back(std::move(truth));
  }
  std::ostringstream out;
  write_bands_csv(out, table.fit.fit);
  table.csv = out.str();
  return table;
}

} // namespace censadd

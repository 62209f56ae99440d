#include "censadd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace censadd {

using nlohmann::json;

json
load_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void
require_keys(const json& object, const std::vector<std::string>& allowed, const std::string& context)
{
  if (!object.is_object()) {
    throw std::invalid_argument(context + ": expected a JSON object");
  }
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument(context + ": unknown key '" + item.key() + "'");
    }
  }
}

namespace {

template<typename T>
T
get(const json& j, const std::string& key, const std::string& context)
{
  if (!j.contains(key)) {
    throw std::invalid_argument(context + ": missing '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(context + ": '" + key + "' has the wrong type");
  }
}

template<typename T>
T
get_or(const json& j, const std::string& key, T fallback, const std::string& context)
{
  return j.contains(key) ? get<T>(j, key, context) : fallback;
}

std::size_t
get_count(const json& j, const std::string& key, std::size_t fallback, const std::string& context)
{
  if (!j.contains(key)) {
    return fallback;
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(context + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

QuadratureOptions
parse_quadrature(const json& j, QuadratureOptions base, const std::string& context)
{
  require_keys(j,
               { "nodes", "panels", "mc_draws", "mc_seed", "max_tensor_dim", "method", "local_nodes",
                 "local_panels" },
               context);
  base.nodes = get_count(j, "nodes", base.nodes, context);
  base.panels = get_count(j, "panels", base.panels, context);
  base.mc_draws = get_count(j, "mc_draws", base.mc_draws, context);
  base.mc_seed = get_or<std::uint64_t>(j, "mc_seed", base.mc_seed, context);
  base.max_tensor_dim = get_count(j, "max_tensor_dim", base.max_tensor_dim, context);
  base.local_nodes = get_count(j, "local_nodes", base.local_nodes, context);
  base.local_panels = get_count(j, "local_panels", base.local_panels, context);
  if (j.contains("method")) {
    base.method = integration_method_from_string(get<std::string>(j, "method", context));
  }
  if (base.nodes * base.panels < 2 || base.local_nodes * base.local_panels < 2) {
    throw std::invalid_argument(context + ": node counts must be at least 2");
  }
  if (base.mc_draws < 1) {
    throw std::invalid_argument(context + ": mc_draws must be positive");
  }
  return base;
}

AnalyticFunction
parse_component(const json& j)
{
  const std::string context = "component";
  require_keys(j, { "type", "slope", "coefficient", "amplitude", "frequency" }, context);
  const std::string type = get<std::string>(j, "type", context);
  if (type == "zero") {
    return AnalyticFunction::zero();
  }
  if (type == "half_cos_squared") {
    return AnalyticFunction::half_cos_squared();
  }
  if (type == "half_sin_squared") {
    return AnalyticFunction::half_sin_squared();
  }
  if (type == "linear") {
    return AnalyticFunction::linear(get<double>(j, "slope", context));
  }
  if (type == "quadratic") {
    return AnalyticFunction::quadratic(get<double>(j, "coefficient", context));
  }
  if (type == "sine") {
    return AnalyticFunction::sine(get<double>(j, "amplitude", context), get<double>(j, "frequency", context));
  }
  throw std::invalid_argument("component: unknown type '" + type + "'");
}

CensoringLaw
parse_censoring(const json& j)
{
  const std::string context = "censoring";
  require_keys(j, { "type", "a", "b", "rate" }, context);
  const std::string type = get<std::string>(j, "type", context);
  if (type == "uniform") {
    return CensoringLaw::uniform(get<double>(j, "a", context), get<double>(j, "b", context));
  }
  if (type == "exponential") {
    return CensoringLaw::exponential(get<double>(j, "rate", context));
  }
  throw std::invalid_argument("censoring: unknown type '" + type + "'");
}

} // namespace

PsiSpec
parse_psi(const json& j)
{
  const std::string context = "psi";
  require_keys(j, { "kind", "tau0", "bound", "knots", "levels" }, context);
  const PsiKind kind = psi_kind_from_string(get<std::string>(j, "kind", context));
  if (kind == PsiKind::indicator_leq_tau0) {
    return PsiSpec::indicator(get<double>(j, "tau0", context));
  }
  if (kind == PsiKind::identity_truncated_tau0) {
    return PsiSpec::identity_truncated(get<double>(j, "tau0", context));
  }
  // step function: levels[i] on [knots[i], knots[i+1]), zero elsewhere
  const auto knots = get<std::vector<double>>(j, "knots", context);
  const auto levels = get<std::vector<double>>(j, "levels", context);
  if (knots.size() != levels.size() + 1 || levels.empty()) {
    throw std::invalid_argument("psi: need one more knot than levels");
  }
  if (!std::is_sorted(knots.begin(), knots.end()) ||
      std::adjacent_find(knots.begin(), knots.end()) != knots.end()) {
    throw std::invalid_argument("psi: knots must be strictly increasing");
  }
  double bound = 0.0;
  for (double v : levels) {
    bound = std::max(bound, std::abs(v));
  }
  if (j.contains("bound")) {
    const double declared = get<double>(j, "bound", context);
    if (declared < bound) {
      throw std::invalid_argument("psi: bound is smaller than the largest level");
    }
    bound = declared;
  }
  const double tau0 = j.contains("tau0") ? get<double>(j, "tau0", context) : knots.back();
  auto fn = [knots, levels](double y) {
    if (y < knots.front() || y >= knots.back()) {
      return 0.0;
    }
    const auto it = std::upper_bound(knots.begin(), knots.end(), y);
    return levels[static_cast<std::size_t>(it - knots.begin()) - 1];
  };
  return PsiSpec::custom(fn, bound, tau0);
}

KernelSpec
parse_kernel_spec(const json& j)
{
  const std::string context = "kernel";
  require_keys(j, { "family", "order" }, context);
  KernelSpec spec;
  spec.family = get_or<std::string>(j, "family", spec.family, context);
  spec.order = get_or<int>(j, "order", spec.order, context);
  build_kernel(spec);
  return spec;
}

IntegrationDensity
parse_integration_density(const json& j)
{
  const std::string context = "q";
  require_keys(j, { "type", "a", "b", "power" }, context);
  const std::string type = get_or<std::string>(j, "type", "uniform", context);
  const double a = get<double>(j, "a", context);
  const double b = get<double>(j, "b", context);
  if (type == "uniform") {
    return IntegrationDensity::uniform(a, b);
  }
  if (type == "smooth_bump") {
    return IntegrationDensity::smooth_bump(a, b, get_or<int>(j, "power", 3, context));
  }
  throw std::invalid_argument("q: unknown type '" + type + "'");
}

FitSettings
parse_fit_settings(const json& j, std::size_t d, FitSettings base)
{
  const std::string context = "fit";
  require_keys(j,
               { "psi", "regression_kernel", "density_kernel", "regression_bandwidth", "undersmooth",
                 "density_bandwidth", "q", "grid", "quadrature", "sigma_quadrature", "compute_sigma", "z",
                 "density_floor", "seed" },
               context);
  if (j.contains("psi")) {
    base.psi = parse_psi(j.at("psi"));
  }
  if (j.contains("regression_kernel")) {
    base.regression_kernel = parse_kernel_spec(j.at("regression_kernel"));
  }
  if (j.contains("density_kernel")) {
    base.density_kernel = parse_kernel_spec(j.at("density_kernel"));
  }
  if (j.contains("regression_bandwidth")) {
    const json& b = j.at("regression_bandwidth");
    require_keys(b, { "c", "h" }, "regression_bandwidth");
    if (b.contains("c") == b.contains("h")) {
      throw std::invalid_argument("regression_bandwidth: give exactly one of c and h");
    }
    if (b.contains("c")) {
      base.regression_c = get<double>(b, "c", "regression_bandwidth");
      base.regression_h.reset();
    } else {
      base.regression_h = get<double>(b, "h", "regression_bandwidth");
    }
  }
  base.undersmooth = get_or<bool>(j, "undersmooth", base.undersmooth, context);
  if (j.contains("density_bandwidth")) {
    const json& b = j.at("density_bandwidth");
    require_keys(b, { "c_prime", "h" }, "density_bandwidth");
    if (b.contains("c_prime") == b.contains("h")) {
      throw std::invalid_argument("density_bandwidth: give exactly one of c_prime and h");
    }
    if (b.contains("c_prime")) {
      base.density_c_prime = get<double>(b, "c_prime", "density_bandwidth");
      base.density_h.reset();
    } else {
      base.density_h = get<double>(b, "h", "density_bandwidth");
    }
  }
  if (j.contains("q")) {
    const json& q = j.at("q");
    base.q.clear();
    if (q.is_array()) {
      for (const auto& item : q) {
        base.q.push_back(parse_integration_density(item));
      }
      if (base.q.size() != d) {
        throw std::invalid_argument("q: " + std::to_string(base.q.size()) + " densities for d = " +
                                    std::to_string(d));
      }
    } else {
      base.q.assign(d, parse_integration_density(q));
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, { "points", "fraction", "values" }, "grid");
    if (g.contains("values")) {
      if (g.contains("points") || g.contains("fraction")) {
        throw std::invalid_argument("grid: values excludes points and fraction");
      }
      const auto values = get<std::vector<std::vector<double>>>(g, "values", "grid");
      if (values.size() != d) {
        throw std::invalid_argument("grid: " + std::to_string(values.size()) + " grids for d = " +
                                    std::to_string(d));
      }
      base.grids = values;
    } else {
      base.grid_points = get_count(g, "points", base.grid_points, "grid");
      base.grid_fraction = get_or<double>(g, "fraction", base.grid_fraction, "grid");
      base.grids.reset();
    }
  }
  if (j.contains("quadrature")) {
    base.quadrature = parse_quadrature(j.at("quadrature"), base.quadrature, "quadrature");
  }
  if (j.contains("sigma_quadrature")) {
    base.sigma_quadrature = parse_quadrature(j.at("sigma_quadrature"), base.sigma_quadrature, "sigma_quadrature");
  }
  base.compute_sigma = get_or<bool>(j, "compute_sigma", base.compute_sigma, context);
  base.z = get_or<double>(j, "z", base.z, context);
  if (!(base.z >= 0.0)) {
    throw std::invalid_argument("z must be non-negative");
  }
  base.density_floor = get_or<double>(j, "density_floor", base.density_floor, context);
  if (!(base.density_floor >= 0.0)) {
    throw std::invalid_argument("density_floor must be non-negative");
  }
  return base;
}

DgpSpec
parse_dgp(const json& j)
{
  const std::string context = "dgp";
  require_keys(j,
               { "preset", "covariates", "components", "mechanism", "intercept", "half_width", "censoring",
                 "psi", "seed" },
               context);
  DgpSpec dgp;
  if (j.contains("preset")) {
    const std::string preset = get<std::string>(j, "preset", context);
    if (preset != "paper") {
      throw std::invalid_argument("dgp: unknown preset '" + preset + "'");
    }
    dgp = DgpSpec::paper();
  } else if (!j.contains("covariates") || !j.contains("components")) {
    throw std::invalid_argument("dgp: give a preset or both covariates and components");
  }
  if (j.contains("covariates")) {
    dgp.covariates.clear();
    for (const auto& r : get<std::vector<std::vector<double>>>(j, "covariates", context)) {
      if (r.size() != 2) {
        throw std::invalid_argument("dgp: covariate ranges are [lo, hi] pairs");
      }
      dgp.covariates.push_back({ r[0], r[1] });
    }
  }
  if (j.contains("components")) {
    dgp.components.clear();
    for (const auto& c : j.at("components")) {
      dgp.components.push_back(parse_component(c));
    }
  }
  if (j.contains("mechanism")) {
    dgp.mechanism = response_mechanism_from_string(get<std::string>(j, "mechanism", context));
  }
  dgp.intercept = get_or<double>(j, "intercept", dgp.intercept, context);
  dgp.half_width = get_or<double>(j, "half_width", dgp.half_width, context);
  if (j.contains("censoring")) {
    dgp.censoring = parse_censoring(j.at("censoring"));
  }
  if (j.contains("psi")) {
    dgp.psi = parse_psi(j.at("psi"));
  }
  dgp.seed = get_or<std::uint64_t>(j, "seed", dgp.seed, context);
  dgp.validate();
  return dgp;
}

FitSettings
study_default_fit()
{
  FitSettings fit;
  fit.psi = PsiSpec::indicator(0.9);
  fit.regression_kernel = { "epanechnikov", 2 };
  fit.density_kernel = KernelSpec{ "epanechnikov", 2 };
  // h = 0.2 at n = 1000 under both rates
  fit.regression_c = 0.2 * std::pow(1000.0, 0.2);
  fit.undersmooth = false;
  fit.density_c_prime = 0.2 / std::pow(std::log(1000.0) / 1000.0, 1.0 / 6.0);
  fit.q = { IntegrationDensity::uniform(-1.0, 1.0), IntegrationDensity::uniform(-1.0, 1.0) };
  return fit;
}

StudyConfig
parse_study_config(const json& j)
{
  const std::string context = "study";
  require_keys(j, { "dgp", "fit", "n", "replicates", "probes", "sigma_mode", "bias_mode", "covariate_density", "censoring_survival", "seed" }, context);
  StudyConfig config;
  if (j.contains("dgp")) {
    config.dgp = parse_dgp(j.at("dgp"));
  }
  const std::size_t d = config.dgp.dim();
  FitSettings base = study_default_fit();
  if (d != 2) {
    base.q.clear();
  }
  base.psi = config.dgp.psi;
  if (j.contains("fit")) {
    base = parse_fit_settings(j.at("fit"), d, base);
  }
  config.settings.fit = base;
  config.settings.q = base.q;
  config.n = get_count(j, "n", config.n, context);
  config.replicates = get_count(j, "replicates", config.replicates, context);
  if (config.n < 3 || config.replicates < 1) {
    throw std::invalid_argument("study: need n >= 3 and replicates >= 1");
  }
  if (j.contains("probes")) {
    if (!j.at("probes").is_array()) {
      throw std::invalid_argument("study: probes must be a list");
    }
    for (const auto& item : j.at("probes")) {
      require_keys(item, { "axis", "x" }, "probe");
      const auto axis = get<long long>(item, "axis", "probe");
      if (axis < 1 || static_cast<std::size_t>(axis) > d) {
        throw std::invalid_argument("probe: axis must lie in 1.." + std::to_string(d));
      }
      config.probes.push_back({ static_cast<std::size_t>(axis - 1), get<double>(item, "x", "probe") });
    }
  } else {
    config.probes.push_back({ 0, 0.0 });
  }
  if (j.contains("sigma_mode")) {
    config.settings.sigma_mode = sigma_mode_from_string(get<std::string>(j, "sigma_mode", context));
  }
  if (j.contains("bias_mode")) {
    config.settings.bias_mode = bias_mode_from_string(get<std::string>(j, "bias_mode", context));
  }
  if (j.contains("covariate_density")) {
    const std::string mode = get<std::string>(j, "covariate_density", context);
    if (mode != "kde" && mode != "known") {
      throw std::invalid_argument("study: covariate_density must be kde or known");
    }
    config.settings.known_density = mode == "known";
  }
  if (j.contains("censoring_survival")) {
    const std::string mode = get<std::string>(j, "censoring_survival", context);
    if (mode != "kaplan_meier" && mode != "known") {
      throw std::invalid_argument("study: censoring_survival must be kaplan_meier or known");
    }
    config.settings.known_censoring = mode == "known";
  }
  if (j.contains("seed")) {
    config.dgp.seed = get<std::uint64_t>(j, "seed", context);
  }
  return config;
}

json
fit_to_json(const FitResult& result)
{
  const FitMetadata& m = result.metadata;
  const FitDiagnostics& diag = result.diagnostics;
  json out;
  out["metadata"] = { { "undersmoothed", m.undersmoothed },
                      { "c", m.c },
                      { "k", m.k },
                      { "k_prime", m.k_prime },
                      { "z", m.z },
                      { "n", m.n },
                      { "d", m.d },
                      { "bandwidths", m.bandwidths },
                      { "density_bandwidth", m.density_bandwidth },
                      { "regression_kernel", m.regression_kernel },
                      { "density_kernel", m.density_kernel },
                      { "q", m.q },
                      { "integration", m.integration },
                      { "constant", result.fit.constant } };
  out["diagnostics"] = { { "uncensored_fraction", diag.uncensored_fraction },
                         { "censoring_rate", 1.0 - diag.uncensored_fraction },
                         { "floored_density_count", diag.floored_density_count },
                         { "max_synthetic", diag.max_synthetic },
                         { "tau0", diag.tau0 },
                         { "max_time", diag.max_time },
                         { "tau0_below_max_time", diag.tau0_below_max_time },
                         { "fully_censored", diag.fully_censored } };
  out["warnings"] = result.warnings;
  out["notes"] = result.notes;
  if (result.kaplan_meier) {
    out["kaplan_meier"] = { { "jump_times", result.kaplan_meier->jump_times() },
                            { "values", result.kaplan_meier->values() } };
  }
  return out;
}

json
study_to_json(const StudyResult& result)
{
  json out;
  out["n"] = result.n;
  out["replicates"] = result.replicates;
  out["seed"] = result.seed;
  out["bandwidth"] = result.bandwidth;
  out["c"] = result.c;
  out["k"] = result.k;
  out["event_rate"] = result.event_rate;
  out["censoring_rate"] = 1.0 - result.event_rate;
  json probes = json::array();
  for (const auto& p : result.probes) {
    probes.push_back({ { "axis", p.probe.axis + 1 },
                       { "x", p.probe.x },
                       { "eta_true", p.eta_true },
                       { "bias", p.bias },
                       { "sigma_analytic", p.sigma_analytic },
                       { "coverage", p.coverage },
                       { "mean_statistic", p.mean_statistic },
                       { "variance_statistic", p.variance_statistic },
                       { "ks_distance", p.ks_distance },
                       { "rescaled_mse", p.rescaled_mse },
                       { "mse_expansion", p.bias * p.bias + p.sigma_analytic * p.sigma_analytic },
                       { "lag1_autocorrelation", p.lag1_autocorrelation } });
  }
  out["probes"] = probes;
  return out;
}

} // namespace censadd

#include "censadd/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace censadd {

CensoredSample::CensoredSample(std::vector<double> z,
                               std::vector<std::uint8_t> delta,
                               std::vector<double> x,
                               std::size_t d)
  : z_(std::move(z))
  , delta_(std::move(delta))
  , x_(std::move(x))
  , d_(d)
{
  if (z_.empty()) {
    throw std::invalid_argument("CensoredSample: empty sample");
  }
  if (d_ == 0) {
    throw std::invalid_argument("CensoredSample: covariate dimension must be >= 1");
  }
  if (delta_.size() != z_.size() || x_.size() != z_.size() * d_) {
    throw std::invalid_argument("CensoredSample: inconsistent column lengths");
  }
  for (std::size_t i = 0; i < z_.size(); ++i) {
    if (!std::isfinite(z_[i]) || z_[i] < 0.0) {
      throw std::invalid_argument("CensoredSample: row " + std::to_string(i) +
                                  " has a negative or non-finite time");
    }
    if (delta_[i] > 1) {
      throw std::invalid_argument("CensoredSample: row " + std::to_string(i) +
                                  " has delta outside {0, 1}");
    }
  }
  for (double v : x_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("CensoredSample: non-finite covariate");
    }
  }
}

std::vector<double>
CensoredSample::column(std::size_t axis) const
{
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = x(i, axis);
  }
  return out;
}

double
CensoredSample::uncensored_fraction() const
{
  const auto events = std::count(delta_.begin(), delta_.end(), std::uint8_t{ 1 });
  return static_cast<double>(events) / static_cast<double>(size());
}

double
CensoredSample::max_time() const
{
  return *std::max_element(z_.begin(), z_.end());
}

StepSurvival::StepSurvival(std::vector<double> jump_times, std::vector<double> values)
  : jump_times_(std::move(jump_times))
  , values_(std::move(values))
{
  if (jump_times_.size() != values_.size()) {
    throw std::invalid_argument("StepSurvival: size mismatch");
  }
  if (!std::is_sorted(jump_times_.begin(), jump_times_.end())) {
    throw std::invalid_argument("StepSurvival: jump times must be sorted");
  }
}

double
StepSurvival::operator()(double y) const
{
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), y);
  if (it == jump_times_.begin()) {
    return 1.0;
  }
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

double
eval_survival(const StepSurvival& s, double y)
{
  return s(y);
}

StepSurvival
fit_censoring_survival(const CensoredSample& sample)
{
  const std::size_t n = sample.size();
  std::vector<double> sorted = sample.times();
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> censored;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sample.delta(i)) {
      censored.push_back(sample.z(i));
    }
  }
  std::sort(censored.begin(), censored.end());

  std::vector<double> jump_times;
  std::vector<double> values;
  double product = 1.0;
  for (std::size_t k = 0; k < censored.size();) {
    const double t = censored[k];
    // N_n(t) = #{Z_j >= t}
    const auto at_risk = static_cast<double>(
      sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t));
    const double factor = (at_risk - 1.0) / at_risk;
    for (; k < censored.size() && censored[k] == t; ++k) {
      product *= factor;
    }
    jump_times.push_back(t);
    values.push_back(product);
  }
  return StepSurvival(std::move(jump_times), std::move(values));
}

StepSurvival
empirical_z_survival(const CensoredSample& sample)
{
  std::vector<double> sorted = sample.times();
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::vector<double> jump_times;
  std::vector<double> values;
  for (std::size_t k = 0; k < sorted.size();) {
    const double t = sorted[k];
    while (k < sorted.size() && sorted[k] == t) {
      ++k;
    }
    jump_times.push_back(t);
    values.push_back(static_cast<double>(sorted.size() - k) / n);
  }
  return StepSurvival(std::move(jump_times), std::move(values));
}

namespace {

template<typename G>
std::vector<double>
synthetic_responses(const CensoredSample& sample, G&& g_at, const PsiSpec& psi, int power)
{
  if (power != 1 && power != 2) {
    throw std::invalid_argument("ipcw_response: power must be 1 or 2");
  }
  std::vector<double> out(sample.size(), 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!sample.delta(i)) {
      continue;
    }
    const double zi = sample.z(i);
    const double numerator = power == 1 ? psi(zi) : psi(zi) * psi(zi);
    if (numerator == 0.0) {
      continue;
    }
    const double gi = g_at(i);
    if (!(gi > 0.0)) {
      throw std::domain_error("ipcw_response: censoring survival vanishes at the uncensored time of row " +
                              std::to_string(i));
    }
    out[i] = numerator / (power == 1 ? gi : gi * gi);
  }
  return out;
}

} // namespace

std::vector<double>
ipcw_response(const CensoredSample& sample,
              const SurvivalFunction& g,
              const PsiSpec& psi,
              int power)
{
  return synthetic_responses(
    sample, [&](std::size_t i) { return g(sample.z(i)); }, psi, power);
}

std::vector<double>
ipcw_response(const CensoredSample& sample,
              std::span<const double> g_at_times,
              const PsiSpec& psi,
              int power)
{
  if (g_at_times.size() != sample.size()) {
    throw std::invalid_argument("ipcw_response: need one survival value per row");
  }
  return synthetic_responses(
    sample, [&](std::size_t i) { return g_at_times[i]; }, psi, power);
}

} // namespace censadd


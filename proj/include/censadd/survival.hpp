#pragma once

#include "censadd/psi.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace censadd {

//! Observed right-censored sample {(Z_i, delta_i, X_i)}, covariates stored
//! row-major.
class CensoredSample
{
public:
  CensoredSample(std::vector<double> z,
                 std::vector<std::uint8_t> delta,
                 std::vector<double> x,
                 std::size_t d);

  std::size_t size() const { return z_.size(); }
  std::size_t dim() const { return d_; }

  double z(std::size_t i) const { return z_[i]; }
  bool delta(std::size_t i) const { return delta_[i] != 0; }
  std::span<const double> x(std::size_t i) const
  {
    return { x_.data() + i * d_, d_ };
  }
  double x(std::size_t i, std::size_t axis) const { return x_[i * d_ + axis]; }

  const std::vector<double>& times() const { return z_; }
  const std::vector<std::uint8_t>& indicators() const { return delta_; }
  const std::vector<double>& covariates() const { return x_; }
  std::vector<double> column(std::size_t axis) const;

  double uncensored_fraction() const;
  double max_time() const;

private:
  std::vector<double> z_;
  std::vector<std::uint8_t> delta_;
  std::vector<double> x_;
  std::size_t d_;
};

using SurvivalFunction = std::function<double(double)>;

//! Right-continuous, non-increasing step function starting at 1.
//! values[j] holds the value on [jump_times[j], jump_times[j+1]).
class StepSurvival
{
public:
  StepSurvival() = default;
  StepSurvival(std::vector<double> jump_times, std::vector<double> values);

  double operator()(double y) const;

  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values() const { return values_; }

private:
  std::vector<double> jump_times_;
  std::vector<double> values_;
};

//! Kaplan-Meier estimator of the censoring survival G,
//!   G_n(y) = prod_{i : Z_i <= y, delta_i = 0} (N_n(Z_i) - 1) / N_n(Z_i),
//! with N_n(t) = #{j : Z_j >= t}. Each censored observation contributes its
//! own factor, including tied ones.
StepSurvival fit_censoring_survival(const CensoredSample& sample);

double eval_survival(const StepSurvival& s, double y);

//! Empirical survival t -> #{Z_j > t} / n of the observed times.
StepSurvival empirical_z_survival(const CensoredSample& sample);

//! Synthetic responses delta_i psi(Z_i)^power / G(Z_i)^power with 0/0 = 0.
//! Throws std::domain_error if G(Z_i) = 0 for an uncensored row with a
//! non-zero psi(Z_i).
std::vector<double> ipcw_response(const CensoredSample& sample,
                                  const SurvivalFunction& g,
                                  const PsiSpec& psi,
                                  int power);

//! Same, with G already evaluated at every Z_i.
std::vector<double> ipcw_response(const CensoredSample& sample,
                                  std::span<const double> g_at_times,
                                  const PsiSpec& psi,
                                  int power);

} // namespace censadd

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adacomp/network.hpp"
#include "adacomp/overhead.hpp"
#include "adacomp/sir.hpp"

namespace adacomp {

/// Binomial law of the number of COS members among `set_size`.
std::vector<double> cos_count_pmf(double eta, std::size_t set_size);

/// Poisson-binomial law when every member has its own COS fraction.
std::vector<double> cos_count_pmf(std::span<const double> etas);

/// A CCDF on [0, inf) for the rate integral. Beyond the integration
/// horizon the CCDF is assumed to decay at least like x^-tail_exponent.
struct CcdfFunction {
  std::function<double(double)> ccdf;
  double tail_exponent = 1.0;
  std::vector<double> breakpoints;
};

/// Empirical CCDF of SIR samples with a power-law tail fitted to the top
/// decile (Hill estimator). Infinite samples are dropped and counted.
class EmpiricalCcdf {
 public:
  explicit EmpiricalCcdf(std::span<const double> sirs);

  double operator()(double x) const;
  std::span<const double> sorted() const { return sorted_; }
  double tail_exponent() const { return tail_exponent_; }
  std::uint64_t dropped_infinite() const { return dropped_; }

  /// int_0^inf P[SIR >= x] / (ln2 (1 + x)) dx: exact over the sample range
  /// plus the fitted tail beyond the largest sample.
  std::pair<double, double> rate_integral() const;  ///< (value, tail part)

 private:
  std::vector<double> sorted_;
  double tail_exponent_ = 0.0;
  std::uint64_t dropped_ = 0;
};

enum class ThroughputMethod { kMonteCarlo, kBoundLower, kBoundUpper, kCcdfIntegral };

const char* to_string(ThroughputMethod m);

struct ThroughputResult {
  double value = 0.0;  ///< bits/s/Hz
  double standard_error = 0.0;
  ThroughputMethod method = ThroughputMethod::kMonteCarlo;
  std::vector<std::pair<int, double>> mixture;  ///< (v, P[V = v])
  std::uint64_t trials = 0;
  std::uint64_t infinite_events = 0;
  double tail_contribution = 0.0;
  double quadrature_tolerance = 0.0;
};

/// int_0^inf ccdf(x) / (ln2 (1 + x)) dx by adaptive quadrature on
/// [0, X_max] plus the power-law tail, X_max chosen so the tail is below
/// 1e-6. Throws NumericError for an increasing CCDF or a non-integrable
/// tail. Returns (value, tail part).
std::pair<double, double> rate_integral(const CcdfFunction& f);

/// sum_v P[V = v] * rate_integral(ccdf_v) with a binomial P[V = v].
ThroughputResult ergodic_throughput_from_ccdf(std::span<const CcdfFunction> ccdf_per_v, double eta,
                                              std::size_t set_size);

/// Same with empirical CCDFs per v.
ThroughputResult ergodic_throughput_from_ccdf(std::span<const EmpiricalCcdf> ccdf_per_v, double eta,
                                              std::size_t set_size);

/// Mean of log2(1 + SIR) with geometry, fading and overhead states
/// resampled per trial; infinite-SIR trials are excluded and counted.
ThroughputResult ergodic_throughput_mc(const NetworkConfig& config, const DurationModel& model,
                                       const TrialPlan& plan, std::uint64_t seed,
                                       unsigned workers = 1, const SirOptions& options = {});

/// Monte Carlo throughput conditioned on exactly `cos_count` members in
/// COS; the remaining members draw (L, D) conditioned on not being in COS.
ThroughputResult ergodic_throughput_conditional_mc(const NetworkConfig& config,
                                                   const DurationModel& model, int cos_count,
                                                   const TrialPlan& plan, std::uint64_t seed,
                                                   unsigned workers = 1,
                                                   const SirOptions& options = {});

/// Rates of many duration models over one shared set of trial draws.
struct ThroughputSweep {
  std::vector<ThroughputResult> results;  ///< one per model
  ThroughputResult uncoordinated;         ///< same draws, no nulling
  /// rates[m][t]: log2(1 + SIR) of trial t under model m (0 for excluded trials)
  std::vector<std::vector<double>> rates;
  std::vector<std::vector<unsigned char>> excluded;

  /// Mean and standard error of the paired difference a - b.
  std::pair<double, double> paired_difference(std::size_t a, std::size_t b) const;
};

ThroughputSweep throughput_sweep(const NetworkConfig& config, std::span<const DurationModel> models,
                                 const TrialPlan& plan, std::uint64_t seed, unsigned workers = 1,
                                 const SirOptions& options = {});

}  // namespace adacomp

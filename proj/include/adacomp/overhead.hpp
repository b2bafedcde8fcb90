#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "adacomp/rng.hpp"

namespace adacomp {

inline constexpr double kInfiniteWindow = std::numeric_limits<double>::infinity();

/// Overhead-message lifetime: Gamma with shape m and mean mean_ms.
/// Shape 1 is the exponential lifetime.
struct LifetimeSpec {
  double gamma_shape = 1.0;
  double mean_ms = 80.0;

  void validate() const;
  double cdf(double x) const;
  double ccdf(double x) const;
  double pdf(double x) const;
  double quantile(double u) const;
  /// Point beyond which the survival function is below 1e-12.
  double effective_support_end() const;
};

/// Backhaul delay distribution. Every kind supplies its CDF, a quantile
/// sampler, the mean and the running integral of the CDF.
class DelaySpec {
 public:
  enum class Kind { kUniform, kFixed, kExponential, kCustom };

  /// Uniform on [0, max_ms]; max_ms = 0 is a zero delay.
  static DelaySpec uniform(double max_ms);
  static DelaySpec fixed(double delay_ms);
  static DelaySpec exponential(double mean_ms);
  /// Arbitrary law; `support_end` bounds the support (may be +inf).
  static DelaySpec custom(std::function<double(double)> cdf,
                          std::function<double(double)> quantile, double mean_ms,
                          double support_end, std::vector<double> kinks = {});

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;
  /// Integral of the CDF over [0, a].
  double cdf_integral(double a) const;
  /// Points where the CDF has a jump or a kink (quadrature breakpoints).
  std::vector<double> kinks() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::kUniform;
  double param_ = 0.0;
  std::function<double(double)> cdf_;
  std::function<double(double)> quantile_;
  double custom_mean_ = 0.0;
  double support_end_ = 0.0;
  std::vector<double> kinks_;
};

struct DurationModel {
  LifetimeSpec lifetime;
  DelaySpec delay = DelaySpec::uniform(150.0);
  double window_ms = kInfiniteWindow;  ///< +inf disables adaptation

  void validate() const;
};

enum class LinkState { kCos, kStaleActive, kSilent, kNotCoordinated };

const char* to_string(LinkState s);

/// State of a coordinated BS for one message with lifetime L and delay D
/// under waiting window w. Ties resolve towards COS.
LinkState classify(double lifetime_ms, double delay_ms, double window_ms);

/// Interference scaling factor: 1 outside the set, 0 when silent,
/// the quantization scale in COS and 1 when transmitting on stale CSI.
double delta_factor(bool member, LinkState state, int bits, int antennas);

/// P[min(L, w) >= D] for one message.
double cos_probability(const DurationModel& model);
/// P[L < D <= w].
double stale_probability(const DurationModel& model);

/// E[delta] of a coordination-set member (or 1 for non-members).
double expected_delta(const DurationModel& model, int bits, int antennas, bool member = true);

/// Long-run fraction of time spent in COS,
///   eta = E[(min(L, w) - D)^+] / E[L] = mu * int_0^w P[L > x] F_D(x) dx.
double cos_time_fraction(const DurationModel& model);

/// Three-term expansion mu*{int_0^w F^c_L - F^c_L(w)(w F_D(w) - int_0^w F_D)
/// + F_L(w) E[L F_D(L) - int_0^L F_D]}. It treats the stale contribution
/// as unconditional on L <= w and exceeds 1 for large windows; kept for
/// comparison against cos_time_fraction.
double cos_time_fraction_expanded(const DurationModel& model);

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Renewal average sum (min(L_j, w) - D_j)^+ / sum L_j over `blocks`
/// i.i.d. message blocks; stderr from the ratio-estimator delta method.
MonteCarloEstimate cos_time_fraction_mc(const DurationModel& model, std::uint64_t blocks,
                                        RandomStream& rng);

struct WindowOptimum {
  double window_ms = 0.0;
  double objective = 0.0;
  bool at_boundary = false;
};

/// Minimizes expected_delta(w) / cos_time_fraction(w) over [w_lo, w_hi]:
/// 200-point grid scan, then golden-section refinement around the best
/// grid point.
WindowOptimum optimize_window(const DurationModel& model, int bits, int antennas, double w_lo,
                              double w_hi);

}  // namespace adacomp

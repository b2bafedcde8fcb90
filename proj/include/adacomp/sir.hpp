#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adacomp/fading.hpp"
#include "adacomp/network.hpp"
#include "adacomp/overhead.hpp"
#include "adacomp/rng.hpp"

namespace adacomp {

// ---- per-trial randomness --------------------------------------------------

/// One coordination-set member: its path term and the uniforms that fix
/// its fading, lifetime and delay. Keeping the uniforms (not L and D)
/// lets one draw be re-evaluated under any duration model.
struct MemberDraw {
  BsRef ref;
  double path_power = 0.0;  ///< p_k * r^-alpha_k
  double fading = 1.0;      ///< Exp(1) draw shared by every state
  double lifetime_u = 0.5;
  double delay_u = 0.5;
  int bits = 0;
  int antennas = 1;
};

/// Everything random about one SIR evaluation except the overhead state.
struct TrialDraw {
  std::size_t serving_tier = 0;
  int serving_antennas = 1;
  double signal_path = 0.0;    ///< p_{k*} * r_1^-alpha_{k*}
  double serving_gain = 1.0;   ///< Gamma(n_{k*} - |S|, 1)
  double baseline_gain = 1.0;  ///< Gamma(n_{k*}, 1): same BS without nulling
  double background = 0.0;     ///< interference of every non-member BS
  std::vector<MemberDraw> members;
  std::size_t resamples = 0;
};

/// Splits `trials` into geometry draws reused across `fading_per_geometry`
/// consecutive trials.
struct TrialPlan {
  std::uint64_t trials = 1;
  std::uint32_t fading_per_geometry = 1;
};

/// Builds the draw for `realization` using the given fading and overhead
/// streams (in that fixed order).
TrialDraw draw_trial(const NetworkConfig& config, const NetworkRealization& realization,
                     RandomStream& fading, RandomStream& overhead);

/// Trial `index` of the seeded experiment: geometry from stream
/// (seed, index / fading_per_geometry), fading and overhead from (seed, index).
TrialDraw draw_trial(const NetworkConfig& config, std::uint64_t seed, std::uint64_t index,
                     std::uint32_t fading_per_geometry = 1);

/// Sequential generator of draw_trial() results that reuses the cached
/// realization while consecutive trials share a geometry.
class TrialSource {
 public:
  TrialSource(const NetworkConfig& config, std::uint64_t seed, std::uint32_t fading_per_geometry);
  TrialDraw draw(std::uint64_t index);

 private:
  const NetworkConfig& config_;
  std::uint64_t seed_;
  std::uint32_t fading_per_geometry_;
  std::uint64_t cached_geometry_ = ~std::uint64_t{0};
  NetworkRealization realization_;
  std::vector<std::vector<double>> terms_;
};

// ---- SIR ---------------------------------------------------------------------

struct SirSample {
  double sir = 0.0;  ///< +inf when no interference reaches the user
  int cos_count = 0;
  int silent_count = 0;
  int stale_count = 0;
  bool infinite() const;
};

struct SirOptions {
  CosGainModel cos_gain = CosGainModel::kScaledExponential;
};

/// Member states are sampled from (lifetime_u, delay_u) under `model`.
SirSample evaluate_sir(const TrialDraw& draw, const DurationModel& model,
                       const SirOptions& options = {});

/// SIR with each member forced into the given state (size must match).
SirSample evaluate_sir(const TrialDraw& draw, std::span<const LinkState> states,
                       const SirOptions& options = {});

/// Same BS without coordination: full-rank beamforming gain and every
/// member interfering with an independent precoder.
double evaluate_sir_uncoordinated(const TrialDraw& draw);

/// One SIR sample drawn entirely from `rng`.
SirSample simulate_sir(const NetworkConfig& config, const DurationModel& model,
                       RandomStream& rng, const SirOptions& options = {});

/// Seeded batch; sample j equals evaluate_sir(draw_trial(config, seed, j)).
/// Identical for any worker count.
std::vector<SirSample> simulate_sir_batch(const NetworkConfig& config, const DurationModel& model,
                                          const TrialPlan& plan, std::uint64_t seed,
                                          unsigned workers = 1, const SirOptions& options = {});

// ---- empirical CCDF ----------------------------------------------------------

struct CcdfEstimate {
  std::vector<double> thresholds;
  std::vector<double> values;  ///< P[SIR >= beta]
  std::vector<double> standard_errors;
  std::uint64_t trials = 0;
  std::uint64_t infinite_events = 0;
  bool isotonic_adjusted = false;
};

CcdfEstimate ccdf_from_samples(std::span<const SirSample> samples,
                               std::span<const double> thresholds);

CcdfEstimate estimate_ccdf(const NetworkConfig& config, const DurationModel& model,
                           std::span<const double> thresholds, const TrialPlan& plan,
                           std::uint64_t seed, unsigned workers = 1,
                           const SirOptions& options = {});

// ---- analytic building blocks ------------------------------------------------

/// E[(r_1 / r_i)^alpha] for ordered distances of one planar PPP:
/// Gamma(1 + alpha/2) (i-1)! / Gamma(i + alpha/2).
double distance_ratio_moment(int i, double alpha);

/// Cross-tier factor used by the lower bound:
/// (lambda_k pi)^(alpha_k/2) Gamma(1 + alpha_s/2) (i-1)! /
/// ((lambda_s pi)^(alpha_s/2) Gamma(i + alpha_k/2)).
double cross_tier_ratio_moment(int i, double alpha_k, double alpha_star, double lambda_k,
                               double lambda_star);

/// E[r_{1,s}^alpha_s] * E[r_{i,k}^-alpha_k] for two independent PPPs;
/// +inf when i <= alpha_k / 2.
double independent_ppp_ratio_moment(int i, double alpha_k, double alpha_star, double lambda_k,
                                    double lambda_star);

/// sum_k lambda_k (p_k / p_{k*})^(2 / alpha_k).
double equivalent_density(const std::vector<TierParams>& tiers, std::size_t k_star);

struct CoordMember {
  std::size_t tier = 0;
  std::size_t order = 2;  ///< 1-based distance rank within the tier
  double expected_delta = 1.0;
};

struct BoundInputs {
  std::vector<TierParams> tiers;
  std::size_t serving_tier = 0;
  std::size_t coord_set_size = 0;
  std::vector<CoordMember> members;
  int cos_count = 0;
  double series_tol = 1e-10;
  std::size_t series_max_terms = 10000;

  void validate() const;
};

/// Members are the coord_set_size nearest non-serving BSs of the serving
/// tier (ranks 2, 3, ...), each with expected_delta under `model`.
BoundInputs make_bound_inputs(const NetworkConfig& config, std::size_t serving_tier,
                              const DurationModel& model, int cos_count);

struct BoundValue {
  double value = 0.0;
  bool valid = false;
  std::string note;
};

/// Bracketed interference moment of the lower bound (series over all
/// tiers, E[delta] applied per member), i.e. the bound is
/// 1 - beta Gamma(1 + alpha/2) / (n - |S| - 1) * lower_bound_series().
double lower_bound_series(const BoundInputs& inputs);

/// Markov-inequality lower bound on P[SIR >= beta]; invalid when <= 0.
BoundValue ccdf_lower_bound(double beta, const BoundInputs& inputs);

/// Closed-form upper bound. Throws GammaPoleError when alpha_{k*}/2 is an
/// integer; `valid` is false when the Gamma(1 - alpha/2) factor is negative.
BoundValue ccdf_upper_bound(double beta, const BoundInputs& inputs);

}  // namespace adacomp

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "adacomp/rng.hpp"

namespace adacomp {

/// Deployment constants shared by every base station of one tier.
struct TierParams {
  int tier_id = 1;
  double density = 1e-6;  ///< BS per m^2
  double power = 1.0;     ///< transmit power, W
  int antennas = 1;
  double path_loss_exp = 4.0;
  int feedback_bits = 0;  ///< CSI codeword bits used towards this tier

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct NetworkConfig {
  std::vector<TierParams> tiers;
  /// Radius of the simulated disk in m; 0 selects default_sim_radius().
  double sim_radius = 0.0;
  std::size_t coord_set_size = 0;
  /// When set, the user is served by the nearest BS of this tier
  /// instead of the max-average-power rule.
  std::optional<std::size_t> serving_tier;
  /// Adds the mean interference of the PPP beyond sim_radius as a
  /// deterministic term.
  bool far_field_compensation = true;

  void validate() const;
  double resolved_radius() const;
};

/// (tier index, 0-based distance order within the tier).
struct BsRef {
  std::size_t tier = 0;
  std::size_t index = 0;
  friend bool operator==(const BsRef&, const BsRef&) = default;
};

struct NetworkRealization {
  std::vector<std::vector<double>> distances;  ///< per tier, ascending, m
  BsRef serving;
  double serving_distance = 0.0;
  std::vector<BsRef> coord_set;  ///< strongest first
  std::size_t resamples = 0;     ///< empty draws discarded before this one

  std::size_t bs_count() const;
};

/// Long-term average received power p_k * r^-alpha_k.
double average_power(const TierParams& tier, double distance);

/// Mean interference at the origin from tier BSs farther than `radius`
/// (unit-mean fading, no coordination).
double far_field_interference(const std::vector<TierParams>& tiers, double radius);

/// Smallest radius whose far-field mean interference is below
/// `tail_fraction` of the mean interference from beyond the typical
/// inter-site distance 1/sqrt(pi * sum(lambda)).
double default_sim_radius(const std::vector<TierParams>& tiers, double tail_fraction = 1e-3);

/// Draws one PPP snapshot and fills association and coordination set.
NetworkRealization sample_realization(const NetworkConfig& config, RandomStream& rng);

/// Max-average-power association; returns (tier, distance) of B_{1,k*}.
/// Ties go to the lower tier index. Tiers without BSs are skipped.
std::pair<std::size_t, double> associate(const std::vector<std::vector<double>>& distances,
                                         const std::vector<TierParams>& tiers);

/// The `size` non-serving BSs with the largest average received power,
/// strongest first. Ties are broken by tier index, then distance order.
std::vector<BsRef> select_coordination_set(const std::vector<std::vector<double>>& distances,
                                           const std::vector<TierParams>& tiers,
                                           const BsRef& serving, std::size_t size);

}  // namespace adacomp

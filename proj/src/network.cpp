#include "adacomp/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adacomp/errors.hpp"

namespace adacomp {

namespace {

constexpr double kPi = std::numbers::pi;

std::string tier_label(const TierParams& t) { return "tier " + std::to_string(t.tier_id); }

double tail_interference(const TierParams& t, double radius) {
  const double a = t.path_loss_exp;
  return 2.0 * kPi * t.density * t.power * std::pow(radius, 2.0 - a) / (a - 2.0);
}

}  // namespace

void TierParams::validate() const {
  if (!(density > 0.0)) throw ConfigError(tier_label(*this) + ": density must be > 0");
  if (!(power > 0.0)) throw ConfigError(tier_label(*this) + ": power must be > 0");
  if (antennas < 1) throw ConfigError(tier_label(*this) + ": antennas must be >= 1");
  if (!(path_loss_exp > 2.0))
    throw ConfigError(tier_label(*this) + ": path_loss_exp must be > 2");
  if (feedback_bits < 0) throw ConfigError(tier_label(*this) + ": feedback_bits must be >= 0");
}

void NetworkConfig::validate() const {
  if (tiers.empty()) throw ConfigError("network: at least one tier is required");
  for (const auto& t : tiers) t.validate();
  if (sim_radius < 0.0 || !std::isfinite(sim_radius))
    throw ConfigError("network: sim_radius must be finite and >= 0");
  if (serving_tier) {
    if (*serving_tier >= tiers.size()) throw ConfigError("network: serving_tier out of range");
    if (coord_set_size >= static_cast<std::size_t>(tiers[*serving_tier].antennas))
      throw ConfigError("network: coord_set_size must be below the serving tier's antennas "
                        "(zero-forcing infeasible)");
  }
}

double NetworkConfig::resolved_radius() const {
  return sim_radius > 0.0 ? sim_radius : default_sim_radius(tiers);
}

std::size_t NetworkRealization::bs_count() const {
  std::size_t n = 0;
  for (const auto& d : distances) n += d.size();
  return n;
}

double average_power(const TierParams& tier, double distance) {
  return tier.power * std::pow(distance, -tier.path_loss_exp);
}

double far_field_interference(const std::vector<TierParams>& tiers, double radius) {
  double total = 0.0;
  for (const auto& t : tiers) total += tail_interference(t, radius);
  return total;
}

double default_sim_radius(const std::vector<TierParams>& tiers, double tail_fraction) {
  if (tiers.empty()) throw ConfigError("network: at least one tier is required");
  double density = 0.0;
  for (const auto& t : tiers) density += t.density;
  const double spacing = 1.0 / std::sqrt(kPi * density);
  const double target = tail_fraction * far_field_interference(tiers, spacing);
  // far_field_interference is strictly decreasing in the radius.
  double lo = spacing;
  double hi = spacing;
  while (far_field_interference(tiers, hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (far_field_interference(tiers, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

std::pair<std::size_t, double> associate(const std::vector<std::vector<double>>& distances,
                                         const std::vector<TierParams>& tiers) {
  std::optional<std::size_t> best;
  double best_power = 0.0;
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    if (distances[k].empty()) continue;
    const double p = average_power(tiers[k], distances[k].front());
    if (!best || p > best_power) {
      best = k;
      best_power = p;
    }
  }
  if (!best) throw NumericError("associate: realization contains no base station");
  return {*best, distances[*best].front()};
}

std::vector<BsRef> select_coordination_set(const std::vector<std::vector<double>>& distances,
                                           const std::vector<TierParams>& tiers,
                                           const BsRef& serving, std::size_t size) {
  if (size == 0) return {};
  struct Candidate {
    double power;
    BsRef ref;
  };
  // Within a tier power falls with distance, so only the first size+1
  // entries of each tier can make the cut.
  std::vector<Candidate> pool;
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    const std::size_t take = std::min(distances[k].size(), size + 1);
    for (std::size_t i = 0; i < take; ++i) {
      const BsRef ref{k, i};
      if (ref == serving) continue;
      pool.push_back({average_power(tiers[k], distances[k][i]), ref});
    }
  }
  if (pool.size() < size)
    throw ConfigError("coordination set of size " + std::to_string(size) + " exceeds the " +
                      std::to_string(pool.size()) + " available interferers");
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size), pool.end(),
                    [](const Candidate& a, const Candidate& b) {
                      if (a.power != b.power) return a.power > b.power;
                      if (a.ref.tier != b.ref.tier) return a.ref.tier < b.ref.tier;
                      return a.ref.index < b.ref.index;
                    });
  std::vector<BsRef> out;
  out.reserve(size);
  for (std::size_t j = 0; j < size; ++j) out.push_back(pool[j].ref);
  return out;
}

NetworkRealization sample_realization(const NetworkConfig& config, RandomStream& rng) {
  const double radius = config.resolved_radius();
  NetworkRealization real;
  real.distances.resize(config.tiers.size());
  for (;;) {
    std::size_t total = 0;
    for (std::size_t k = 0; k < config.tiers.size(); ++k) {
      // Arrival times of a unit-rate Poisson process mapped through
      // pi*lambda*r^2 give the ordered distances of the planar PPP.
      auto& d = real.distances[k];
      d.clear();
      const double scale = 1.0 / (kPi * config.tiers[k].density);
      double arrival = rng.exponential();
      for (double r = std::sqrt(arrival * scale); r <= radius; r = std::sqrt(arrival * scale)) {
        d.push_back(r);
        arrival += rng.exponential();
      }
      total += d.size();
    }
    const bool forced_tier_empty =
        config.serving_tier && real.distances[*config.serving_tier].empty();
    if (total > config.coord_set_size && !forced_tier_empty) break;
    ++real.resamples;
  }

  std::size_t k_star = 0;
  if (config.serving_tier) {
    k_star = *config.serving_tier;
  } else {
    k_star = associate(real.distances, config.tiers).first;
  }
  if (config.coord_set_size >= static_cast<std::size_t>(config.tiers[k_star].antennas))
    throw ConfigError("serving tier " + std::to_string(config.tiers[k_star].tier_id) + " has " +
                      std::to_string(config.tiers[k_star].antennas) +
                      " antennas; cannot null " + std::to_string(config.coord_set_size) +
                      " coordinated BSs");
  real.serving = {k_star, 0};
  real.serving_distance = real.distances[k_star].front();
  real.coord_set =
      select_coordination_set(real.distances, config.tiers, real.serving, config.coord_set_size);
  return real;
}

}  // namespace adacomp

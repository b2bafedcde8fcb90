#include "adacomp/sir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adacomp/errors.hpp"
#include "adacomp/parallel.hpp"

namespace adacomp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double path_gain(double distance, double alpha) {
  if (alpha == 4.0) {
    const double r2 = distance * distance;
    return 1.0 / (r2 * r2);
  }
  return std::pow(distance, -alpha);
}

double member_interference(const MemberDraw& m, LinkState state, const SirOptions& options) {
  switch (state) {
    case LinkState::kSilent:
      return 0.0;
    case LinkState::kCos: {
      const double scale = quantization_scale(m.bits, m.antennas);
      const double gain =
          options.cos_gain == CosGainModel::kScaledExponential ? scale * m.fading : scale;
      return m.path_power * gain;
    }
    case LinkState::kStaleActive:
    case LinkState::kNotCoordinated:
      return m.path_power * m.fading;
  }
  return 0.0;
}

SirSample finish(const TrialDraw& draw, double interference, SirSample s) {
  const double signal = draw.serving_gain * draw.signal_path;
  s.sir = interference > 0.0 ? signal / interference : kInf;
  return s;
}

double log_ratio_gamma(int i, double a) { return std::lgamma(static_cast<double>(i)) - std::lgamma(i + a); }

// sum_{i >= from} Gamma(i) / Gamma(i + a) for a > 1 (telescoping identity).
double ratio_tail(int from, double a) {
  return std::exp(std::lgamma(static_cast<double>(from)) - std::lgamma(from + a - 1.0)) / (a - 1.0);
}

// sum_{i >= first} d_i Gamma(i)/Gamma(i+a) where d_i = 1 except at members.
double tier_series(const BoundInputs& in, std::size_t tier, int first, double a) {
  if (!(a > 1.0)) throw NumericError("bound series diverges: path-loss exponent must exceed 2");
  std::vector<const CoordMember*> own;
  int last_member = first;
  for (const auto& m : in.members)
    if (m.tier == tier && static_cast<int>(m.order) >= first) {
      own.push_back(&m);
      last_member = std::max(last_member, static_cast<int>(m.order));
    }
  auto delta_at = [&](int i) {
    double d = 1.0;
    for (const auto* m : own)
      if (static_cast<int>(m->order) == i) d = m->expected_delta;
    return d;
  };
  // Explicit terms until every member is covered and the next term is
  // negligible; the unit-delta remainder is then added in closed form.
  double partial = 0.0;
  int i = first;
  for (std::size_t n = 0;; ++i, ++n) {
    const double term = std::exp(log_ratio_gamma(i, a));
    if (i > last_member && term < in.series_tol * partial) break;
    if (n >= in.series_max_terms) {
      if (i <= last_member) throw NumericError("bound series: member rank beyond series_max_terms");
      break;
    }
    partial += delta_at(i) * term;
  }
  return partial + ratio_tail(i, a);
}

}  // namespace

// ---- draws -------------------------------------------------------------------

bool SirSample::infinite() const { return std::isinf(sir); }

namespace {

// p_k r^-alpha_k for every sampled BS.
std::vector<std::vector<double>> path_terms(const NetworkConfig& config,
                                            const NetworkRealization& realization) {
  std::vector<std::vector<double>> terms(config.tiers.size());
  for (std::size_t k = 0; k < config.tiers.size(); ++k) {
    const auto& t = config.tiers[k];
    for (double r : realization.distances[k]) terms[k].push_back(t.power * path_gain(r, t.path_loss_exp));
  }
  return terms;
}

TrialDraw draw_with_terms(const NetworkConfig& config, const NetworkRealization& realization,
                          const std::vector<std::vector<double>>& terms, RandomStream& fading,
                          RandomStream& overhead) {
  const auto k_star = realization.serving.tier;
  const auto& serving = config.tiers[k_star];
  TrialDraw d;
  d.serving_tier = k_star;
  d.serving_antennas = serving.antennas;
  d.signal_path = terms[k_star][0];
  d.serving_gain = serving_gain(serving.antennas, realization.coord_set.size(), fading).value;
  d.baseline_gain = fading.gamma(static_cast<double>(serving.antennas));
  d.resamples = realization.resamples;

  d.members.resize(realization.coord_set.size());
  for (std::size_t j = 0; j < d.members.size(); ++j) {
    const auto& ref = realization.coord_set[j];
    auto& m = d.members[j];
    m.ref = ref;
    m.bits = config.tiers[ref.tier].feedback_bits;
    m.antennas = config.tiers[ref.tier].antennas;
    m.lifetime_u = overhead.uniform();
    m.delay_u = overhead.uniform();
  }

  double background = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& tier_terms = terms[k];
    for (std::size_t i = 0; i < tier_terms.size(); ++i) {
      if (k == k_star && i == 0) continue;
      const double g = fading.exponential();
      bool member = false;
      for (auto& m : d.members)
        if (m.ref.tier == k && m.ref.index == i) {
          m.path_power = tier_terms[i];
          m.fading = g;
          member = true;
        }
      if (!member) background += tier_terms[i] * g;
    }
  }
  if (config.far_field_compensation)
    background += far_field_interference(config.tiers, config.resolved_radius());
  d.background = background;
  return d;
}

}  // namespace

TrialDraw draw_trial(const NetworkConfig& config, const NetworkRealization& realization,
                     RandomStream& fading, RandomStream& overhead) {
  return draw_with_terms(config, realization, path_terms(config, realization), fading, overhead);
}

TrialDraw draw_trial(const NetworkConfig& config, std::uint64_t seed, std::uint64_t index,
                     std::uint32_t fading_per_geometry) {
  TrialSource source(config, seed, fading_per_geometry);
  return source.draw(index);
}

TrialSource::TrialSource(const NetworkConfig& config, std::uint64_t seed,
                         std::uint32_t fading_per_geometry)
    : config_(config), seed_(seed), fading_per_geometry_(std::max(1u, fading_per_geometry)) {}

TrialDraw TrialSource::draw(std::uint64_t index) {
  const std::uint64_t geometry = index / fading_per_geometry_;
  if (geometry != cached_geometry_) {
    RandomStream geo(seed_, geometry, StreamTag::kGeometry);
    realization_ = sample_realization(config_, geo);
    terms_ = path_terms(config_, realization_);
    cached_geometry_ = geometry;
  }
  RandomStream fading(seed_, index, StreamTag::kFading);
  RandomStream overhead(seed_, index, StreamTag::kOverhead);
  return draw_with_terms(config_, realization_, terms_, fading, overhead);
}

// ---- SIR ---------------------------------------------------------------------

SirSample evaluate_sir(const TrialDraw& draw, const DurationModel& model,
                       const SirOptions& options) {
  SirSample s;
  double interference = draw.background;
  for (const auto& m : draw.members) {
    const double l = model.lifetime.quantile(m.lifetime_u);
    const double d = model.delay.quantile(m.delay_u);
    const auto state = classify(l, d, model.window_ms);
    if (state == LinkState::kCos) ++s.cos_count;
    if (state == LinkState::kSilent) ++s.silent_count;
    if (state == LinkState::kStaleActive) ++s.stale_count;
    interference += member_interference(m, state, options);
  }
  return finish(draw, interference, s);
}

SirSample evaluate_sir(const TrialDraw& draw, std::span<const LinkState> states,
                       const SirOptions& options) {
  if (states.size() != draw.members.size())
    throw ConfigError("evaluate_sir: one state per coordination-set member required");
  SirSample s;
  double interference = draw.background;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j] == LinkState::kCos) ++s.cos_count;
    if (states[j] == LinkState::kSilent) ++s.silent_count;
    if (states[j] == LinkState::kStaleActive) ++s.stale_count;
    interference += member_interference(draw.members[j], states[j], options);
  }
  return finish(draw, interference, s);
}

double evaluate_sir_uncoordinated(const TrialDraw& draw) {
  double interference = draw.background;
  for (const auto& m : draw.members) interference += m.path_power * m.fading;
  const double signal = draw.baseline_gain * draw.signal_path;
  return interference > 0.0 ? signal / interference : kInf;
}

SirSample simulate_sir(const NetworkConfig& config, const DurationModel& model, RandomStream& rng,
                       const SirOptions& options) {
  const auto realization = sample_realization(config, rng);
  const auto draw = draw_trial(config, realization, rng, rng);
  return evaluate_sir(draw, model, options);
}

std::vector<SirSample> simulate_sir_batch(const NetworkConfig& config, const DurationModel& model,
                                          const TrialPlan& plan, std::uint64_t seed,
                                          unsigned workers, const SirOptions& options) {
  config.validate();
  model.validate();
  const std::uint32_t fpg = std::max(1u, plan.fading_per_geometry);
  const std::uint64_t geometries = (plan.trials + fpg - 1) / fpg;
  std::vector<SirSample> out(plan.trials);
  parallel_for(geometries, workers, [&](std::size_t g0, std::size_t g1) {
    TrialSource source(config, seed, fpg);
    for (std::uint64_t t = g0 * fpg; t < std::min<std::uint64_t>(g1 * fpg, plan.trials); ++t)
      out[t] = evaluate_sir(source.draw(t), model, options);
  });
  return out;
}

// ---- CCDF --------------------------------------------------------------------

CcdfEstimate ccdf_from_samples(std::span<const SirSample> samples,
                               std::span<const double> thresholds) {
  if (samples.empty()) throw ConfigError("ccdf: at least one sample required");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ConfigError("ccdf: thresholds must be ascending");
  CcdfEstimate est;
  est.thresholds.assign(thresholds.begin(), thresholds.end());
  est.trials = samples.size();
  std::vector<double> sirs;
  sirs.reserve(samples.size());
  for (const auto& s : samples) {
    sirs.push_back(s.sir);
    if (s.infinite()) ++est.infinite_events;
  }
  std::sort(sirs.begin(), sirs.end());
  const double n = static_cast<double>(sirs.size());
  for (double beta : thresholds) {
    const auto below = std::lower_bound(sirs.begin(), sirs.end(), beta) - sirs.begin();
    const double p = (n - static_cast<double>(below)) / n;
    est.values.push_back(p);
    est.standard_errors.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  // Counts over one sample set are already monotone; enforce it anyway.
  for (std::size_t j = 1; j < est.values.size(); ++j)
    if (est.values[j] > est.values[j - 1]) {
      est.values[j] = est.values[j - 1];
      est.isotonic_adjusted = true;
    }
  return est;
}

CcdfEstimate estimate_ccdf(const NetworkConfig& config, const DurationModel& model,
                           std::span<const double> thresholds, const TrialPlan& plan,
                           std::uint64_t seed, unsigned workers, const SirOptions& options) {
  if (plan.trials < 1) throw ConfigError("estimate_ccdf: trials must be >= 1");
  const auto samples = simulate_sir_batch(config, model, plan, seed, workers, options);
  return ccdf_from_samples(samples, thresholds);
}

// ---- analytic pieces ---------------------------------------------------------

double distance_ratio_moment(int i, double alpha) {
  if (i < 2) throw ConfigError("distance_ratio_moment: order must be >= 2");
  if (!(alpha > 2.0)) throw ConfigError("distance_ratio_moment: alpha must exceed 2");
  const double a = alpha / 2.0;
  if (i + a < 150.0) return std::tgamma(1.0 + a) * std::tgamma(static_cast<double>(i)) / std::tgamma(i + a);
  return std::exp(std::lgamma(1.0 + a) + log_ratio_gamma(i, a));
}

double cross_tier_ratio_moment(int i, double alpha_k, double alpha_star, double lambda_k,
                               double lambda_star) {
  if (i < 1) throw ConfigError("cross_tier_ratio_moment: order must be >= 1");
  if (!(alpha_k > 2.0) || !(alpha_star > 2.0))
    throw ConfigError("cross_tier_ratio_moment: exponents must exceed 2");
  const double log_value = 0.5 * alpha_k * std::log(lambda_k * kPi) -
                           0.5 * alpha_star * std::log(lambda_star * kPi) +
                           std::lgamma(1.0 + alpha_star / 2.0) + log_ratio_gamma(i, alpha_k / 2.0);
  return std::exp(log_value);
}

double independent_ppp_ratio_moment(int i, double alpha_k, double alpha_star, double lambda_k,
                                    double lambda_star) {
  if (i < 1) throw ConfigError("independent_ppp_ratio_moment: order must be >= 1");
  if (static_cast<double>(i) <= alpha_k / 2.0) return kInf;
  const double log_value = 0.5 * alpha_k * std::log(lambda_k * kPi) -
                           0.5 * alpha_star * std::log(lambda_star * kPi) +
                           std::lgamma(1.0 + alpha_star / 2.0) + std::lgamma(i - alpha_k / 2.0) -
                           std::lgamma(static_cast<double>(i));
  return std::exp(log_value);
}

double equivalent_density(const std::vector<TierParams>& tiers, std::size_t k_star) {
  if (k_star >= tiers.size()) throw ConfigError("equivalent_density: tier index out of range");
  const double p_star = tiers[k_star].power;
  double total = 0.0;
  for (const auto& t : tiers) total += t.density * std::pow(t.power / p_star, 2.0 / t.path_loss_exp);
  return total;
}

void BoundInputs::validate() const {
  if (tiers.empty()) throw ConfigError("bounds: no tiers");
  for (const auto& t : tiers) t.validate();
  if (serving_tier >= tiers.size()) throw ConfigError("bounds: serving tier out of range");
  if (!(series_tol > 0.0)) throw ConfigError("bounds: series_tol must be > 0");
  if (cos_count < 0 || static_cast<std::size_t>(cos_count) > coord_set_size)
    throw ConfigError("bounds: cos_count must lie in [0, |S|]");
  for (const auto& m : members) {
    if (m.tier >= tiers.size() || m.order < 1 || (m.tier == serving_tier && m.order < 2))
      throw ConfigError("bounds: invalid coordination member reference");
    if (!(m.expected_delta >= 0.0 && m.expected_delta <= 1.0))
      throw ConfigError("bounds: member expected_delta must lie in [0, 1]");
  }
}

BoundInputs make_bound_inputs(const NetworkConfig& config, std::size_t serving_tier,
                              const DurationModel& model, int cos_count) {
  BoundInputs in;
  in.tiers = config.tiers;
  in.serving_tier = serving_tier;
  in.coord_set_size = config.coord_set_size;
  in.cos_count = cos_count;
  const auto& t = config.tiers.at(serving_tier);
  for (std::size_t j = 0; j < config.coord_set_size; ++j)
    in.members.push_back({serving_tier, j + 2, expected_delta(model, t.feedback_bits, t.antennas)});
  in.validate();
  return in;
}

double lower_bound_series(const BoundInputs& in) {
  in.validate();
  const auto& s = in.tiers[in.serving_tier];
  double total = tier_series(in, in.serving_tier, 2, s.path_loss_exp / 2.0);
  for (std::size_t k = 0; k < in.tiers.size(); ++k) {
    if (k == in.serving_tier) continue;
    const auto& t = in.tiers[k];
    // cross_tier_ratio_moment without its Gamma(1 + alpha_s/2) factor,
    // which the bound applies once in front.
    const double prefactor = std::exp(0.5 * t.path_loss_exp * std::log(t.density * kPi) -
                                      0.5 * s.path_loss_exp * std::log(s.density * kPi));
    total += (t.power / s.power) * prefactor * tier_series(in, k, 1, t.path_loss_exp / 2.0);
  }
  return total;
}

BoundValue ccdf_lower_bound(double beta, const BoundInputs& in) {
  if (!(beta >= 0.0)) throw ConfigError("ccdf_lower_bound: beta must be >= 0");
  const auto& s = in.tiers.at(in.serving_tier);
  const int dof = s.antennas - static_cast<int>(in.coord_set_size) - 1;
  if (dof < 1)
    throw NumericError("ccdf_lower_bound: needs n - |S| - 1 >= 1 for a finite E[1/G]");
  const double slope = std::tgamma(1.0 + s.path_loss_exp / 2.0) * lower_bound_series(in) / dof;
  BoundValue b;
  b.value = 1.0 - beta * slope;
  b.valid = b.value > 0.0;
  if (!b.valid) b.note = "vacuous";
  return b;
}

BoundValue ccdf_upper_bound(double beta, const BoundInputs& in) {
  if (!(beta >= 0.0)) throw ConfigError("ccdf_upper_bound: beta must be >= 0");
  in.validate();
  const auto& s = in.tiers[in.serving_tier];
  const double half = s.path_loss_exp / 2.0;
  if (half == std::floor(half))
    throw GammaPoleError("ccdf_upper_bound: Gamma(1 - alpha/2) has a pole at alpha = " +
                         std::to_string(s.path_loss_exp) +
                         " for the serving tier; use a non-even-integer path-loss exponent "
                         "or rely on the lower bound");
  const double gamma_factor = std::tgamma(1.0 - half);
  if (beta == 0.0) return {1.0, gamma_factor > 0.0, gamma_factor > 0.0 ? "" : "negative-gamma"};

  double alpha_max = 0.0;
  for (const auto& t : in.tiers) alpha_max = std::max(alpha_max, t.path_loss_exp);
  double delta_min = 1.0;
  for (const auto& m : in.members)
    if (m.tier == in.serving_tier) delta_min = std::min(delta_min, m.expected_delta);

  const double m = static_cast<double>(in.cos_count);
  const double mix =
      std::pow(3.0, -alpha_max) * delta_min + std::pow(2.0 * m + 3.0, -alpha_max) * (1.0 - delta_min);
  const double dof = static_cast<double>(s.antennas) - static_cast<double>(in.coord_set_size);
  const double x = beta * mix / (dof * gamma_factor);
  if (!(x > 0.0)) return {std::nan(""), false, "negative-gamma"};
  const double lambda = equivalent_density(in.tiers, in.serving_tier);
  const double exponent = std::pow(kPi * lambda, 1.0 - s.path_loss_exp / alpha_max) *
                          std::tgamma(1.0 + 2.0 / alpha_max) * std::pow(x, 2.0 / alpha_max);
  return {std::exp(-exponent), true, ""};
}

}  // namespace adacomp

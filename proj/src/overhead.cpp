#include "adacomp/overhead.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "adacomp/errors.hpp"
#include "adacomp/fading.hpp"
#include "adacomp/quadrature.hpp"

namespace adacomp {

namespace {

constexpr double kQuadTol = 1e-8;
constexpr double kTailProbability = 1e-12;

double scale_of(const LifetimeSpec& l) { return l.mean_ms / l.gamma_shape; }

// Upper integration limit for integrals weighted by the lifetime law.
double lifetime_limit(const DurationModel& m) {
  return std::min(m.window_ms, m.lifetime.effective_support_end());
}

std::vector<double> breakpoints(const DurationModel& m) {
  auto k = m.delay.kinks();
  if (std::isfinite(m.window_ms)) k.push_back(m.window_ms);
  return k;
}

// J(w) = int_0^w f_L(x) F_D(x) dx = P[D <= L, L <= w].
double joint_below(const DurationModel& m) {
  const double hi = lifetime_limit(m);
  return integrate([&](double x) { return m.lifetime.pdf(x) * m.delay.cdf(x); }, 0.0, hi,
                   m.delay.kinks(), kQuadTol)
      .value;
}

double window_cdf_lifetime(const DurationModel& m) {
  return std::isfinite(m.window_ms) ? m.lifetime.cdf(m.window_ms) : 1.0;
}

double window_cdf_delay(const DurationModel& m) {
  return std::isfinite(m.window_ms) ? m.delay.cdf(m.window_ms) : 1.0;
}

}  // namespace

// ---- LifetimeSpec ----------------------------------------------------------

void LifetimeSpec::validate() const {
  if (!(gamma_shape >= 1.0) || !std::isfinite(gamma_shape))
    throw ConfigError("lifetime: gamma_shape must be finite and >= 1");
  if (!(mean_ms > 0.0) || !std::isfinite(mean_ms))
    throw ConfigError("lifetime: mean_lifetime_ms must be > 0");
}

double LifetimeSpec::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  return boost::math::gamma_p(gamma_shape, x / scale_of(*this));
}

double LifetimeSpec::ccdf(double x) const {
  if (x <= 0.0) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  return boost::math::gamma_q(gamma_shape, x / scale_of(*this));
}

double LifetimeSpec::pdf(double x) const {
  if (x < 0.0 || !std::isfinite(x)) return 0.0;
  const double s = scale_of(*this);
  if (gamma_shape == 1.0) return std::exp(-x / s) / s;
  return boost::math::gamma_p_derivative(gamma_shape, x / s) / s;
}

double LifetimeSpec::quantile(double u) const {
  if (gamma_shape == 1.0) return -mean_ms * std::log1p(-u);
  return boost::math::gamma_p_inv(gamma_shape, u) * scale_of(*this);
}

double LifetimeSpec::effective_support_end() const {
  return boost::math::gamma_q_inv(gamma_shape, kTailProbability) * scale_of(*this);
}

// ---- DelaySpec -------------------------------------------------------------

DelaySpec DelaySpec::uniform(double max_ms) {
  if (!(max_ms >= 0.0) || !std::isfinite(max_ms))
    throw ConfigError("delay: max_delay_ms must be finite and >= 0");
  DelaySpec d;
  d.kind_ = Kind::kUniform;
  d.param_ = max_ms;
  return d;
}

DelaySpec DelaySpec::fixed(double delay_ms) {
  if (!(delay_ms >= 0.0) || !std::isfinite(delay_ms))
    throw ConfigError("delay: fixed delay must be finite and >= 0");
  DelaySpec d;
  d.kind_ = Kind::kFixed;
  d.param_ = delay_ms;
  return d;
}

DelaySpec DelaySpec::exponential(double mean_ms) {
  if (!(mean_ms > 0.0) || !std::isfinite(mean_ms))
    throw ConfigError("delay: exponential mean must be > 0");
  DelaySpec d;
  d.kind_ = Kind::kExponential;
  d.param_ = mean_ms;
  return d;
}

DelaySpec DelaySpec::custom(std::function<double(double)> cdf,
                            std::function<double(double)> quantile, double mean_ms,
                            double support_end, std::vector<double> kinks) {
  if (!cdf || !quantile) throw ConfigError("delay: custom law needs a CDF and a quantile");
  if (!(mean_ms >= 0.0)) throw ConfigError("delay: custom mean must be >= 0");
  DelaySpec d;
  d.kind_ = Kind::kCustom;
  d.cdf_ = std::move(cdf);
  d.quantile_ = std::move(quantile);
  d.custom_mean_ = mean_ms;
  d.support_end_ = support_end;
  d.kinks_ = std::move(kinks);
  return d;
}

double DelaySpec::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case Kind::kUniform:
      return param_ == 0.0 ? 1.0 : std::min(x / param_, 1.0);
    case Kind::kFixed:
      return x >= param_ ? 1.0 : 0.0;
    case Kind::kExponential:
      return -std::expm1(-x / param_);
    case Kind::kCustom:
      return cdf_(x);
  }
  return 0.0;
}

double DelaySpec::quantile(double u) const {
  switch (kind_) {
    case Kind::kUniform:
      return u * param_;
    case Kind::kFixed:
      return param_;
    case Kind::kExponential:
      return -param_ * std::log1p(-u);
    case Kind::kCustom:
      return quantile_(u);
  }
  return 0.0;
}

double DelaySpec::mean() const {
  switch (kind_) {
    case Kind::kUniform:
      return 0.5 * param_;
    case Kind::kFixed:
    case Kind::kExponential:
      return param_;
    case Kind::kCustom:
      return custom_mean_;
  }
  return 0.0;
}

double DelaySpec::cdf_integral(double a) const {
  if (a <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::kUniform:
      if (param_ == 0.0) return a;
      return a <= param_ ? 0.5 * a * a / param_ : 0.5 * param_ + (a - param_);
    case Kind::kFixed:
      return std::max(a - param_, 0.0);
    case Kind::kExponential:
      return a + param_ * std::expm1(-a / param_);
    case Kind::kCustom:
      return integrate(cdf_, 0.0, a, kinks_, kQuadTol).value;
  }
  return 0.0;
}

std::vector<double> DelaySpec::kinks() const {
  switch (kind_) {
    case Kind::kUniform:
    case Kind::kFixed:
      return {param_};
    case Kind::kExponential:
      return {};
    case Kind::kCustom:
      return kinks_;
  }
  return {};
}

std::string DelaySpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUniform:
      os << "uniform[0," << param_ << "]";
      break;
    case Kind::kFixed:
      os << "fixed(" << param_ << ")";
      break;
    case Kind::kExponential:
      os << "exponential(" << param_ << ")";
      break;
    case Kind::kCustom:
      os << "custom(mean=" << custom_mean_ << ")";
      break;
  }
  return os.str();
}

void DurationModel::validate() const {
  lifetime.validate();
  if (!(window_ms >= 0.0)) throw ConfigError("durations: window_ms must be >= 0");
}

// ---- link states -----------------------------------------------------------

const char* to_string(LinkState s) {
  switch (s) {
    case LinkState::kCos:
      return "cos";
    case LinkState::kStaleActive:
      return "stale-active";
    case LinkState::kSilent:
      return "silent";
    case LinkState::kNotCoordinated:
      return "not-coordinated";
  }
  return "?";
}

LinkState classify(double lifetime_ms, double delay_ms, double window_ms) {
  if (!(lifetime_ms > 0.0) || !(delay_ms >= 0.0) || !(window_ms >= 0.0))
    throw ConfigError("classify: requires L > 0, D >= 0, w >= 0");
  if (std::min(lifetime_ms, window_ms) >= delay_ms) return LinkState::kCos;
  if (window_ms < delay_ms) return LinkState::kSilent;
  return LinkState::kStaleActive;
}

double delta_factor(bool member, LinkState state, int bits, int antennas) {
  if (member == (state == LinkState::kNotCoordinated))
    throw ConfigError("delta_factor: state inconsistent with coordination-set membership");
  switch (state) {
    case LinkState::kNotCoordinated:
    case LinkState::kStaleActive:
      return 1.0;
    case LinkState::kSilent:
      return 0.0;
    case LinkState::kCos:
      return quantization_scale(bits, antennas);
  }
  return 1.0;
}

// ---- expectations ----------------------------------------------------------

double cos_probability(const DurationModel& model) {
  model.validate();
  const double v = (1.0 - window_cdf_lifetime(model)) * window_cdf_delay(model) + joint_below(model);
  return std::clamp(v, 0.0, 1.0);
}

double stale_probability(const DurationModel& model) {
  model.validate();
  const double v = window_cdf_lifetime(model) * window_cdf_delay(model) - joint_below(model);
  return std::clamp(v, 0.0, 1.0);
}

double expected_delta(const DurationModel& model, int bits, int antennas, bool member) {
  if (!member) return 1.0;
  const double scale = quantization_scale(bits, antennas);
  return scale * cos_probability(model) + stale_probability(model);
}

double cos_time_fraction(const DurationModel& model) {
  model.validate();
  const double hi = lifetime_limit(model);
  const auto r = integrate(
      [&](double x) { return model.lifetime.ccdf(x) * model.delay.cdf(x); }, 0.0, hi,
      breakpoints(model), kQuadTol);
  return std::clamp(r.value / model.lifetime.mean_ms, 0.0, 1.0);
}

double cos_time_fraction_expanded(const DurationModel& model) {
  model.validate();
  const auto& life = model.lifetime;
  const auto& delay = model.delay;
  const double w = model.window_ms;
  const double support = life.effective_support_end();

  const double survival_area =
      integrate([&](double x) { return life.ccdf(x); }, 0.0, std::min(w, support), {}, kQuadTol)
          .value;
  double early_term = 0.0;
  if (std::isfinite(w))
    early_term = life.ccdf(w) * (w * delay.cdf(w) - delay.cdf_integral(w));
  const double stale_mean =
      integrate([&](double l) { return life.pdf(l) * (l * delay.cdf(l) - delay.cdf_integral(l)); },
                0.0, support, delay.kinks(), kQuadTol)
          .value;
  return (survival_area - early_term + window_cdf_lifetime(model) * stale_mean) / life.mean_ms;
}

MonteCarloEstimate cos_time_fraction_mc(const DurationModel& model, std::uint64_t blocks,
                                        RandomStream& rng) {
  model.validate();
  if (blocks == 0) throw ConfigError("cos_time_fraction_mc: blocks must be >= 1");
  double sx = 0.0, sl = 0.0, sxx = 0.0, sxl = 0.0, sll = 0.0;
  for (std::uint64_t j = 0; j < blocks; ++j) {
    const double l = model.lifetime.quantile(rng.uniform());
    const double d = model.delay.quantile(rng.uniform());
    const double x = std::max(std::min(l, model.window_ms) - d, 0.0);
    sx += x;
    sl += l;
    sxx += x * x;
    sxl += x * l;
    sll += l * l;
  }
  const double n = static_cast<double>(blocks);
  const double ratio = sx / sl;
  MonteCarloEstimate est;
  est.value = ratio;
  est.samples = blocks;
  if (blocks > 1) {
    const double resid = std::max(sxx - 2.0 * ratio * sxl + ratio * ratio * sll, 0.0);
    est.standard_error = std::sqrt(resid / (n * (n - 1.0))) / (sl / n);
  }
  return est;
}

WindowOptimum optimize_window(const DurationModel& model, int bits, int antennas, double w_lo,
                              double w_hi) {
  if (!(w_lo > 0.0) || !(w_hi > w_lo) || !std::isfinite(w_hi))
    throw ConfigError("optimize_window: need 0 < w_lo < w_hi < inf");
  DurationModel m = model;
  auto objective = [&](double w) {
    m.window_ms = w;
    const double eta = cos_time_fraction(m);
    if (!(eta > 0.0)) return std::numeric_limits<double>::infinity();
    return expected_delta(m, bits, antennas) / eta;
  };

  constexpr int kGrid = 200;
  std::vector<double> grid(kGrid);
  std::vector<double> values(kGrid);
  int best = -1;
  for (int j = 0; j < kGrid; ++j) {
    grid[j] = w_lo + (w_hi - w_lo) * j / (kGrid - 1);
    values[j] = objective(grid[j]);
    if (std::isfinite(values[j]) && (best < 0 || values[j] < values[best])) best = j;
  }
  if (best < 0) throw NumericError("optimize_window: COS time fraction is zero on the whole range");

  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-7 * (w_hi - w_lo)) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  WindowOptimum out{grid[best], values[best], best == 0 || best == kGrid - 1};
  const double w_ref = 0.5 * (a + b);
  const double f_ref = objective(w_ref);
  if (f_ref < out.objective) {
    out.window_ms = w_ref;
    out.objective = f_ref;
  }
  return out;
}

}  // namespace adacomp

#include "adacomp/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adacomp/errors.hpp"
#include "adacomp/parallel.hpp"
#include "adacomp/quadrature.hpp"

namespace adacomp {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kTailTarget = 1e-6;

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

// anchor * int_X^inf (x/X)^-kappa / (ln2 (1 + x)) dx, via x = X e^u.
double power_tail(double anchor, double x_max, double kappa) {
  if (anchor <= 0.0 || std::isinf(kappa)) return 0.0;
  const auto r = integrate(
      [&](double u) {
        const double x = x_max * std::exp(u);
        return std::exp(-kappa * u) * x / (1.0 + x);
      },
      0.0, 50.0 / kappa, {}, 1e-12);
  return anchor * r.value / kLn2;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double standard_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(sum_sq / static_cast<double>(n) - m * m, 0.0) *
                       static_cast<double>(n) / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }
};

std::vector<std::pair<int, double>> as_mixture(const std::vector<double>& pmf) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t v = 0; v < pmf.size(); ++v) out.emplace_back(static_cast<int>(v), pmf[v]);
  return out;
}

}  // namespace

const char* to_string(ThroughputMethod m) {
  switch (m) {
    case ThroughputMethod::kMonteCarlo:
      return "mc";
    case ThroughputMethod::kBoundLower:
      return "bound-lower";
    case ThroughputMethod::kBoundUpper:
      return "bound-upper";
    case ThroughputMethod::kCcdfIntegral:
      return "ccdf-integral";
  }
  return "?";
}

std::vector<double> cos_count_pmf(double eta, std::size_t set_size) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("cos_count_pmf: eta must lie in [0, 1]");
  std::vector<double> pmf(set_size + 1);
  for (std::size_t v = 0; v <= set_size; ++v)
    pmf[v] = binomial(set_size, v) * std::pow(eta, static_cast<double>(v)) *
             std::pow(1.0 - eta, static_cast<double>(set_size - v));
  return pmf;
}

std::vector<double> cos_count_pmf(std::span<const double> etas) {
  std::vector<double> pmf{1.0};
  for (double eta : etas) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("cos_count_pmf: eta must lie in [0, 1]");
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t v = 0; v < pmf.size(); ++v) {
      next[v] += pmf[v] * (1.0 - eta);
      next[v + 1] += pmf[v] * eta;
    }
    pmf = std::move(next);
  }
  return pmf;
}

// ---- empirical CCDF ----------------------------------------------------------

EmpiricalCcdf::EmpiricalCcdf(std::span<const double> sirs) {
  sorted_.reserve(sirs.size());
  for (double s : sirs) {
    if (std::isinf(s)) {
      ++dropped_;
      continue;
    }
    if (!(s >= 0.0)) throw NumericError("empirical ccdf: SIR samples must be >= 0");
    sorted_.push_back(s);
  }
  if (sorted_.empty()) throw NumericError("empirical ccdf: no finite samples");
  std::sort(sorted_.begin(), sorted_.end());

  const std::size_t n = sorted_.size();
  if (n < 20) return;
  const std::size_t k = std::max<std::size_t>(10, n / 10);
  const double anchor = sorted_[n - k - 1];
  if (!(anchor > 0.0)) throw NumericError("empirical ccdf: tail anchor is zero; tail not integrable");
  double mean_log = 0.0;
  for (std::size_t j = n - k; j < n; ++j) mean_log += std::log(sorted_[j] / anchor);
  mean_log /= static_cast<double>(k);
  tail_exponent_ = mean_log > 0.0 ? 1.0 / mean_log : std::numeric_limits<double>::infinity();
}

double EmpiricalCcdf::operator()(double x) const {
  const auto below = std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(sorted_.size() - static_cast<std::size_t>(below)) /
         static_cast<double>(sorted_.size());
}

std::pair<double, double> EmpiricalCcdf::rate_integral() const {
  // The CCDF equals (n - j)/n on [s_{j-1}, s_j); integrate 1/(ln2 (1+x))
  // exactly on each step.
  const double n = static_cast<double>(sorted_.size());
  double value = 0.0;
  double previous = 0.0;
  for (std::size_t j = 0; j < sorted_.size(); ++j) {
    const double level = (n - static_cast<double>(j)) / n;
    value += level * (std::log1p(sorted_[j]) - std::log1p(previous)) / kLn2;
    previous = sorted_[j];
  }
  double tail = 0.0;
  if (tail_exponent_ > 0.0 && sorted_.back() > 0.0)
    tail = power_tail(1.0 / n, sorted_.back(), tail_exponent_);
  return {value + tail, tail};
}

// ---- rate integral -----------------------------------------------------------

std::pair<double, double> rate_integral(const CcdfFunction& f) {
  if (!f.ccdf) throw ConfigError("rate_integral: empty CCDF");
  auto g = [&](double x) { return std::clamp(f.ccdf(x), 0.0, 1.0); };

  // Horizon: double until the power-law tail is negligible.
  if (!(f.tail_exponent > 0.0))
    throw NumericError("rate_integral: tail exponent must be > 0 for an integrable tail");
  double x_max = 1.0;
  while (g(x_max) / (f.tail_exponent * kLn2) >= kTailTarget) {
    x_max *= 2.0;
    if (x_max > 1e15)
      throw NumericError("rate_integral: CCDF does not decay; tail not integrable (g(1e15) = " +
                         std::to_string(g(x_max)) + ")");
  }

  double previous = g(0.0);
  for (double x = 1e-4; x <= x_max; x *= 1.25) {
    const double v = g(x);
    if (v > previous + 1e-12) throw NumericError("rate_integral: CCDF is not nonincreasing");
    previous = v;
  }

  auto integrand = [&](double x) { return g(x) / (kLn2 * (1.0 + x)); };
  double value = integrate(integrand, 0.0, 1.0, f.breakpoints, 1e-9).value;
  for (double lo = 1.0; lo < x_max; lo *= 2.0)
    value += integrate(integrand, lo, 2.0 * lo, f.breakpoints, 1e-9).value;
  const double tail = power_tail(g(x_max), x_max, f.tail_exponent);
  return {value + tail, tail};
}

ThroughputResult ergodic_throughput_from_ccdf(std::span<const CcdfFunction> ccdf_per_v, double eta,
                                              std::size_t set_size) {
  if (ccdf_per_v.size() != set_size + 1)
    throw ConfigError("ergodic_throughput_from_ccdf: need one CCDF per v = 0..|S|");
  const auto pmf = cos_count_pmf(eta, set_size);
  ThroughputResult r;
  r.method = ThroughputMethod::kCcdfIntegral;
  r.mixture = as_mixture(pmf);
  r.quadrature_tolerance = 1e-9;
  for (std::size_t v = 0; v <= set_size; ++v) {
    if (pmf[v] == 0.0) continue;
    const auto [value, tail] = rate_integral(ccdf_per_v[v]);
    r.value += pmf[v] * value;
    r.tail_contribution += pmf[v] * tail;
  }
  return r;
}

ThroughputResult ergodic_throughput_from_ccdf(std::span<const EmpiricalCcdf> ccdf_per_v, double eta,
                                              std::size_t set_size) {
  if (ccdf_per_v.size() != set_size + 1)
    throw ConfigError("ergodic_throughput_from_ccdf: need one CCDF per v = 0..|S|");
  const auto pmf = cos_count_pmf(eta, set_size);
  ThroughputResult r;
  r.method = ThroughputMethod::kCcdfIntegral;
  r.mixture = as_mixture(pmf);
  for (std::size_t v = 0; v <= set_size; ++v) {
    const auto [value, tail] = ccdf_per_v[v].rate_integral();
    r.value += pmf[v] * value;
    r.tail_contribution += pmf[v] * tail;
    r.trials += ccdf_per_v[v].sorted().size();
    r.infinite_events += ccdf_per_v[v].dropped_infinite();
  }
  return r;
}

// ---- Monte Carlo ---------------------------------------------------------------

ThroughputResult ergodic_throughput_mc(const NetworkConfig& config, const DurationModel& model,
                                       const TrialPlan& plan, std::uint64_t seed, unsigned workers,
                                       const SirOptions& options) {
  if (plan.trials < 1) throw ConfigError("ergodic_throughput_mc: trials must be >= 1");
  const auto samples = simulate_sir_batch(config, model, plan, seed, workers, options);
  Moments acc;
  ThroughputResult r;
  r.method = ThroughputMethod::kMonteCarlo;
  r.trials = samples.size();
  std::vector<double> counts(config.coord_set_size + 1, 0.0);
  for (const auto& s : samples) {
    counts[static_cast<std::size_t>(s.cos_count)] += 1.0;
    if (s.infinite()) {
      ++r.infinite_events;
      continue;
    }
    acc.add(std::log2(1.0 + s.sir));
  }
  for (auto& c : counts) c /= static_cast<double>(samples.size());
  r.mixture = as_mixture(counts);
  r.value = acc.mean();
  r.standard_error = acc.standard_error();
  return r;
}

ThroughputResult ergodic_throughput_conditional_mc(const NetworkConfig& config,
                                                   const DurationModel& model, int cos_count,
                                                   const TrialPlan& plan, std::uint64_t seed,
                                                   unsigned workers, const SirOptions& options) {
  config.validate();
  model.validate();
  if (cos_count < 0 || static_cast<std::size_t>(cos_count) > config.coord_set_size)
    throw ConfigError("conditional throughput: cos_count must lie in [0, |S|]");
  const std::uint32_t fpg = std::max(1u, plan.fading_per_geometry);
  const std::uint64_t geometries = (plan.trials + fpg - 1) / fpg;
  std::vector<double> rates(plan.trials, 0.0);
  std::vector<unsigned char> excluded(plan.trials, 0);

  parallel_for(geometries, workers, [&](std::size_t g0, std::size_t g1) {
    TrialSource source(config, seed, fpg);
    for (std::uint64_t t = g0 * fpg; t < std::min<std::uint64_t>(g1 * fpg, plan.trials); ++t) {
      const auto draw = source.draw(t);
      RandomStream aux(seed, t, StreamTag::kAuxiliary);
      const std::size_t size = draw.members.size();
      std::vector<std::size_t> order(size);
      for (std::size_t j = 0; j < size; ++j) order[j] = j;
      for (std::size_t j = 0; j + 1 < size; ++j) {
        const auto pick = j + static_cast<std::size_t>(aux.uniform() * static_cast<double>(size - j));
        std::swap(order[j], order[std::min(pick, size - 1)]);
      }
      std::vector<LinkState> states(size);
      for (std::size_t j = 0; j < size; ++j) {
        const bool want_cos = j < static_cast<std::size_t>(cos_count);
        for (int attempt = 0;; ++attempt) {
          if (attempt > 1000000)
            throw NumericError("conditional throughput: requested link state has zero probability");
          const double l = model.lifetime.quantile(aux.uniform());
          const double d = model.delay.quantile(aux.uniform());
          const auto s = classify(l, d, model.window_ms);
          if ((s == LinkState::kCos) == want_cos) {
            states[order[j]] = s;
            break;
          }
        }
      }
      const auto sample = evaluate_sir(draw, states, options);
      if (sample.infinite())
        excluded[t] = 1;
      else
        rates[t] = std::log2(1.0 + sample.sir);
    }
  });

  Moments acc;
  ThroughputResult r;
  r.method = ThroughputMethod::kMonteCarlo;
  r.trials = plan.trials;
  r.mixture = {{cos_count, 1.0}};
  for (std::uint64_t t = 0; t < plan.trials; ++t) {
    if (excluded[t]) {
      ++r.infinite_events;
      continue;
    }
    acc.add(rates[t]);
  }
  r.value = acc.mean();
  r.standard_error = acc.standard_error();
  return r;
}

ThroughputSweep throughput_sweep(const NetworkConfig& config, std::span<const DurationModel> models,
                                 const TrialPlan& plan, std::uint64_t seed, unsigned workers,
                                 const SirOptions& options) {
  config.validate();
  for (const auto& m : models) m.validate();
  if (plan.trials < 1) throw ConfigError("throughput_sweep: trials must be >= 1");
  const std::uint32_t fpg = std::max(1u, plan.fading_per_geometry);
  const std::uint64_t geometries = (plan.trials + fpg - 1) / fpg;
  const std::size_t n_models = models.size();

  ThroughputSweep sweep;
  sweep.rates.assign(n_models, std::vector<double>(plan.trials, 0.0));
  sweep.excluded.assign(n_models, std::vector<unsigned char>(plan.trials, 0));
  std::vector<double> baseline(plan.trials, 0.0);
  std::vector<unsigned char> baseline_excluded(plan.trials, 0);
  std::vector<std::vector<int>> cos_counts(n_models, std::vector<int>(plan.trials, 0));

  parallel_for(geometries, workers, [&](std::size_t g0, std::size_t g1) {
    TrialSource source(config, seed, fpg);
    for (std::uint64_t t = g0 * fpg; t < std::min<std::uint64_t>(g1 * fpg, plan.trials); ++t) {
      const auto draw = source.draw(t);
      for (std::size_t m = 0; m < n_models; ++m) {
        const auto s = evaluate_sir(draw, models[m], options);
        cos_counts[m][t] = s.cos_count;
        if (s.infinite())
          sweep.excluded[m][t] = 1;
        else
          sweep.rates[m][t] = std::log2(1.0 + s.sir);
      }
      const double u = evaluate_sir_uncoordinated(draw);
      if (std::isinf(u))
        baseline_excluded[t] = 1;
      else
        baseline[t] = std::log2(1.0 + u);
    }
  });

  auto summarize = [&](const std::vector<double>& rates, const std::vector<unsigned char>& excl) {
    Moments acc;
    ThroughputResult r;
    r.trials = plan.trials;
    for (std::uint64_t t = 0; t < plan.trials; ++t) {
      if (excl[t]) {
        ++r.infinite_events;
        continue;
      }
      acc.add(rates[t]);
    }
    r.value = acc.mean();
    r.standard_error = acc.standard_error();
    return r;
  };
  for (std::size_t m = 0; m < n_models; ++m) {
    auto r = summarize(sweep.rates[m], sweep.excluded[m]);
    std::vector<double> freq(config.coord_set_size + 1, 0.0);
    for (int c : cos_counts[m]) freq[static_cast<std::size_t>(c)] += 1.0 / static_cast<double>(plan.trials);
    r.mixture = as_mixture(freq);
    sweep.results.push_back(std::move(r));
  }
  sweep.uncoordinated = summarize(baseline, baseline_excluded);
  return sweep;
}

std::pair<double, double> ThroughputSweep::paired_difference(std::size_t a, std::size_t b) const {
  Moments acc;
  const auto& ra = rates.at(a);
  const auto& rb = rates.at(b);
  for (std::size_t t = 0; t < ra.size(); ++t) {
    if (excluded[a][t] || excluded[b][t]) continue;
    acc.add(ra[t] - rb[t]);
  }
  return {acc.mean(), acc.standard_error()};
}

}  // namespace adacomp

#include "adacomp/fading.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "adacomp/errors.hpp"

namespace adacomp {

namespace {

double norm_squared(const ChannelVector& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

// c^H h
std::complex<double> inner(const ChannelVector& c, const ChannelVector& h) {
  std::complex<double> s{};
  for (std::size_t i = 0; i < c.size(); ++i) s += std::conj(c[i]) * h[i];
  return s;
}

void check_bits(int bits) {
  if (bits < 0) throw ConfigError("rvq: feedback bits must be >= 0");
  if (bits > kMaxRvqBits)
    throw ConfigError("rvq: " + std::to_string(bits) + " bits exceeds the explicit codebook limit of " +
                      std::to_string(kMaxRvqBits) + "; use cos_interferer_gain_shortcut");
}

}  // namespace

double quantization_scale(int bits, int antennas) {
  if (antennas < 2) throw NumericError("quantization_scale: needs at least two antennas");
  if (bits < 0) throw ConfigError("quantization_scale: feedback bits must be >= 0");
  return std::exp2(-static_cast<double>(bits) / (antennas - 1));
}

GainSample serving_gain(int n_serving, std::size_t coord_size, RandomStream& rng) {
  if (n_serving < 1 || coord_size >= static_cast<std::size_t>(n_serving))
    throw ConfigError("serving_gain: zero-forcing infeasible with " + std::to_string(n_serving) +
                      " antennas and " + std::to_string(coord_size) + " coordinated BSs");
  const double shape = static_cast<double>(n_serving - static_cast<int>(coord_size));
  return {rng.gamma(shape), GainKind::kServing};
}

GainSample nos_interferer_gain(RandomStream& rng) {
  return {rng.exponential(), GainKind::kNosInterferer};
}

GainSample cos_interferer_gain_shortcut(int bits, int antennas, RandomStream& rng,
                                        CosGainModel model) {
  const double scale = quantization_scale(bits, antennas);
  // Always consume the draw so both models stay on the same random stream.
  const double e = rng.exponential();
  const double value = model == CosGainModel::kScaledExponential ? scale * e : scale;
  return {value, GainKind::kCosInterferer};
}

ChannelVector rayleigh_channel(int n, RandomStream& rng) {
  ChannelVector h(static_cast<std::size_t>(n));
  for (auto& x : h) x = {rng.normal() * std::numbers::sqrt2 / 2, rng.normal() * std::numbers::sqrt2 / 2};
  return h;
}

ChannelVector isotropic_unit_vector(int n, RandomStream& rng) {
  auto v = rayleigh_channel(n, rng);
  const double inv = 1.0 / std::sqrt(norm_squared(v));
  for (auto& x : v) x *= inv;
  return v;
}

Quantization quantize(const ChannelVector& h, const std::vector<ChannelVector>& codebook) {
  if (codebook.empty()) throw ConfigError("quantize: empty codebook");
  const double hn = norm_squared(h);
  if (!(hn > 0.0)) throw NumericError("quantize: zero channel vector");
  Quantization best{0, 2.0};
  for (std::size_t j = 0; j < codebook.size(); ++j) {
    const double residual = 1.0 - std::norm(inner(codebook[j], h)) / hn;
    if (residual < best.residual) best = {j, residual};
  }
  best.residual = std::max(best.residual, 0.0);
  return best;
}

std::vector<ChannelVector> rvq_codebook(int n, int bits, RandomStream& rng) {
  check_bits(bits);
  std::vector<ChannelVector> book(std::size_t{1} << bits);
  for (auto& c : book) c = isotropic_unit_vector(n, rng);
  return book;
}

Quantization rvq_quantize(const ChannelVector& h, int bits, RandomStream& rng) {
  check_bits(bits);
  const double hn = norm_squared(h);
  if (!(hn > 0.0)) throw NumericError("rvq_quantize: zero channel vector");
  const int n = static_cast<int>(h.size());
  const std::size_t size = std::size_t{1} << bits;
  Quantization best{0, 2.0};
  for (std::size_t j = 0; j < size; ++j) {
    const auto c = isotropic_unit_vector(n, rng);
    const double residual = 1.0 - std::norm(inner(c, h)) / hn;
    if (residual < best.residual) best = {j, residual};
  }
  best.residual = std::max(best.residual, 0.0);
  return best;
}

GainSample cos_interferer_gain_explicit(const ChannelVector& channel, int bits,
                                        RandomStream& rng) {
  const int n = static_cast<int>(channel.size());
  if (n < 2) throw NumericError("cos_interferer_gain_explicit: needs at least two antennas");
  check_bits(bits);
  const double hn = norm_squared(channel);
  const std::size_t size = std::size_t{1} << bits;
  ChannelVector best_c;
  double best_fit = -1.0;
  for (std::size_t j = 0; j < size; ++j) {
    auto c = isotropic_unit_vector(n, rng);
    const double fit = std::norm(inner(c, channel)) / hn;
    if (fit > best_fit) {
      best_fit = fit;
      best_c = std::move(c);
    }
  }
  // Project a Gaussian vector onto the complement of the codeword.
  auto f = rayleigh_channel(n, rng);
  const auto proj = inner(best_c, f);
  for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] -= proj * best_c[static_cast<std::size_t>(i)];
  const double inv = 1.0 / std::sqrt(norm_squared(f));
  for (auto& x : f) x *= inv;
  return {std::norm(inner(f, channel)), GainKind::kCosInterferer};
}

}  // namespace adacomp

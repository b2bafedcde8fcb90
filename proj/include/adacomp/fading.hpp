#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "adacomp/rng.hpp"

namespace adacomp {

// Power gains follow the Gamma(shape, 1) normalization: a chi-square
// variable with 2*nu degrees of freedom divided by two, so that one
// complex Gaussian entry has unit mean power.

enum class GainKind { kServing, kCosInterferer, kNosInterferer };

struct GainSample {
  double value = 0.0;
  GainKind kind = GainKind::kNosInterferer;
};

/// How a coordinated interferer with current CSI leaks power to the user.
enum class CosGainModel {
  kScaledExponential,  ///< quantization_scale * Exp(1)
  kDeterministic,      ///< quantization_scale exactly
};

using ChannelVector = std::vector<std::complex<double>>;

inline constexpr int kMaxRvqBits = 20;

/// 2^(-bits / (antennas - 1)); throws NumericError for a single antenna.
double quantization_scale(int bits, int antennas);

/// Gamma(n_serving - coord_size, 1): beamforming gain left after nulling
/// coord_size directions.
GainSample serving_gain(int n_serving, std::size_t coord_size, RandomStream& rng);

/// Exp(1): an interferer whose precoder is independent of the channel.
GainSample nos_interferer_gain(RandomStream& rng);

GainSample cos_interferer_gain_shortcut(int bits, int antennas, RandomStream& rng,
                                        CosGainModel model = CosGainModel::kScaledExponential);

/// n i.i.d. CN(0,1) entries.
ChannelVector rayleigh_channel(int n, RandomStream& rng);

/// Uniformly distributed direction on the complex unit sphere.
ChannelVector isotropic_unit_vector(int n, RandomStream& rng);

struct Quantization {
  std::size_t index = 0;
  double residual = 1.0;  ///< sin^2 of the angle between h and the codeword
};

/// Codeword maximizing |c^H h| over an explicit codebook of unit vectors.
Quantization quantize(const ChannelVector& h, const std::vector<ChannelVector>& codebook);

/// Quantizes against 2^bits fresh random codewords drawn from `rng`.
/// Throws ConfigError above kMaxRvqBits; use the shortcut gain instead.
Quantization rvq_quantize(const ChannelVector& h, int bits, RandomStream& rng);

std::vector<ChannelVector> rvq_codebook(int n, int bits, RandomStream& rng);

/// |f^H H|^2 for a zero-forcing precoder f drawn isotropically from the
/// orthogonal complement of the RVQ codeword chosen for H.
GainSample cos_interferer_gain_explicit(const ChannelVector& channel, int bits,
                                        RandomStream& rng);

}  // namespace adacomp

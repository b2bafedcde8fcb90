#include <cmath>
#include <complex>

#include "adacomp/errors.hpp"
#include "adacomp/fading.hpp"
#include "doctest.h"

using namespace adacomp;

TEST_CASE("serving gain moments") {
  RandomStream rng(11);
  const int n = 1000000;
  double sum = 0.0, inv = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto g = serving_gain(8, 1, rng);
    CHECK_FALSE(g.value < 0.0);
    sum += g.value;
    inv += 1.0 / g.value;
  }
  CHECK(std::abs(sum / n - 7.0) < 0.01);
  CHECK(inv / n == doctest::Approx(1.0 / 6.0).epsilon(0.005));
  CHECK_THROWS_AS(serving_gain(2, 2, rng), ConfigError);
}

TEST_CASE("shape one serving gain is exponential") {
  RandomStream rng(12);
  const int n = 200000;
  int above = 0;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double g = serving_gain(2, 1, rng).value;
    sum += g;
    above += g >= 1.0;
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(static_cast<double>(above) / n == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("NOS gain") {
  RandomStream rng(13);
  const int n = 1000000;
  double sum = 0.0;
  int above = 0;
  for (int j = 0; j < n; ++j) {
    const auto g = nos_interferer_gain(rng);
    CHECK(g.kind == GainKind::kNosInterferer);
    sum += g.value;
    above += g.value >= 1.0;
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.005));
  CHECK(static_cast<double>(above) / n == doctest::Approx(std::exp(-1.0)).epsilon(0.005));
}

TEST_CASE("quantization scale") {
  CHECK(quantization_scale(21, 8) == doctest::Approx(0.125));
  CHECK(quantization_scale(9, 4) == doctest::Approx(0.125));
  CHECK(quantization_scale(3, 2) == doctest::Approx(0.125));
  CHECK(quantization_scale(0, 4) == 1.0);
  CHECK_THROWS_AS(quantization_scale(3, 1), NumericError);
}

TEST_CASE("COS shortcut gain") {
  RandomStream rng(14);
  const int n = 400000;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += cos_interferer_gain_shortcut(9, 4, rng).value;
  CHECK(sum / n == doctest::Approx(0.125).epsilon(0.01));

  // b = 0 reproduces the NOS draw exactly on a shared stream
  RandomStream a(99), b(99);
  for (int j = 0; j < 100; ++j)
    CHECK(cos_interferer_gain_shortcut(0, 4, a).value == nos_interferer_gain(b).value);

  RandomStream c(1);
  CHECK(cos_interferer_gain_shortcut(21, 8, c, CosGainModel::kDeterministic).value ==
        doctest::Approx(0.125));
}

TEST_CASE("channel vectors") {
  RandomStream rng(15);
  double power = 0.0;
  const int n = 20000;
  for (int j = 0; j < n; ++j) {
    auto h = rayleigh_channel(4, rng);
    CHECK(h.size() == 4);
    for (auto z : h) power += std::norm(z);
    auto u = isotropic_unit_vector(3, rng);
    double norm = 0.0;
    for (auto z : u) norm += std::norm(z);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(power / (4.0 * n) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("RVQ residual with one codeword") {
  // mean sin^2 between independent isotropic directions: (n-1)/n
  for (int n : {2, 4}) {
    RandomStream rng(16 + n);
    double sum = 0.0;
    const int draws = 100000;
    for (int j = 0; j < draws; ++j) sum += rvq_quantize(rayleigh_channel(n, rng), 0, rng).residual;
    CHECK(sum / draws == doctest::Approx((n - 1.0) / n).epsilon(0.01));
  }
}

TEST_CASE("RVQ residual tracks the quantization scale") {
  RandomStream rng(17);
  const int bits = 8, draws = 20000;
  double sum = 0.0;
  for (int j = 0; j < draws; ++j) sum += rvq_quantize(rayleigh_channel(2, rng), bits, rng).residual;
  CHECK(sum / draws == doctest::Approx(quantization_scale(bits, 2)).epsilon(0.10));
}

TEST_CASE("codebook containing the channel direction") {
  RandomStream rng(18);
  auto h = rayleigh_channel(4, rng);
  auto codebook = rvq_codebook(4, 3, rng);
  double norm = 0.0;
  for (auto z : h) norm += std::norm(z);
  ChannelVector dir = h;
  for (auto& z : dir) z /= std::sqrt(norm);
  codebook[5] = dir;
  auto q = quantize(h, codebook);
  CHECK(q.index == 5);
  CHECK(q.residual == doctest::Approx(0.0).epsilon(1e-12));

  // direction only: scaling h keeps the chosen index
  ChannelVector scaled = h;
  for (auto& z : scaled) z *= 7.5;
  CHECK(quantize(scaled, codebook).index == q.index);
}

TEST_CASE("RVQ scale invariance on random codebooks") {
  for (int s = 0; s < 200; ++s) {
    RandomStream rng(1000 + s);
    auto h = rayleigh_channel(4, rng);
    auto cb = rvq_codebook(4, 6, rng);
    ChannelVector scaled = h;
    for (auto& z : scaled) z *= 0.01 * (s + 1);
    CHECK(quantize(h, cb).index == quantize(scaled, cb).index);
  }
}

TEST_CASE("RVQ bit guard") {
  RandomStream rng(19);
  CHECK_THROWS_AS(rvq_quantize(rayleigh_channel(2, rng), kMaxRvqBits + 1, rng), ConfigError);
}

TEST_CASE("COS leakage of explicit codebooks consistent with shortcut scale") {
  // leakage = quantization residual sin^2; the explicit zero-forcing gain
  // |f^H H|^2 then carries the extra ||H||^2 / (n - 1) factor
  for (int n : {2, 4}) {
    for (int mult : {1, 2, 3}) {
      const int bits = mult * (n - 1);
      RandomStream rng(20 + 10 * n + mult);
      const int draws = 100000;
      double residual = 0.0, gain = 0.0;
      for (int j = 0; j < draws; ++j) {
        const auto h = rayleigh_channel(n, rng);
        residual += rvq_quantize(h, bits, rng).residual;
        if (mult == 1 && j < 20000) {
          const auto g = cos_interferer_gain_explicit(h, bits, rng);
          CHECK_FALSE(g.value < 0.0);
          gain += g.value;
        }
      }
      const double leak = residual / draws, scale = quantization_scale(bits, n);
      CAPTURE(n);
      CAPTURE(bits);
      CAPTURE(leak / scale);
      CHECK(leak <= 1.15 * scale);
      CHECK(leak >= 0.5 * scale);
      if (mult == 1) CHECK(gain / 20000 == doctest::Approx(leak * n / (n - 1.0)).epsilon(0.03));
    }
  }
}

TEST_CASE("serving gain dominates NOS gain") {
  RandomStream a(21), b(22);
  const int n = 100000;
  int sg = 0, ng = 0;
  for (int j = 0; j < n; ++j) {
    sg += serving_gain(4, 1, a).value >= 1.5;
    ng += nos_interferer_gain(b).value >= 1.5;
  }
  CHECK(sg > ng);
}

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adacomp/errors.hpp"
#include "adacomp/network.hpp"
#include "doctest.h"

using namespace adacomp;

namespace {

NetworkConfig three_tier(double radius) {
  NetworkConfig c;
  c.tiers = {{1, 1e-5, 40.0, 8, 4.0, 21}, {2, 5e-5, 5.0, 4, 3.5, 9}, {3, 1e-4, 0.5, 2, 3.0, 3}};
  c.sim_radius = radius;
  return c;
}

// brute force: every non-serving BS with its power, sorted descending
std::vector<BsRef> exhaustive_order(const std::vector<std::vector<double>>& d,
                                    const std::vector<TierParams>& tiers, BsRef serving) {
  std::vector<std::pair<double, BsRef>> all;
  for (std::size_t k = 0; k < d.size(); ++k)
    for (std::size_t i = 0; i < d[k].size(); ++i)
      if (!(BsRef{k, i} == serving)) all.push_back({average_power(tiers[k], d[k][i]), {k, i}});
  std::stable_sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<BsRef> out;
  for (auto& [p, r] : all) out.push_back(r);
  return out;
}

}  // namespace

TEST_CASE("tier validation") {
  TierParams t{1, 1e-6, 1.0, 2, 4.0, 3};
  CHECK_NOTHROW(t.validate());
  t.path_loss_exp = 2.0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {1, 0.0, 1.0, 2, 4.0, 3};
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {1, 1e-6, 1.0, 0, 4.0, 3};
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {1, 1e-6, 1.0, 2, 4.0, -1};
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("mean point counts match lambda pi R^2") {
  auto c = three_tier(3000.0);
  const double expected[] = {282.743, 1413.717, 2827.433};
  for (int k = 0; k < 3; ++k)
    CHECK(c.tiers[k].density * std::numbers::pi * 9e6 == doctest::Approx(expected[k]).epsilon(1e-5));

  double sum[3] = {0, 0, 0};
  const int runs = 400;
  for (int s = 0; s < runs; ++s) {
    RandomStream rng(1000 + s);
    auto r = sample_realization(c, rng);
    for (int k = 0; k < 3; ++k) sum[k] += static_cast<double>(r.distances[k].size());
  }
  for (int k = 0; k < 3; ++k) CHECK(sum[k] / runs == doctest::Approx(expected[k]).epsilon(0.01));
}

TEST_CASE("distances sorted, serving excluded from coordination set") {
  auto c = three_tier(2000.0);
  c.coord_set_size = 1;
  for (int s = 0; s < 50; ++s) {
    RandomStream rng(s);
    auto r = sample_realization(c, rng);
    for (const auto& d : r.distances) CHECK(std::is_sorted(d.begin(), d.end()));
    REQUIRE(r.coord_set.size() == 1);
    CHECK_FALSE(r.coord_set[0] == r.serving);
    auto [k, r1] = associate(r.distances, c.tiers);
    CHECK(k == r.serving.tier);
    CHECK(r.serving.index == 0);
    CHECK(r1 == r.serving_distance);
  }
}

TEST_CASE("single tier with one BS") {
  std::vector<TierParams> tiers{{1, 1e-6, 1.0, 2, 4.0, 0}};
  std::vector<std::vector<double>> d{{123.0}};
  auto [k, r1] = associate(d, tiers);
  CHECK(k == 0);
  CHECK(r1 == 123.0);
  CHECK(select_coordination_set(d, tiers, {0, 0}, 0).empty());
}

TEST_CASE("association examples") {
  std::vector<TierParams> tiers{{1, 1e-6, 40.0, 8, 4.0, 0}, {2, 1e-6, 5.0, 4, 4.0, 0}};
  std::vector<std::vector<double>> d{{100.0, 300.0}, {50.0, 400.0}};
  CHECK(associate(d, tiers).first == 1);

  // equal powers and exponents: globally nearest BS wins
  tiers[1].power = 40.0;
  d = {{80.0}, {90.0}};
  CHECK(associate(d, tiers).first == 0);

  // scaling every power by a constant keeps the winner
  for (int s = 0; s < 100; ++s) {
    auto c = three_tier(1500.0);
    RandomStream rng(77 + s);
    auto r = sample_realization(c, rng);
    auto scaled = c.tiers;
    for (auto& t : scaled) t.power *= 3.7;
    CHECK(associate(r.distances, scaled).first == associate(r.distances, c.tiers).first);
  }
}

TEST_CASE("coordination set matches exhaustive sort") {
  auto c = three_tier(1500.0);
  for (int s = 0; s < 40; ++s) {
    RandomStream rng(500 + s);
    auto r = sample_realization(c, rng);
    const auto oracle = exhaustive_order(r.distances, c.tiers, r.serving);
    for (std::size_t size : {0u, 1u, 3u, 6u}) {
      auto set = select_coordination_set(r.distances, c.tiers, r.serving, size);
      REQUIRE(set.size() == size);
      for (std::size_t j = 0; j < size; ++j) CHECK(set[j] == oracle[j]);
    }
  }
  // single tier, size 1: the second-nearest BS
  std::vector<TierParams> one{{1, 1e-6, 1.0, 4, 3.0, 0}};
  std::vector<std::vector<double>> d{{10.0, 20.0, 30.0}};
  auto set = select_coordination_set(d, one, {0, 0}, 1);
  REQUIRE(set.size() == 1);
  CHECK(set[0] == BsRef{0, 1});
  CHECK_THROWS(select_coordination_set(d, one, {0, 0}, 3));
}

TEST_CASE("nearest distance law") {
  // Kolmogorov-Smirnov distance of r1 against 1 - exp(-lambda pi r^2)
  NetworkConfig c;
  c.tiers = {{1, 1e-5, 1.0, 2, 4.0, 0}};
  c.sim_radius = 1500.0;
  const int n = 20000;
  std::vector<double> r1;
  for (int s = 0; s < n; ++s) {
    RandomStream rng(derive_seed(9, s));
    auto r = sample_realization(c, rng);
    r1.push_back(r.distances[0][0]);
  }
  std::sort(r1.begin(), r1.end());
  double ks = 0.0;
  for (int j = 0; j < n; ++j) {
    const double f = 1.0 - std::exp(-1e-5 * std::numbers::pi * r1[j] * r1[j]);
    ks = std::max({ks, std::abs(f - (j + 1.0) / n), std::abs(f - static_cast<double>(j) / n)});
  }
  CHECK(ks < 0.015);
}

TEST_CASE("zero-forcing infeasible is a config error") {
  auto c = three_tier(1000.0);
  c.coord_set_size = 2;
  c.serving_tier = 2;  // two antennas
  RandomStream rng(1);
  CHECK_THROWS_AS(sample_realization(c, rng), ConfigError);
}

TEST_CASE("forced serving tier and default radius") {
  auto c = three_tier(0.0);
  c.serving_tier = 0;
  const double R = c.resolved_radius();
  CHECK(R > 0.0);
  CHECK(R == default_sim_radius(c.tiers));
  // beyond R the mean interference is below 0.1% of the reference tail
  const double ref = far_field_interference(c.tiers, 1.0 / std::sqrt(std::numbers::pi * 1.6e-4));
  CHECK(far_field_interference(c.tiers, R) <= 1e-3 * ref * (1 + 1e-6));
  c.sim_radius = 1500.0;
  RandomStream rng(3);
  auto r = sample_realization(c, rng);
  CHECK(r.serving.tier == 0);
}

TEST_CASE("far field term closed form") {
  std::vector<TierParams> t{{1, 2e-6, 10.0, 2, 4.0, 0}};
  // 2 pi lambda p R^(2-a) / (a-2)
  CHECK(far_field_interference(t, 1000.0) ==
        doctest::Approx(2 * std::numbers::pi * 2e-6 * 10.0 * 1e-6 / 2.0));
}

TEST_CASE("empty draws are resampled") {
  NetworkConfig c;
  c.tiers = {{1, 1e-7, 1.0, 2, 4.0, 0}};
  c.sim_radius = 1000.0;  // mean count 0.31
  std::size_t total = 0;
  for (int s = 0; s < 50; ++s) {
    RandomStream rng(s);
    auto r = sample_realization(c, rng);
    CHECK(r.bs_count() >= 1);
    total += r.resamples;
  }
  CHECK(total > 0);
}

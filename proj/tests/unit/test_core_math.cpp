#include "codethresh/core_math.hpp"
#include "codethresh/errors.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace codethresh;

TEST_CASE("entropy of uniform and point-mass distributions") {
  const std::vector<double> uniform(8, 0.125);
  CHECK(entropy_q(uniform, 2).value == doctest::Approx(3.0).epsilon(1e-15));
  const std::vector<double> point = {0.0, 1.0, 0.0};
  CHECK(entropy_q(point, 3).value == 0.0);
  CHECK(entropy_q(point, 3).base == 3);
}

TEST_CASE("entropy of the list-of-two maximizer at p = 0.1") {
  // 1 + h(0.3) + 0.3 log2 3 with the mass split (0.35, 0.35, 0.05 x 6).
  std::vector<double> tau(8, 0.05);
  tau[0] = tau[7] = 0.35;
  CHECK(entropy_q(tau, 2).value == doctest::Approx(2.3567796494470397).epsilon(1e-12));
}

TEST_CASE("entropy rejects unnormalized input and names the deviation") {
  const std::vector<double> bad = {0.5, 0.6};
  CHECK_THROWS_AS(entropy_q(bad, 2), ValidationError);
  try {
    entropy_q(bad, 2);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("0.1") != std::string::npos);
  }
}

TEST_CASE("entropy stays within [0, log_q support]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int q = 2 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % 12);
    std::vector<double> dist(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& x : dist) {
      x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      total += x;
    }
    for (auto& x : dist) {
      x /= total;
    }
    const double h = entropy_q(dist, q).value;
    CHECK(h >= -1e-15);
    CHECK(h <= log_q(k, q) + 1e-12);
  }
}

TEST_CASE("q-ary entropy values") {
  CHECK(q_ary_entropy(0.3, 2) == doctest::Approx(0.8812908992306927).epsilon(1e-14));
  CHECK(q_ary_entropy(0.5, 2) == doctest::Approx(1.0).epsilon(1e-15));
  for (int q = 2; q <= 9; ++q) {
    CHECK(q_ary_entropy(1.0 - 1.0 / q, q) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(q_ary_entropy(0.0, 3) == 0.0);
  CHECK_THROWS_AS(q_ary_entropy(-0.1, 2), DomainError);
  CHECK_THROWS_AS(q_ary_entropy(1.1, 2), DomainError);
}

TEST_CASE("q-ary entropy agrees with entropy of the spread distribution") {
  for (int q = 2; q <= 6; ++q) {
    for (double x = 0.05; x < 1.0; x += 0.05) {
      std::vector<double> dist(static_cast<std::size_t>(q), x / (q - 1));
      dist[0] = 1.0 - x;
      CHECK(q_ary_entropy(x, q) == doctest::Approx(entropy_q(dist, q).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("kl divergence values") {
  CHECK(kl_q(0.4, 0.4, 2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_q(0.1, 0.5, 2) == doctest::Approx(0.5310044064107188).epsilon(1e-14));
  CHECK(kl_q(0.0, 0.5, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(kl_q(0.1, 0.0, 2), DomainError);
  CHECK_THROWS_AS(kl_q(0.1, 1.0, 2), DomainError);
}

TEST_CASE("list-decoding identity D(p || 1 - 1/q) = 1 - h_q(p)") {
  for (int q = 2; q <= 8; ++q) {
    const double r = 1.0 - 1.0 / q;
    for (double p = 0.0; p < r; p += 0.01) {
      CHECK(kl_q(p, r, q) == doctest::Approx(1.0 - q_ary_entropy(p, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multinomial coefficients") {
  const std::vector<int> a = {3};
  const std::vector<int> b = {1, 1, 1};
  const std::vector<int> c = {2, 1, 1};
  CHECK(multinomial_exact(3, a) == 1);
  CHECK(multinomial_exact(3, b) == 6);
  CHECK(multinomial_exact(4, c) == 12);
  CHECK_THROWS_AS(multinomial_exact(5, c), ValidationError);
  CHECK_THROWS_AS(log_multinomial(5, c), ValidationError);
}

TEST_CASE("log multinomial matches the exact value up to L = 40") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int total = 1 + static_cast<int>(rng() % 40);
    const int parts_count = 1 + static_cast<int>(rng() % 6);
    std::vector<int> parts(static_cast<std::size_t>(parts_count), 0);
    for (int i = 0; i < total; ++i) {
      ++parts[rng() % parts.size()];
    }
    const BigInt exact = multinomial_exact(total, parts);
    const double ln_exact = std::log(to_double(exact));
    CHECK(log_multinomial(total, parts).ln() == doctest::Approx(ln_exact).epsilon(1e-12));
  }
}

TEST_CASE("LogReal addition matches exact sums") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = static_cast<std::int64_t>(rng() % 1'000'000'000ULL);
    const auto b = static_cast<std::int64_t>(rng() % 1'000'000'000ULL);
    const LogReal sum = LogReal::from_bigint(a) + LogReal::from_bigint(b);
    CHECK(sum.value() == doctest::Approx(static_cast<double>(a + b)).epsilon(1e-12));
  }
  const LogReal zero = LogReal::zero();
  const LogReal five = LogReal::from_value(5.0);
  CHECK((zero + five).value() == doctest::Approx(5.0));
  CHECK((zero * five).is_zero());
  CHECK(LogReal::from_value(9.0).log_base(3) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("LogReal handles magnitudes beyond double range") {
  const BigInt huge = ipow(7, 900);
  const LogReal x = LogReal::from_bigint(huge);
  CHECK(x.log_base(7) == doctest::Approx(900.0).epsilon(1e-14));
  const LogReal doubled = x + x;
  CHECK(doubled.ln() == doctest::Approx(900.0 * std::log(7.0) + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("compensated log sum") {
  LogSumAccumulator acc;
  CHECK(acc.result().is_zero());
  for (int i = 1; i <= 1000; ++i) {
    acc.add_ln(std::log(static_cast<double>(i)));
  }
  CHECK(acc.result().value() == doctest::Approx(500500.0).epsilon(1e-13));
}

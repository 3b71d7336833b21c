#include "codethresh/core_math.hpp"
#include "codethresh/errors.hpp"
#include "codethresh/threshold_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace codethresh;

TEST_CASE("list-of-two beta and threshold at p = 0.1") {
  const LevelProfile profile = level_profile({2, 1, 3});
  const BetaResult b = beta({0.1, 1, 3, 2, 1e-9}, profile);
  CHECK(b.beta == doctest::Approx(2.3567796494470397).epsilon(1e-9));
  REQUIRE(b.alpha_star.has_value());
  const ThresholdResult r = threshold_rate({0.1, 1, 3, 2, 1e-9});
  CHECK(r.r_star == doctest::Approx(0.2144067835176534).epsilon(1e-9));
  CHECK(r.method == Method::bisection);
}

TEST_CASE("zero-rate branch at and above p = 1/4") {
  for (double p : {0.25, 0.3, 0.6, 0.99}) {
    const ThresholdResult r = threshold_rate({p, 1, 3, 2, 1e-6});
    CHECK(r.r_star == 0.0);
    CHECK(r.beta == 3.0);
    CHECK(r.method == Method::zero_rate);
  }
}

TEST_CASE("p = 0 uses the zero-error count") {
  const ThresholdResult r = threshold_rate({0.0, 2, 3, 3, 1e-6});
  CHECK(r.beta == doctest::Approx(2.771243749161422).epsilon(1e-12));
  CHECK(r.method == Method::closed_form_zero_error);
  CHECK(threshold_rate({0.0, 1, 3, 2, 1e-6}).r_star == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(threshold_rate({1e-7, 1, 3, 2, 1e-9}).r_star == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("zero-error and perfect-hashing closed forms") {
  CHECK(zero_error_threshold({2, 1, 2}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(zero_error_threshold({3, 2, 3}) == doctest::Approx(0.07625208361285928).epsilon(1e-12));
  CHECK(zero_error_threshold({4, 4, 5}) == 0.0);
  CHECK(perfect_hashing_threshold(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(perfect_hashing_threshold(3) == doctest::Approx(0.07625208361285928).epsilon(1e-12));
  CHECK(perfect_hashing_threshold(4) == doctest::Approx(0.017752375609053486).epsilon(1e-12));
}

TEST_CASE("list-of-two closed form") {
  CHECK(list_of_two_rc_threshold(0.1) == doctest::Approx(0.2144067835176534).epsilon(1e-12));
  CHECK(list_of_two_rc_threshold(0.05) == doctest::Approx(0.3841384400584754).epsilon(1e-12));
  CHECK(std::abs(list_of_two_rc_threshold(0.25 - 1e-12)) < 1e-6);
  CHECK_THROWS_AS(list_of_two_rc_threshold(0.0), DomainError);
  CHECK_THROWS_AS(list_of_two_rc_threshold(0.25), DomainError);
}

TEST_CASE("closed forms agree with the solver") {
  for (double p = 0.01; p < 0.25; p += 0.01) {
    CHECK(threshold_rate({p, 1, 3, 2, 1e-9}).r_star ==
          doctest::Approx(list_of_two_rc_threshold(p)).epsilon(1e-6));
    const auto closed = closed_form_threshold({p, 1, 3, 2, 1e-9});
    REQUIRE(closed.has_value());
    CHECK(closed->method == Method::list_of_two_rc);
  }
  for (int q = 2; q <= 6; ++q) {
    CHECK(threshold_rate({0.0, q - 1, q, q, 1e-9}).r_star ==
          doctest::Approx(perfect_hashing_threshold(q)).epsilon(1e-12));
  }
  CHECK_FALSE(closed_form_threshold({0.1, 1, 4, 2, 1e-9}).has_value());
}

TEST_CASE("result invariants over a parameter grid") {
  for (int q = 2; q <= 4; ++q) {
    for (int ell = 1; ell <= q; ++ell) {
      for (int L = 2; L <= 7; ++L) {
        const LevelProfile profile = level_profile({q, ell, L});
        double previous_beta = -1.0;
        double previous_rate = 2.0;
        for (int k = 0; k < 50; ++k) {
          const double p = 0.02 * k;
          const ThresholdResult r = threshold_rate({p, ell, L, q, 1e-8}, profile);
          CHECK(r.r_star == doctest::Approx(1.0 - r.beta / L).epsilon(1e-12));
          CHECK(r.beta >= 0.0);
          CHECK(r.beta <= L + 1e-12);
          CHECK(r.r_star >= 0.0);
          CHECK(r.r_star <= 1.0);
          CHECK((r.method == Method::zero_rate) == (p * L >= profile.t_star));
          CHECK((r.r_star == 0.0) == (p * L >= profile.t_star));
          CHECK(r.beta >= previous_beta - 1e-8);
          CHECK(r.r_star <= previous_rate + 1e-8);
          if (p > 0.0 && p * L < profile.t_star && k > 1) {
            CHECK(r.beta > previous_beta);
          }
          previous_beta = r.beta;
          previous_rate = r.r_star;
        }
      }
    }
  }
}

TEST_CASE("dual objective is convex and bracketed") {
  for (int q = 2; q <= 4; ++q) {
    for (int ell = 1; ell < q; ++ell) {
      for (int L = 2; L <= 8; ++L) {
        const LevelProfile profile = level_profile({q, ell, L});
        for (double p = 0.01; p * L < profile.t_star; p += 0.03) {
          const DualObjective g(profile, p);
          const double lo = g.bracket_lower();
          CHECK(lo == doctest::Approx(-(L + log_q(1.0 / p, q))));
          CHECK(g.derivative(0.0) > 0.0);
          CHECK(g.derivative(lo) < 0.0);
          const int steps = 200;
          double previous = g.derivative(lo);
          for (int i = 1; i < steps; ++i) {
            const double a1 = lo + (i - 1) * (-lo) / steps;
            const double a2 = lo + i * (-lo) / steps;
            const double a3 = lo + (i + 1) * (-lo) / steps;
            CHECK(g.value(a2) <= (g.value(a1) + g.value(a3)) / 2.0 + 1e-9);
            const double d = g.derivative(a2);
            CHECK(d >= previous - 1e-12);
            previous = d;
          }
        }
      }
    }
  }
}

TEST_CASE("beta within fitted C q log L of L(1 - D(p || r))") {
  struct Point {
    int q, L;
    double gap;
  };
  std::vector<Point> points;
  for (int q = 2; q <= 4; ++q) {
    for (int ell = 1; ell < q; ++ell) {
      const double r = 1.0 - static_cast<double>(ell) / q;
      for (int L : {8, 16, 32, 64}) {
        const LevelProfile profile = level_profile({q, ell, L});
        for (double p = 0.02; p < r; p += 0.04) {
          const double b = threshold_rate({p, ell, L, q, 1e-9}, profile).beta;
          points.push_back({q, L, std::abs(b - L * (1.0 - kl_q(p, r, q)))});
        }
      }
    }
  }
  double fitted = 0.0;
  for (const auto& pt : points) {
    if (pt.L <= 16) {
      fitted = std::max(fitted, pt.gap / (pt.q * std::log(pt.L)));
    }
  }
  MESSAGE("fitted beta constant C = " << fitted);
  for (const auto& pt : points) {
    if (pt.L > 16) {
      CHECK(pt.gap <= fitted * pt.q * std::log(pt.L));
    }
  }
}

TEST_CASE("KL estimate") {
  const KlEstimate zero_rate = kl_estimate({0.6, 1, 10, 2, 1e-6});
  CHECK(zero_rate.estimate == 0.0);
  for (int q = 2; q <= 5; ++q) {
    for (double p = 0.0; p < 1.0 - 1.0 / q; p += 0.05) {
      CHECK(kl_estimate({p, 1, 20, q, 1e-6}).estimate ==
            doctest::Approx(1.0 - q_ary_entropy(p, q)).epsilon(1e-12));
    }
  }
  const KlEstimate small = kl_estimate({0.0, 1, 3, 2, 1e-6});
  CHECK(small.estimate == doctest::Approx(1.0));
  CHECK(small.band == doctest::Approx(2.0 * std::log(3.0) / 3.0));
  const double exact = zero_error_threshold({2, 1, 3});
  CHECK(exact == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(small.estimate - exact) <= small.band);
}

TEST_CASE("toy-property rates") {
  const ToyRates r = toy_property_rates(0.1);
  CHECK(r.r_theorem ==
        doctest::Approx(1.0 - (0.1 * std::log2(200.0) + 0.8 * std::log2(1.25)) / 3.0).epsilon(1e-12));
  CHECK(r.r_dagger ==
        doctest::Approx(1.0 - (0.1 * std::log2(20.0) + 0.9 * std::log2(1 / 0.9)) / 2.0).epsilon(1e-12));
  CHECK(r.r_dagger > r.r_theorem);
  const ToyRates tiny = toy_property_rates(1e-9);
  CHECK(tiny.r_theorem == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tiny.r_dagger == doctest::Approx(1.0).epsilon(1e-6));
  const ToyRates edge = toy_property_rates(0.3);
  CHECK(edge.r_dagger - edge.r_theorem > 0.0);
  CHECK_THROWS_AS(toy_property_rates(0.0), DomainError);
  CHECK_THROWS_AS(toy_property_rates(0.5), DomainError);
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(threshold_rate({1.0, 1, 3, 2, 1e-6}), DomainError);
  CHECK_THROWS_AS(threshold_rate({-0.1, 1, 3, 2, 1e-6}), ValidationError);
  CHECK_THROWS_AS(threshold_rate({0.1, 3, 3, 2, 1e-6}), ValidationError);
  CHECK_THROWS_AS(threshold_rate({0.1, 1, 1, 2, 1e-6}), ValidationError);
  CHECK_THROWS_AS(threshold_rate({0.1, 1, 3, 2, 0.0}), ValidationError);
}

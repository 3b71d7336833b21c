#include "codethresh/threshold_solver.hpp"

#include "codethresh/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace codethresh {

void ThresholdQuery::validate() const {
  if (q < 2) {
    throw ValidationError("q must be >= 2, got " + std::to_string(q));
  }
  if (L < 2) {
    throw ValidationError("L must be >= 2, got " + std::to_string(L));
  }
  if (ell < 1 || ell > q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q (ell=" + std::to_string(ell) +
                          ", q=" + std::to_string(q) + ")");
  }
  if (!(p >= 0.0)) {
    throw ValidationError("p must be >= 0");
  }
  if (p >= 1.0) {
    throw DomainError("p must be < 1");
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("epsilon must be > 0");
  }
}

std::string_view to_string(Method method) {
  switch (method) {
  case Method::closed_form_zero_error:
    return "closed_form_zero_error";
  case Method::zero_rate:
    return "zero_rate";
  case Method::bisection:
    return "bisection";
  case Method::list_of_two_rc:
    return "list_of_two_rc";
  case Method::perfect_hashing:
    return "perfect_hashing";
  }
  return "unknown";
}

DualObjective::DualObjective(const LevelProfile& profile, double p)
    : profile_(&profile), p_(p), lnq_(std::log(static_cast<double>(profile.params.q))) {}

namespace {

struct TiltedSums {
  double ln_partition = 0.0; // ln sum_d |D_d| q^{alpha d}
  double mean = 0.0;         // tilted mean level
};

TiltedSums tilted_sums(const LevelProfile& profile, double alpha, double lnq) {
  const auto& counts = profile.log_counts;
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (!counts[d].is_zero()) {
      max_exponent = std::max(max_exponent, counts[d].ln() + alpha * static_cast<double>(d) * lnq);
    }
  }
  double z = 0.0;
  double first_moment = 0.0;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (counts[d].is_zero()) {
      continue;
    }
    const double w =
        std::exp(counts[d].ln() + alpha * static_cast<double>(d) * lnq - max_exponent);
    z += w;
    first_moment += w * static_cast<double>(d);
  }
  return {max_exponent + std::log(z), first_moment / z};
}

} // namespace

double DualObjective::value(double alpha) const {
  const TiltedSums sums = tilted_sums(*profile_, alpha, lnq_);
  return sums.ln_partition / lnq_ - alpha * p_ * static_cast<double>(profile_->params.L);
}

double DualObjective::tilted_mean(double alpha) const {
  return tilted_sums(*profile_, alpha, lnq_).mean;
}

double DualObjective::derivative(double alpha) const {
  return tilted_mean(alpha) - p_ * static_cast<double>(profile_->params.L);
}

double DualObjective::bracket_lower() const {
  assert(p_ > 0.0);
  return -(static_cast<double>(profile_->params.L) + std::log(1.0 / p_) / lnq_);
}

BetaResult beta(const ThresholdQuery& query, const LevelProfile& profile) {
  query.validate();
  const auto& params = profile.params;
  if (params.q != query.q || params.ell != query.ell || params.L != query.L) {
    throw ValidationError("level profile does not match the query's (q, ell, L)");
  }
  const double L = static_cast<double>(query.L);

  if (query.p * L >= profile.t_star) {
    return {L, std::nullopt, 0};
  }
  if (query.p == 0.0) {
    // Constant vectors always sit in D_0, so the zero level is never empty.
    assert(!profile.log_counts.front().is_zero());
    return {profile.log_q_count(0), std::nullopt, 0};
  }

  const DualObjective g(profile, query.p);
  double lo = g.bracket_lower();
  double hi = 0.0;
  const double tolerance = query.epsilon * L / 2.0;
  double previous = g.value(0.5 * (lo + hi));
  int iterations = 0;
  constexpr int kMaxIterations = 400;
  while (iterations < kMaxIterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break; // bracket at floating-point resolution
    }
    if (g.derivative(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++iterations;
    const double current = g.value(0.5 * (lo + hi));
    const bool narrow = L * (hi - lo) <= tolerance;
    const bool settled = std::abs(current - previous) < tolerance;
    previous = current;
    if (narrow && settled) {
      break;
    }
  }
  const double mid = 0.5 * (lo + hi);
  // g bounds beta from above everywhere, so the smallest probe is the best.
  const double best = std::min({g.value(lo), g.value(mid), g.value(hi)});
  return {best, mid, iterations};
}

ThresholdResult threshold_rate(const ThresholdQuery& query) {
  query.validate();
  const LevelProfile profile = level_profile(query.level_params());
  return threshold_rate(query, profile);
}

ThresholdResult threshold_rate(const ThresholdQuery& query, const LevelProfile& profile) {
  const BetaResult b = beta(query, profile);
  const double L = static_cast<double>(query.L);
  ThresholdResult result;
  result.beta = b.beta;
  result.alpha_star = b.alpha_star;
  result.error_bound = query.epsilon;
  if (query.p * L >= profile.t_star) {
    result.method = Method::zero_rate;
    result.r_star = 0.0;
  } else {
    result.method = query.p == 0.0 ? Method::closed_form_zero_error : Method::bisection;
    result.r_star = std::clamp(1.0 - b.beta / L, 0.0, 1.0);
  }
  return result;
}

double zero_error_threshold(const LevelSetParams& params) {
  const LevelProfile profile = level_profile(params);
  const double log_fraction =
      profile.log_q_count(0) - static_cast<double>(params.L); // log_q(|D_0| / q^L)
  return std::max(0.0, -log_fraction / static_cast<double>(params.L));
}

double perfect_hashing_threshold(int q) {
  if (q < 2) {
    throw ValidationError("q must be >= 2");
  }
  // q!/q^q as a running product of i/q.
  double ratio = 1.0;
  for (int i = 1; i <= q; ++i) {
    ratio *= static_cast<double>(i) / static_cast<double>(q);
  }
  const double qd = static_cast<double>(q);
  return -std::log1p(-ratio) / std::log(qd) / qd;
}

double list_of_two_rc_threshold(double p) {
  if (!(p > 0.0 && p < 0.25)) {
    throw DomainError("list_of_two_rc_threshold requires p in (0, 1/4)");
  }
  const double x = 3.0 * p;
  return 1.0 - (1.0 + q_ary_entropy(x, 2) + x * std::log2(3.0)) / 3.0;
}

std::optional<ThresholdResult> closed_form_threshold(const ThresholdQuery& query) {
  query.validate();
  ThresholdResult result;
  result.error_bound = 0.0;
  const double L = static_cast<double>(query.L);
  if (query.p == 0.0) {
    const bool hashing = query.ell == query.q - 1 && query.L == query.q;
    result.method = hashing ? Method::perfect_hashing : Method::closed_form_zero_error;
    result.r_star = hashing ? perfect_hashing_threshold(query.q)
                            : zero_error_threshold(query.level_params());
    result.beta = L * (1.0 - result.r_star);
    return result;
  }
  if (query.q == 2 && query.ell == 1 && query.L == 3 && query.p < 0.25) {
    result.method = Method::list_of_two_rc;
    result.r_star = list_of_two_rc_threshold(query.p);
    result.beta = L * (1.0 - result.r_star);
    return result;
  }
  return std::nullopt;
}

KlEstimate kl_estimate(const ThresholdQuery& query) {
  query.validate();
  const double r = 1.0 - static_cast<double>(query.ell) / static_cast<double>(query.q);
  const double L = static_cast<double>(query.L);
  KlEstimate out;
  out.band = static_cast<double>(query.q) * std::log(L) / L;
  out.estimate = query.p < r ? kl_q(query.p, r, query.q) : 0.0;
  return out;
}

ToyRates toy_property_rates(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw DomainError("toy_property_rates requires p in (0, 1/2)");
  }
  const double max_type_entropy =
      p * std::log2(2.0 / (p * p)) + (1.0 - 2.0 * p) * std::log2(1.0 / (1.0 - 2.0 * p));
  const double projected_entropy =
      p * std::log2(2.0 / p) + (1.0 - p) * std::log2(1.0 / (1.0 - p));
  return {1.0 - max_type_entropy / 3.0, 1.0 - projected_entropy / 2.0};
}

} // namespace codethresh

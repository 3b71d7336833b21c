#pragma once

#include "codethresh/level_sets.hpp"

#include <optional>
#include <string_view>

namespace codethresh {

struct ThresholdQuery {
  double p = 0.0;
  int ell = 1;
  int L = 2;
  int q = 2;
  double epsilon = 1e-6; // additive tolerance on R*

  void validate() const;
  LevelSetParams level_params() const { return {q, ell, L}; }
};

enum class Method {
  closed_form_zero_error,
  zero_rate,
  bisection,
  list_of_two_rc,
  perfect_hashing,
};

std::string_view to_string(Method method);

struct ThresholdResult {
  double r_star = 0.0;
  double beta = 0.0;
  std::optional<double> alpha_star;
  Method method = Method::bisection;
  double error_bound = 0.0;
};

/// g(alpha) = log_q(sum_d |D_d| q^{alpha d}) - alpha p L, whose infimum over
/// alpha is the maximum entropy of a bad histogram type. Evaluated in the log
/// domain with the largest term factored out.
class DualObjective {
public:
  DualObjective(const LevelProfile& profile, double p);

  double value(double alpha) const;
  double derivative(double alpha) const;
  /// Mean level under mu_alpha(d) proportional to |D_d| q^{alpha d}.
  double tilted_mean(double alpha) const;

  /// The search interval [-(L + log_q(1/p)), 0]; requires p > 0.
  double bracket_lower() const;

private:
  const LevelProfile* profile_;
  double p_;
  double lnq_;
};

struct BetaResult {
  double beta = 0.0;
  std::optional<double> alpha_star;
  int iterations = 0;
};

/// beta(p, ell, L): maximum base-q entropy over bad histogram types.
BetaResult beta(const ThresholdQuery& query, const LevelProfile& profile);

/// R* = 1 - beta/L.
ThresholdResult threshold_rate(const ThresholdQuery& query);
ThresholdResult threshold_rate(const ThresholdQuery& query, const LevelProfile& profile);

/// The same threshold from a closed form, where one is known for the query's
/// parameter slice: p = 0 (any ell, L), q = ell + 1 = L with p = 0 (perfect
/// hashing), and q = 2, ell = 1, L = 3 with 0 < p < 1/4 (list of two).
std::optional<ThresholdResult> closed_form_threshold(const ThresholdQuery& query);

/// -log_q(|D_0| / q^L) / L.
double zero_error_threshold(const LevelSetParams& params);

/// (1/q) log_q(1 / (1 - q!/q^q)).
double perfect_hashing_threshold(int q);

/// 1 - (1 + h(3p) + 3p log 3) / 3 in base 2, for p in (0, 1/4).
double list_of_two_rc_threshold(double p);

struct KlEstimate {
  double estimate = 0.0;
  /// q ln(L) / L; the multiplying constant is not known.
  double band = 0.0;
};

/// D_q(p || 1 - ell/q) when p < 1 - ell/q, else 0.
KlEstimate kl_estimate(const ThresholdQuery& query);

struct ToyRates {
  double r_theorem = 0.0;
  double r_dagger = 0.0;
};

/// Rates for the non-symmetric toy property over F_2: the value predicted
/// from the maximum type entropy, and the lower bound from its two-column
/// projection. p in (0, 1/2).
ToyRates toy_property_rates(double p);

} // namespace codethresh

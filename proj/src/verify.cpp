#include "codethresh/verify.hpp"

#include "codethresh/oracle.hpp"
#include "codethresh/rlc_list_of_two.hpp"
#include "codethresh/simulator.hpp"
#include "codethresh/threshold_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace codethresh {

namespace {

CheckResult check_level_counts() {
  CheckResult r{"level_profile_vs_enumeration", true, 0, 0.0, 0.0};
  for (int q = 2; q <= 6; ++q) {
    for (int L = 1; std::pow(q, L) <= 1e4; ++L) {
      const auto direct = oracle::enumerate_level_counts(q, L);
      for (int ell = 1; ell <= q; ++ell) {
        const LevelProfile profile = level_profile({q, ell, L});
        for (int d = 0; d <= L; ++d) {
          if (profile.counts[static_cast<std::size_t>(d)] !=
              direct[static_cast<std::size_t>(ell) - 1][static_cast<std::size_t>(d)]) {
            r.passed = false;
            r.max_error = 1.0;
          }
        }
        ++r.cases;
      }
    }
  }
  return r;
}

template <typename Oracle>
CheckResult check_dual(const char* name, Oracle&& oracle_beta) {
  CheckResult r{name, true, 0, 0.0, 1e-4};
  for (int q = 2; q <= 3; ++q) {
    for (int ell = 1; ell < q; ++ell) {
      for (int L = 2; L <= 4; ++L) {
        const LevelProfile profile = level_profile({q, ell, L});
        for (double p = 0.05; p * L < profile.t_star; p += 0.05) {
          const ThresholdQuery query{p, ell, L, q, 1e-9};
          const double err = std::abs(beta(query, profile).beta - oracle_beta(p, profile));
          r.max_error = std::max(r.max_error, err);
          ++r.cases;
        }
      }
    }
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

CheckResult check_badness() {
  CheckResult r{"badness_dp_vs_brute_force", true, 0, 0.0, 0.0};
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 7)(rng);
    const int q = 2;
    std::vector<sim::Codeword> columns;
    while (columns.size() < 3) {
      sim::Codeword w(static_cast<std::size_t>(n));
      for (auto& s : w) {
        s = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, q - 1)(rng));
      }
      if (std::find(columns.begin(), columns.end(), w) == columns.end()) {
        columns.push_back(std::move(w));
      }
    }
    const double p = std::uniform_int_distribution<int>(0, n)(rng) / static_cast<double>(n);
    const auto cert = sim::is_bad_tuple(columns, p, 1, q);
    const bool brute = oracle::brute_force_badness(columns, p, 1, q);
    if (cert.has_value() != brute || (cert && !cert->revalidate(p, 1, q))) {
      r.passed = false;
      r.max_error = 1.0;
    }
    ++r.cases;
  }
  return r;
}

CheckResult check_closed_forms() {
  CheckResult r{"closed_forms_vs_solver", true, 0, 0.0, 1e-6};
  for (double p : {0.01, 0.05, 0.10, 0.15, 0.20, 0.24}) {
    const double solver = threshold_rate({p, 1, 3, 2, 1e-9}).r_star;
    r.max_error = std::max(r.max_error, std::abs(solver - list_of_two_rc_threshold(p)));
    ++r.cases;
  }
  for (int q = 2; q <= 6; ++q) {
    const double solver = threshold_rate({0.0, q - 1, q, q, 1e-9}).r_star;
    r.max_error = std::max(r.max_error, std::abs(solver - perfect_hashing_threshold(q)));
    ++r.cases;
  }
  r.passed = r.max_error <= r.tolerance;
  return r;
}

CheckResult check_rlc() {
  CheckResult r{"rlc_scan_vs_closed_form", true, 0, 0.0, 1e-9};
  for (int k = 1; k < 50; ++k) {
    const double p = 0.005 * k;
    const auto scan = rlc::implied_type_scan(p);
    r.max_error =
        std::max(r.max_error, std::abs((1.0 - scan.min_ratio) - rlc::rlc_list_of_two_threshold(p)));
    if (rlc::curve_family(scan.entries[scan.argmin].matrix) != 1 ||
        rlc::rlc_list_of_two_threshold(p) <= list_of_two_rc_threshold(p)) {
      r.passed = false;
    }
    ++r.cases;
  }
  r.passed = r.passed && r.max_error <= r.tolerance;
  return r;
}

} // namespace

std::vector<CheckResult> run_verification_suite() {
  std::vector<CheckResult> results;
  results.push_back(check_level_counts());
  results.push_back(check_dual("dual_vs_grid_oracle", [](double p, const LevelProfile& profile) {
    return oracle::beta_levelspace_oracle(p, profile, 1 << 18);
  }));
  results.push_back(check_dual("dual_vs_ascent_oracle", [](double p, const LevelProfile& profile) {
    return oracle::beta_levelspace_ascent(p, profile, {.starts = 10});
  }));
  results.push_back(check_badness());
  results.push_back(check_closed_forms());
  results.push_back(check_rlc());
  return results;
}

} // namespace codethresh

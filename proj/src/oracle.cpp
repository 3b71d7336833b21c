#include "codethresh/oracle.hpp"

#include "codethresh/errors.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace codethresh::oracle {

double LevelDistribution::mean_level() const {
  double mean = 0.0;
  for (std::size_t d = 0; d < mu.size(); ++d) {
    mean += static_cast<double>(d) * mu[d];
  }
  return mean;
}

bool LevelDistribution::on_simplex(double tolerance) const {
  double total = 0.0;
  for (double x : mu) {
    if (x < -tolerance) {
      return false;
    }
    total += x;
  }
  return std::abs(total - 1.0) <= tolerance;
}

double level_objective(const LevelDistribution& mu, const LevelProfile& profile) {
  const double lnq = std::log(static_cast<double>(profile.params.q));
  double acc = 0.0;
  for (std::size_t d = 0; d < mu.mu.size(); ++d) {
    const double x = mu.mu[d];
    if (x <= 0.0) {
      continue;
    }
    if (profile.log_counts[d].is_zero()) {
      return -std::numeric_limits<double>::infinity(); // mass on an empty level
    }
    acc += x * (profile.log_counts[d].ln() - std::log(x));
  }
  return acc / lnq;
}

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("oracle requires p in [0, 1)");
  }
}

LevelDistribution point_mass_at_zero(const LevelProfile& profile) {
  LevelDistribution mu;
  mu.mu.assign(static_cast<std::size_t>(profile.params.L) + 1, 0.0);
  mu.mu[0] = 1.0;
  return mu;
}

} // namespace

double beta_levelspace_oracle(double p, const LevelProfile& profile, int grid_steps) {
  check_p(p);
  if (grid_steps < 100) {
    throw ValidationError("grid_steps must be >= 100");
  }
  const double L = static_cast<double>(profile.params.L);
  const double lnq = std::log(static_cast<double>(profile.params.q));
  const double limit = p * L;

  // Always feasible, since its mean level is 0.
  double best = level_objective(point_mass_at_zero(profile), profile);
  assert(std::isfinite(best));
  if (p == 0.0) {
    return best;
  }

  const std::size_t levels = profile.log_counts.size();
  const double lo = -(L + std::log(1.0 / p) / lnq);
  const double hi = 0.0;
  LevelDistribution mu;
  mu.mu.resize(levels);
  std::vector<double> exponent(levels);
  for (int k = 0; k <= grid_steps; ++k) {
    // k / grid_steps is correctly rounded, so a doubled grid contains this one.
    const double alpha = lo + (hi - lo) * (static_cast<double>(k) / grid_steps);
    double max_exponent = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < levels; ++d) {
      exponent[d] = profile.log_counts[d].is_zero()
                        ? -std::numeric_limits<double>::infinity()
                        : profile.log_counts[d].ln() + alpha * static_cast<double>(d) * lnq;
      max_exponent = std::max(max_exponent, exponent[d]);
    }
    double z = 0.0;
    for (std::size_t d = 0; d < levels; ++d) {
      mu.mu[d] = std::exp(exponent[d] - max_exponent);
      z += mu.mu[d];
    }
    double mean = 0.0;
    for (std::size_t d = 0; d < levels; ++d) {
      mu.mu[d] /= z;
      mean += static_cast<double>(d) * mu.mu[d];
    }
    if (mean <= limit) {
      best = std::max(best, level_objective(mu, profile));
    }
  }
  return best;
}

namespace {

// Coordinate ascent state over the nonempty levels. Works in natural log
// units: objective = sum mu_d (C_d - ln mu_d).
class Ascent {
public:
  Ascent(std::vector<int> levels, std::vector<double> ln_counts, double limit)
      : levels_(std::move(levels)), c_(std::move(ln_counts)), limit_(limit) {}

  double objective(const std::vector<double>& mu) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu[i] > 0.0) {
        acc += mu[i] * (c_[i] - std::log(mu[i]));
      }
    }
    return acc;
  }

  double mean(const std::vector<double>& mu) const {
    double m = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      m += levels_[i] * mu[i];
    }
    return m;
  }

  // Moves mass between two levels along e_to - e_from.
  void pair_move(std::vector<double>& mu, std::size_t to, std::size_t from) const {
    double t_max = mu[from];
    const int shift = levels_[to] - levels_[from];
    if (shift > 0) {
      t_max = std::min(t_max, std::max(0.0, limit_ - mean(mu)) / shift);
    }
    if (t_max <= 0.0) {
      return;
    }
    // Stationary point of the two-term objective: mass splits in proportion
    // to the level counts.
    const double total = mu[to] + mu[from];
    const double share = 1.0 / (1.0 + std::exp(c_[from] - c_[to]));
    const double t = std::clamp(total * share - mu[to], 0.0, t_max);
    mu[to] += t;
    mu[from] -= t;
    if (mu[from] < 0.0) {
      mu[from] = 0.0;
    }
  }

  // Mean-preserving move on levels a < b < c along +-(c-b, -(c-a), b-a).
  void triple_move(std::vector<double>& mu, std::size_t a, std::size_t b, std::size_t c,
                   double sign) const {
    const std::array<std::size_t, 3> idx{a, b, c};
    const double la = levels_[a];
    const double lb = levels_[b];
    const double lc = levels_[c];
    const std::array<double, 3> v{sign * (lc - lb), -sign * (lc - la), sign * (lb - la)};
    double t_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (v[i] < 0.0) {
        t_max = std::min(t_max, mu[idx[i]] / -v[i]);
      }
    }
    if (!(t_max > 0.0)) {
      return;
    }
    auto slope = [&](double t) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double x = mu[idx[i]] + t * v[i];
        s += v[i] * (c_[idx[i]] - std::log(std::max(x, 0.0)) - 1.0);
      }
      return s;
    };
    auto curvature = [&](double t) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        s -= v[i] * v[i] / (mu[idx[i]] + t * v[i]);
      }
      return s;
    };
    if (slope(0.0) <= 0.0) {
      return;
    }
    double lo = 0.0;
    double hi = t_max;
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100 && hi - lo > 1e-17; ++iter) {
      const double s = slope(t);
      if (s > 0.0) {
        lo = t;
      } else {
        hi = t;
      }
      // Newton step when it stays inside the bracket, bisection otherwise.
      const double newton = t - s / curvature(t);
      t = (std::isfinite(newton) && newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
      if (std::abs(s) < 1e-15) {
        break;
      }
    }
    for (int i = 0; i < 3; ++i) {
      mu[idx[i]] = std::max(0.0, mu[idx[i]] + t * v[i]);
    }
  }

  double run(std::vector<double> mu, const AscentOptions& options) const {
    const std::size_t m = mu.size();
    double current = objective(mu);
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (i != j) {
            pair_move(mu, i, j);
          }
        }
      }
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          for (std::size_t c = b + 1; c < m; ++c) {
            triple_move(mu, a, b, c, 1.0);
            triple_move(mu, a, b, c, -1.0);
          }
        }
      }
      const double updated = objective(mu);
      const bool settled = updated - current < options.tolerance;
      current = std::max(current, updated);
      if (settled) {
        break;
      }
    }
    return current;
  }

private:
  std::vector<int> levels_;
  std::vector<double> c_;
  double limit_;
};

} // namespace

double beta_levelspace_ascent(double p, const LevelProfile& profile, const AscentOptions& options) {
  check_p(p);
  if (options.starts < 1) {
    throw ValidationError("ascent needs at least one start");
  }
  const double lnq = std::log(static_cast<double>(profile.params.q));
  const double limit = p * static_cast<double>(profile.params.L);

  std::vector<int> levels;
  std::vector<double> ln_counts;
  for (std::size_t d = 0; d < profile.log_counts.size(); ++d) {
    if (!profile.log_counts[d].is_zero()) {
      levels.push_back(static_cast<int>(d));
      ln_counts.push_back(profile.log_counts[d].ln());
    }
  }
  assert(!levels.empty() && levels.front() == 0);
  if (p == 0.0) {
    return ln_counts.front() / lnq;
  }

  const Ascent ascent(levels, ln_counts, limit);
  std::mt19937_64 rng(options.seed);
  std::exponential_distribution<double> unit_exponential(1.0);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.starts; ++s) {
    // Uniform point of the simplex, pulled toward level 0 until feasible.
    std::vector<double> mu(levels.size());
    double total = 0.0;
    for (double& x : mu) {
      x = unit_exponential(rng);
      total += x;
    }
    for (double& x : mu) {
      x /= total;
    }
    const double m = ascent.mean(mu);
    if (m > limit) {
      const double lambda = limit / m;
      for (double& x : mu) {
        x *= lambda;
      }
      mu[0] += 1.0 - lambda;
    }
    best = std::max(best, ascent.run(std::move(mu), options));
  }
  return best / lnq;
}

bool brute_force_badness(std::span<const sim::Codeword> columns, double p, int ell, int q) {
  if (columns.empty()) {
    throw ValidationError("at least one column is required");
  }
  if (ell < 1 || ell > q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q");
  }
  const std::size_t n = columns.front().size();
  for (const auto& column : columns) {
    if (column.size() != n) {
      throw ValidationError("columns must have equal length");
    }
  }

  std::vector<std::vector<int>> subsets;
  std::vector<int> pick;
  std::function<void(int)> choose = [&](int start) {
    if (static_cast<int>(pick.size()) == ell) {
      subsets.push_back(pick);
      return;
    }
    for (int s = start; s < q; ++s) {
      pick.push_back(s);
      choose(s + 1);
      pick.pop_back();
    }
  };
  choose(0);

  const double assignments = std::pow(static_cast<double>(subsets.size()), static_cast<double>(n));
  if (assignments > kBruteForceBudget) {
    throw BudgetError("brute force would try " + std::to_string(assignments) +
                      " assignments (budget 1e6)");
  }

  const int budget = sim::violation_budget(p, static_cast<int>(n));
  std::vector<std::size_t> choice(n, 0);
  for (;;) {
    bool all_within = true;
    for (const auto& column : columns) {
      int violations = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& k = subsets[choice[i]];
        if (std::find(k.begin(), k.end(), column[i]) == k.end()) {
          ++violations;
        }
      }
      if (violations > budget) {
        all_within = false;
        break;
      }
    }
    if (all_within) {
      return true;
    }
    std::size_t i = 0;
    while (i < n && ++choice[i] == subsets.size()) {
      choice[i] = 0;
      ++i;
    }
    if (i == n) {
      return false;
    }
  }
}

} // namespace codethresh::oracle

namespace codethresh::oracle {

std::vector<std::vector<std::uint64_t>> enumerate_level_counts(int q, int L) {
  LevelSetParams{q, 1, L}.validate();
  std::uint64_t total = 1;
  for (int i = 0; i < L; ++i) {
    total *= static_cast<std::uint64_t>(q);
    if (total > kEnumerationBudget) {
      throw BudgetError("direct enumeration of q^L vectors exceeds the budget");
    }
  }
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(q), std::vector<std::uint64_t>(static_cast<std::size_t>(L) + 1, 0));
  std::vector<int> v(static_cast<std::size_t>(L), 0);
  for (std::uint64_t index = 0; index < total; ++index) {
    for (int ell = 1; ell <= q; ++ell) {
      ++counts[static_cast<std::size_t>(ell) - 1][static_cast<std::size_t>(p_ell(v, ell, q))];
    }
    for (std::size_t i = 0; i < v.size() && ++v[i] == q; ++i) {
      v[i] = 0;
    }
  }
  return counts;
}

} // namespace codethresh::oracle

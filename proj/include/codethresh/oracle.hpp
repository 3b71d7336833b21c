#pragma once

#include "codethresh/level_sets.hpp"
#include "codethresh/simulator.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace codethresh::oracle {

/// Mass on each level d = 0..L.
struct LevelDistribution {
  std::vector<double> mu;

  double mean_level() const;
  bool on_simplex(double tolerance = 1e-12) const;
};

/// F(mu) = H_q(mu) + sum_d mu_d log_q |D_d|: the entropy of the distribution on
/// [q]^L that is uniform inside each level set and puts mass mu_d on level d.
double level_objective(const LevelDistribution& mu, const LevelProfile& profile);

/// max F(mu) subject to mean_level(mu) <= pL, scanning the tilted family
/// mu_d proportional to |D_d| q^{alpha d} over grid_steps + 1 equally spaced
/// alpha in [-(L + log_q(1/p)), 0], plus the point mass on level 0.
double beta_levelspace_oracle(double p, const LevelProfile& profile, int grid_steps);

struct AscentOptions {
  int starts = 50;
  std::uint64_t seed = 0x5eed;
  int max_sweeps = 5000;
  double tolerance = 1e-13;
};

/// The same maximum by coordinate ascent directly on mu from random feasible
/// starting points. Moves shift mass between two levels (respecting the mean
/// bound) or among three levels with the mean held fixed; together these
/// span every feasible direction of the constraint set.
double beta_levelspace_ascent(double p, const LevelProfile& profile,
                              const AscentOptions& options = {});

/// Largest q^L enumerate_level_counts will walk.
inline constexpr std::uint64_t kEnumerationBudget = 50'000'000ULL;

/// Level-set sizes by direct enumeration of [q]^L, for every ell = 1..q at
/// once: result[ell - 1][d] = |{v : P_ell(v) = d}|.
std::vector<std::vector<std::uint64_t>> enumerate_level_counts(int q, int L);

/// Upper bound on C(q, ell)^n for brute_force_badness.
inline constexpr double kBruteForceBudget = 1e6;

/// Tries every assignment of size-ell sets K_1..K_n.
bool brute_force_badness(std::span<const sim::Codeword> columns, double p, int ell, int q);

} // namespace codethresh::oracle

#pragma once

#include "codethresh/core_math.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace codethresh {

/// Alphabet size q, list size ell and tuple size L.
struct LevelSetParams {
  int q = 2;
  int ell = 1;
  int L = 1;

  void validate() const;
};

/// Cardinalities |D_d| of the level sets {v in [q]^L : P_ell(v) = d}, d = 0..L.
///
/// Counts are exact big integers while q^L <= 2^256. Past that limit only the
/// log-domain counts are kept and `approximate` is set.
struct LevelProfile {
  LevelSetParams params;
  std::vector<BigInt> counts;    // empty when approximate
  std::vector<LogReal> log_counts;
  bool approximate = false;
  double t_star = 0.0;

  /// log_q |D_d|, -inf for empty levels.
  double log_q_count(int d) const;
  /// Largest d with |D_d| > 0.
  int max_level() const;
};

/// Largest q^L (as a bit count) for which counts are kept exactly.
inline constexpr int kExactCountBits = 256;

/// Upper bound on the number of histograms level_profile will enumerate.
inline constexpr std::uint64_t kCompositionBudget = 200'000'000ULL;

/// Minimum over ell-subsets A of the number of entries of v outside A.
int p_ell(std::span<const int> v, int ell, int q);

/// Same quantity from a symbol histogram (entries sum to L).
int p_ell_from_histogram(std::span<const int> histogram, int ell);

LevelProfile level_profile(const LevelSetParams& params);

/// q^{-L} sum_d d |D_d|.
double t_star(const LevelProfile& profile);

/// Number of compositions of L into q nonnegative parts, saturating at 2^64-1.
std::uint64_t composition_count(int L, int q);

} // namespace codethresh

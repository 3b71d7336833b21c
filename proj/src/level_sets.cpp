#include "codethresh/level_sets.hpp"

#include "codethresh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace codethresh {

void LevelSetParams::validate() const {
  if (q < 2) {
    throw ValidationError("q must be >= 2, got " + std::to_string(q));
  }
  if (L < 1) {
    throw ValidationError("L must be >= 1, got " + std::to_string(L));
  }
  if (ell < 1 || ell > q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q (ell=" + std::to_string(ell) +
                          ", q=" + std::to_string(q) + ")");
  }
}

double LevelProfile::log_q_count(int d) const {
  return log_counts.at(static_cast<std::size_t>(d)).log_base(params.q);
}

int LevelProfile::max_level() const {
  for (int d = params.L; d >= 0; --d) {
    if (!log_counts[static_cast<std::size_t>(d)].is_zero()) {
      return d;
    }
  }
  return 0;
}

int p_ell_from_histogram(std::span<const int> histogram, int ell) {
  std::vector<int> sorted(histogram.begin(), histogram.end());
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(ell), sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take),
                    sorted.end(), std::greater<>());
  const int total = std::accumulate(sorted.begin(), sorted.end(), 0);
  const int covered =
      std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take), 0);
  return total - covered;
}

int p_ell(std::span<const int> v, int ell, int q) {
  if (q < 2) {
    throw ValidationError("q must be >= 2");
  }
  if (ell < 1 || ell > q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q");
  }
  std::vector<int> histogram(static_cast<std::size_t>(q), 0);
  for (int symbol : v) {
    if (symbol < 0 || symbol >= q) {
      throw ValidationError("symbol " + std::to_string(symbol) + " outside alphabet [0," +
                            std::to_string(q - 1) + "]");
    }
    ++histogram[static_cast<std::size_t>(symbol)];
  }
  return p_ell_from_histogram(histogram, ell);
}

std::uint64_t composition_count(int L, int q) {
  // C(L + q - 1, q - 1), computed incrementally with saturation.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const int k = std::min(q - 1, L);
  const int n = L + q - 1;
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > kMax) {
      return kMax;
    }
  }
  return result.convert_to<std::uint64_t>();
}

namespace {

// Calls visit(histogram) for every composition of L into q nonnegative parts.
template <typename Visit>
void for_each_composition(int L, int q, Visit&& visit) {
  std::vector<int> parts(static_cast<std::size_t>(q), 0);
  std::function<void(int, int)> fill = [&](int index, int remaining) {
    if (index == q - 1) {
      parts[static_cast<std::size_t>(index)] = remaining;
      visit(std::span<const int>(parts));
      return;
    }
    for (int value = remaining; value >= 0; --value) {
      parts[static_cast<std::size_t>(index)] = value;
      fill(index + 1, remaining - value);
    }
  };
  fill(0, L);
}

} // namespace

LevelProfile level_profile(const LevelSetParams& params) {
  params.validate();
  const int L = params.L;
  const int q = params.q;

  const std::uint64_t histograms = composition_count(L, q);
  if (histograms > kCompositionBudget) {
    throw BudgetError("level_profile would enumerate " + std::to_string(histograms) +
                      " histograms (budget " + std::to_string(kCompositionBudget) + ")");
  }

  LevelProfile profile;
  profile.params = params;
  const double bits = static_cast<double>(L) * std::log2(static_cast<double>(q));
  profile.approximate = bits > static_cast<double>(kExactCountBits);

  const auto levels = static_cast<std::size_t>(L) + 1;
  if (!profile.approximate) {
    std::vector<BigInt> factorial(levels, 1);
    for (int i = 1; i <= L; ++i) {
      factorial[static_cast<std::size_t>(i)] = factorial[static_cast<std::size_t>(i) - 1] * i;
    }
    profile.counts.assign(levels, 0);
    for_each_composition(L, q, [&](std::span<const int> histogram) {
      BigInt denominator = 1;
      for (int part : histogram) {
        if (part > 1) {
          denominator *= factorial[static_cast<std::size_t>(part)];
        }
      }
      const int d = p_ell_from_histogram(histogram, params.ell);
      profile.counts[static_cast<std::size_t>(d)] += factorial.back() / denominator;
    });
    profile.log_counts.reserve(levels);
    BigInt weighted = 0;
    for (std::size_t d = 0; d < levels; ++d) {
      profile.log_counts.push_back(LogReal::from_bigint(profile.counts[d]));
      weighted += profile.counts[d] * static_cast<int>(d);
    }
    // Both operands stay below 2^265, inside double range.
    profile.t_star = to_double(weighted) / to_double(ipow(q, L));
  } else {
    std::vector<double> ln_factorial(levels, 0.0);
    for (int i = 1; i <= L; ++i) {
      ln_factorial[static_cast<std::size_t>(i)] =
          ln_factorial[static_cast<std::size_t>(i) - 1] + std::log(static_cast<double>(i));
    }
    std::vector<LogSumAccumulator> sums(levels);
    for_each_composition(L, q, [&](std::span<const int> histogram) {
      double ln_term = ln_factorial.back();
      for (int part : histogram) {
        ln_term -= ln_factorial[static_cast<std::size_t>(part)];
      }
      const int d = p_ell_from_histogram(histogram, params.ell);
      sums[static_cast<std::size_t>(d)].add_ln(ln_term);
    });
    profile.log_counts.reserve(levels);
    const double ln_total = static_cast<double>(L) * std::log(static_cast<double>(q));
    double t = 0.0;
    for (std::size_t d = 0; d < levels; ++d) {
      profile.log_counts.push_back(sums[d].result());
      if (!profile.log_counts[d].is_zero()) {
        t += static_cast<double>(d) * std::exp(profile.log_counts[d].ln() - ln_total);
      }
    }
    profile.t_star = t;
  }
  return profile;
}

double t_star(const LevelProfile& profile) { return profile.t_star; }

} // namespace codethresh

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace codethresh::sim {

/// A word of [q]^n, one symbol per entry.
using Codeword = std::vector<std::uint8_t>;

struct RandomCodeSpec {
  int n = 1;
  double rate = 0.0;
  int q = 2;
  std::uint64_t seed = 0;
};

/// Largest expected code size sample_random_code will attempt.
inline constexpr double kDefaultMaxExpectedSize = double(1 << 22);

/// Words are packed into a 64-bit integer, bit_width(q - 1) bits per symbol.
int bits_per_symbol(int q);
std::uint64_t pack(std::span<const std::uint8_t> word, int q);
Codeword unpack(std::uint64_t packed, int n, int q);

/// Hamming distance between two packed words.
int packed_distance(std::uint64_t a, std::uint64_t b, int q);

struct RandomCode {
  int n = 0;
  int q = 2;
  std::vector<std::uint64_t> words; // packed, sorted ascending

  std::size_t size() const { return words.size(); }
  Codeword word(std::size_t i) const { return unpack(words[i], n, q); }
};

/// Each word of [q]^n is included independently with probability
/// q^{-n(1-R)}: draw the size from Binomial(q^n, q^{-n(1-R)}) and then that
/// many distinct uniform words.
RandomCode sample_random_code(const RandomCodeSpec& spec,
                              double max_expected_size = kDefaultMaxExpectedSize);

/// Violations allowed per column: floor(p n).
int violation_budget(double p, int n);

struct BadnessCertificate {
  std::vector<Codeword> column_codewords;
  std::vector<std::vector<int>> k_sets; // one sorted ell-set per coordinate
  std::vector<int> violation_counts;    // per column

  /// Recomputes the violation counts and checks them against floor(p n).
  bool revalidate(double p, int ell, int q) const;
};

/// Decides whether the L columns form a (p, ell, L)-bad matrix by a dynamic
/// program over coordinates whose state is the vector of per-column violation
/// counts. Returns a certificate when the columns are bad.
std::optional<BadnessCertificate> is_bad_tuple(std::span<const Codeword> columns, double p,
                                               int ell, int q);

struct ContainsResult {
  bool found = false;
  std::optional<BadnessCertificate> certificate;
  std::uint64_t subsets_checked = 0;
};

inline constexpr std::uint64_t kDefaultSubsetBudget = 50'000'000ULL;

/// Searches the L-subsets of the code for a bad one. For ell = 1 only subsets
/// whose pairwise distances are at most 2 floor(p n) are examined.
ContainsResult contains_bad_matrix(const RandomCode& code, double p, int ell, int L,
                                   std::uint64_t subset_budget = kDefaultSubsetBudget);

struct SweepConfig {
  std::vector<int> n_list;
  std::vector<double> rate_grid;
  int trials = 100;
  double p = 0.1;
  int ell = 1;
  int L = 3;
  int q = 2;
  std::uint64_t base_seed = 1;
  unsigned threads = 0; // 0: CODE_THRESH_THREADS or hardware concurrency
  double max_expected_size = kDefaultMaxExpectedSize;
  /// Cap on the estimated pair comparisons summed over the whole sweep.
  double work_budget = 2e11;
};

struct SweepRow {
  int n = 0;
  double rate = 0.0;
  int trials = 0;
  int satisfied = 0;
  double fraction = 0.0;
  std::uint64_t seed = 0; // seed of trial 0; trial t uses trial_seed(..., t)
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// Per n: rate where the fraction first passes 1/2 (linear interpolation),
  /// empty when it never does.
  std::vector<std::pair<int, std::optional<double>>> crossings;
  std::uint64_t base_seed = 0;
};

/// splitmix64 over (base_seed, n, bit pattern of rate, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, int n, double rate, int trial);

/// Rate where the fraction first exceeds 1/2, interpolated linearly inside
/// the first grid interval that crosses.
std::optional<double> crossing_rate(std::span<const double> rates,
                                    std::span<const double> fractions);

/// Worker count from CODE_THRESH_THREADS, else hardware concurrency.
unsigned default_thread_count();

SweepReport empirical_threshold_sweep(const SweepConfig& config);

} // namespace codethresh::sim

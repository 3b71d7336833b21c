#include "codethresh/simulator.hpp"

#include "codethresh/errors.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <thread>
#include <unordered_set>

namespace codethresh::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_alphabet(int q) {
  if (q < 2 || q > 256) {
    throw ValidationError("q must be in [2, 256], got " + std::to_string(q));
  }
}

void check_packable(int n, int q) {
  check_alphabet(q);
  if (n < 1) {
    throw ValidationError("block length n must be >= 1");
  }
  if (n * bits_per_symbol(q) > 64) {
    throw ValidationError("n * bit_width(q-1) must be <= 64 for packed codewords (n=" +
                          std::to_string(n) + ", q=" + std::to_string(q) + ")");
  }
}

// Mask with the lowest bit of every symbol field set.
std::uint64_t field_low_bits(int n, int bits) {
  std::uint64_t mask = 0;
  for (int i = 0; i < n; ++i) {
    mask |= std::uint64_t{1} << (i * bits);
  }
  return mask;
}

double binomial_coefficient(double n, int k) {
  if (k < 0 || n < k) {
    return 0.0;
  }
  double result = 1.0;
  for (int i = 1; i <= k; ++i) {
    result *= (n - k + i) / i;
  }
  return result;
}

} // namespace

int bits_per_symbol(int q) {
  check_alphabet(q);
  return std::bit_width(static_cast<unsigned>(q - 1));
}

std::uint64_t pack(std::span<const std::uint8_t> word, int q) {
  const int bits = bits_per_symbol(q);
  check_packable(static_cast<int>(word.size()), q);
  std::uint64_t packed = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] >= q) {
      throw ValidationError("symbol outside the alphabet");
    }
    packed |= std::uint64_t{word[i]} << (static_cast<int>(i) * bits);
  }
  return packed;
}

Codeword unpack(std::uint64_t packed, int n, int q) {
  const int bits = bits_per_symbol(q);
  const std::uint64_t field = (std::uint64_t{1} << bits) - 1;
  Codeword word(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    word[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((packed >> (i * bits)) & field);
  }
  return word;
}

int packed_distance(std::uint64_t a, std::uint64_t b, int q) {
  const int bits = bits_per_symbol(q);
  std::uint64_t x = a ^ b;
  if (bits == 1) {
    return std::popcount(x);
  }
  // Fold every field onto its lowest bit.
  std::uint64_t folded = x;
  for (int s = 1; s < bits; ++s) {
    folded |= x >> s;
  }
  return std::popcount(folded & field_low_bits(64 / bits, bits));
}

RandomCode sample_random_code(const RandomCodeSpec& spec, double max_expected_size) {
  check_packable(spec.n, spec.q);
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw ValidationError("rate must lie in [0, 1]");
  }
  const double log2_space = spec.n * std::log2(static_cast<double>(spec.q));
  if (log2_space > 62.0) {
    throw ValidationError("q^n must be at most 2^62 for sampling");
  }
  std::uint64_t space = 1;
  for (int i = 0; i < spec.n; ++i) {
    space *= static_cast<std::uint64_t>(spec.q);
  }
  const double expected = std::pow(static_cast<double>(spec.q), spec.n * spec.rate);
  if (expected > max_expected_size) {
    throw BudgetError("expected code size " + std::to_string(expected) +
                      " exceeds the memory cap; use a smaller n or rate");
  }
  const double inclusion = std::pow(static_cast<double>(spec.q), -spec.n * (1.0 - spec.rate));

  std::mt19937_64 rng(spec.seed);
  std::uint64_t size = space;
  if (inclusion < 1.0) {
    std::binomial_distribution<std::int64_t> count(static_cast<std::int64_t>(space), inclusion);
    size = static_cast<std::uint64_t>(count(rng));
  }

  auto index_to_packed = [&](std::uint64_t index) {
    Codeword word(static_cast<std::size_t>(spec.n));
    for (auto& symbol : word) {
      symbol = static_cast<std::uint8_t>(index % static_cast<std::uint64_t>(spec.q));
      index /= static_cast<std::uint64_t>(spec.q);
    }
    return pack(word, spec.q);
  };

  RandomCode code;
  code.n = spec.n;
  code.q = spec.q;
  std::uniform_int_distribution<std::uint64_t> uniform(0, space - 1);
  if (size > space / 2) {
    // Dense case: draw the excluded words instead.
    std::unordered_set<std::uint64_t> excluded;
    while (excluded.size() < space - size) {
      excluded.insert(uniform(rng));
    }
    code.words.reserve(size);
    for (std::uint64_t index = 0; index < space; ++index) {
      if (!excluded.contains(index)) {
        code.words.push_back(index_to_packed(index));
      }
    }
  } else {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(size);
    while (chosen.size() < size) {
      chosen.insert(uniform(rng));
    }
    code.words.reserve(size);
    for (std::uint64_t index : chosen) {
      code.words.push_back(index_to_packed(index));
    }
  }
  std::sort(code.words.begin(), code.words.end());
  return code;
}

int violation_budget(double p, int n) {
  // The small slack absorbs representation error in products like 0.1 * 30.
  return static_cast<int>(std::floor(p * n + 1e-9));
}

bool BadnessCertificate::revalidate(double p, int ell, int q) const {
  if (column_codewords.empty() || violation_counts.size() != column_codewords.size()) {
    return false;
  }
  const std::size_t n = column_codewords.front().size();
  if (k_sets.size() != n) {
    return false;
  }
  const int budget = violation_budget(p, static_cast<int>(n));
  for (const auto& k : k_sets) {
    if (static_cast<int>(k.size()) != ell) {
      return false;
    }
    for (std::size_t a = 0; a < k.size(); ++a) {
      if (k[a] < 0 || k[a] >= q) {
        return false;
      }
      for (std::size_t b = a + 1; b < k.size(); ++b) {
        if (k[a] == k[b]) {
          return false;
        }
      }
    }
  }
  for (std::size_t j = 0; j < column_codewords.size(); ++j) {
    if (column_codewords[j].size() != n) {
      return false;
    }
    int violations = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& k = k_sets[i];
      if (std::find(k.begin(), k.end(), column_codewords[j][i]) == k.end()) {
        ++violations;
      }
    }
    if (violations != violation_counts[j] || violations > budget) {
      return false;
    }
  }
  return true;
}

namespace {

struct CoveragePattern {
  std::uint32_t covered = 0; // bit j set iff column j is covered
  std::vector<int> symbols;  // the present symbols chosen for K_i
};

// Distinct hit patterns of size-ell symbol sets on the column entries at one
// coordinate. Only sets built from present symbols matter: a set using fewer
// present symbols covers a subset of what some set of present symbols covers.
std::vector<CoveragePattern> coverage_patterns(std::span<const Codeword> columns, std::size_t i,
                                               int ell) {
  std::vector<int> present;
  for (const auto& column : columns) {
    const int s = column[i];
    if (std::find(present.begin(), present.end(), s) == present.end()) {
      present.push_back(s);
    }
  }
  std::sort(present.begin(), present.end());
  auto mask_of = [&](const std::vector<int>& symbols) {
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (std::find(symbols.begin(), symbols.end(), columns[j][i]) != symbols.end()) {
        mask |= 1U << j;
      }
    }
    return mask;
  };
  std::vector<CoveragePattern> patterns;
  const int m = static_cast<int>(present.size());
  if (ell >= m) {
    patterns.push_back({mask_of(present), present});
    return patterns;
  }
  // Every ell-subset of the present symbols; distinct subsets give distinct
  // patterns because each present symbol covers at least one column.
  std::vector<int> pick(static_cast<std::size_t>(ell));
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == ell) {
      std::vector<int> symbols(pick.begin(), pick.end());
      patterns.push_back({mask_of(symbols), std::move(symbols)});
      return;
    }
    for (int s = start; s <= m - (ell - depth); ++s) {
      pick[static_cast<std::size_t>(depth)] = present[static_cast<std::size_t>(s)];
      choose(s + 1, depth + 1);
    }
  };
  choose(0, 0);
  return patterns;
}

} // namespace

std::optional<BadnessCertificate> is_bad_tuple(std::span<const Codeword> columns, double p,
                                               int ell, int q) {
  check_alphabet(q);
  if (columns.empty()) {
    throw ValidationError("at least one column is required");
  }
  if (columns.size() > 16) {
    throw ValidationError("at most 16 columns are supported");
  }
  if (ell < 1 || ell > q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("p must lie in [0, 1]");
  }
  const std::size_t n = columns.front().size();
  for (const auto& column : columns) {
    if (column.size() != n) {
      throw ValidationError("columns must have equal length");
    }
    for (auto s : column) {
      if (s >= q) {
        throw ValidationError("symbol outside the alphabet");
      }
    }
  }
  for (std::size_t a = 0; a < columns.size(); ++a) {
    for (std::size_t b = a + 1; b < columns.size(); ++b) {
      if (columns[a] == columns[b]) {
        throw ValidationError("columns of a bad matrix must be distinct");
      }
    }
  }

  const int L = static_cast<int>(columns.size());
  const int budget = violation_budget(p, static_cast<int>(n));
  const auto radix = static_cast<std::uint64_t>(budget) + 1;
  std::uint64_t states = 1;
  for (int j = 0; j < L; ++j) {
    states *= radix;
    if (states * std::max<std::size_t>(n, 1) > 50'000'000ULL) {
      throw BudgetError("badness DP state space exceeds 5e7 entries");
    }
  }
  std::vector<std::uint64_t> place(static_cast<std::size_t>(L));
  for (int j = 0, w = 1; j < L; ++j, w *= static_cast<int>(radix)) {
    place[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(w);
  }

  struct Back {
    std::int64_t previous = -1;
    int pattern = -1;
  };
  std::vector<std::vector<Back>> back(n, std::vector<Back>(states));
  std::vector<std::vector<CoveragePattern>> all_patterns(n);

  // State: per-column violation counts in mixed radix. Counts past the budget
  // can never recover, so such states are dropped.
  std::vector<std::uint64_t> frontier{0};
  std::vector<char> seen(states, 0);
  for (std::size_t i = 0; i < n; ++i) {
    all_patterns[i] = coverage_patterns(columns, i, ell);
    std::vector<std::uint64_t> next;
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint64_t state : frontier) {
      for (std::size_t k = 0; k < all_patterns[i].size(); ++k) {
        const std::uint32_t covered = all_patterns[i][k].covered;
        std::uint64_t successor = state;
        bool alive = true;
        for (int j = 0; j < L && alive; ++j) {
          if ((covered >> j) & 1U) {
            continue;
          }
          const auto count = (state / place[static_cast<std::size_t>(j)]) % radix;
          if (count + 1 >= radix) {
            alive = false;
          } else {
            successor += place[static_cast<std::size_t>(j)];
          }
        }
        if (alive && !seen[successor]) {
          seen[successor] = 1;
          back[i][successor] = {static_cast<std::int64_t>(state), static_cast<int>(k)};
          next.push_back(successor);
        }
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) {
      return std::nullopt;
    }
  }

  BadnessCertificate cert;
  cert.column_codewords.assign(columns.begin(), columns.end());
  cert.k_sets.resize(n);
  std::uint64_t state = frontier.front();
  for (int j = 0; j < L; ++j) {
    cert.violation_counts.push_back(
        static_cast<int>((state / place[static_cast<std::size_t>(j)]) % radix));
  }
  for (std::size_t i = n; i-- > 0;) {
    const Back& step = back[i][state];
    std::vector<int> k = all_patterns[i][static_cast<std::size_t>(step.pattern)].symbols;
    for (int s = 0; static_cast<int>(k.size()) < ell; ++s) {
      if (std::find(k.begin(), k.end(), s) == k.end()) {
        k.push_back(s);
      }
    }
    std::sort(k.begin(), k.end());
    cert.k_sets[i] = std::move(k);
    state = static_cast<std::uint64_t>(step.previous);
  }
  return cert;
}

ContainsResult contains_bad_matrix(const RandomCode& code, double p, int ell, int L,
                                   std::uint64_t subset_budget) {
  if (L < 1) {
    throw ValidationError("L must be >= 1");
  }
  if (ell < 1 || ell > code.q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q");
  }
  ContainsResult result;
  const std::size_t m = code.size();
  if (m < static_cast<std::size_t>(L)) {
    return result;
  }
  const int budget = violation_budget(p, code.n);

  // Adjacency restricted to later indices. With ell = 1 two words can share a
  // center within distance floor(pn) only if they are within 2 floor(pn).
  const bool filtered = ell == 1;
  if (!filtered) {
    const double subsets = binomial_coefficient(static_cast<double>(m), L);
    if (subsets > static_cast<double>(subset_budget)) {
      throw BudgetError("contains_bad_matrix would examine " + std::to_string(subsets) +
                        " subsets (budget " + std::to_string(subset_budget) + ")");
    }
  }
  std::vector<std::vector<std::uint32_t>> forward(m);
  if (filtered && L > 1) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        if (packed_distance(code.words[a], code.words[b], code.q) <= 2 * budget) {
          forward[a].push_back(static_cast<std::uint32_t>(b));
        }
      }
    }
  }

  std::vector<std::uint32_t> clique;
  std::vector<Codeword> columns(static_cast<std::size_t>(L));
  std::function<bool(const std::vector<std::uint32_t>&)> extend =
      [&](const std::vector<std::uint32_t>& candidates) -> bool {
    if (clique.size() == static_cast<std::size_t>(L)) {
      if (++result.subsets_checked > subset_budget) {
        throw BudgetError("contains_bad_matrix exceeded the subset budget after " +
                          std::to_string(subset_budget) + " subsets");
      }
      for (std::size_t j = 0; j < clique.size(); ++j) {
        columns[j] = code.word(clique[j]);
      }
      auto cert = is_bad_tuple(columns, p, ell, code.q);
      if (cert) {
        result.found = true;
        result.certificate = std::move(cert);
        return true;
      }
      return false;
    }
    const std::size_t needed = static_cast<std::size_t>(L) - clique.size();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (candidates.size() - c < needed) {
        break;
      }
      const std::uint32_t v = candidates[c];
      std::vector<std::uint32_t> narrowed;
      if (needed > 1) {
        if (filtered) {
          std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1,
                                candidates.end(), forward[v].begin(), forward[v].end(),
                                std::back_inserter(narrowed));
        } else {
          narrowed.assign(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1,
                          candidates.end());
        }
      }
      clique.push_back(v);
      const bool done = extend(narrowed);
      clique.pop_back();
      if (done) {
        return true;
      }
    }
    return false;
  };

  std::vector<std::uint32_t> everyone(m);
  for (std::size_t i = 0; i < m; ++i) {
    everyone[i] = static_cast<std::uint32_t>(i);
  }
  extend(everyone);
  return result;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int n, double rate, int trial) {
  std::uint64_t rate_bits = 0;
  std::memcpy(&rate_bits, &rate, sizeof rate_bits);
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ rate_bits);
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::optional<double> crossing_rate(std::span<const double> rates,
                                    std::span<const double> fractions) {
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    if (fractions[k] > 0.5) {
      if (k == 0) {
        return rates[0];
      }
      const double f0 = fractions[k - 1];
      const double f1 = fractions[k];
      return rates[k - 1] + (0.5 - f0) / (f1 - f0) * (rates[k] - rates[k - 1]);
    }
  }
  return std::nullopt;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("CODE_THRESH_THREADS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value > 0) {
      return static_cast<unsigned>(value);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

SweepReport empirical_threshold_sweep(const SweepConfig& config) {
  if (config.n_list.empty() || config.rate_grid.empty()) {
    throw ValidationError("sweep needs at least one n and one rate");
  }
  if (config.trials < 1) {
    throw ValidationError("trials must be >= 1");
  }
  if (!std::is_sorted(config.rate_grid.begin(), config.rate_grid.end()) ||
      std::adjacent_find(config.rate_grid.begin(), config.rate_grid.end()) !=
          config.rate_grid.end()) {
    throw ValidationError("rate grid must be strictly increasing");
  }
  if (!(config.p >= 0.0 && config.p <= 1.0)) {
    throw DomainError("p must lie in [0, 1]");
  }
  if (config.ell < 1 || config.ell > config.q) {
    throw ValidationError("ell must satisfy 1 <= ell <= q");
  }
  if (config.L < 1) {
    throw ValidationError("L must be >= 1");
  }

  // Upfront feasibility: code sizes and pairwise/subset work.
  double work = 0.0;
  for (int n : config.n_list) {
    check_packable(n, config.q);
    for (double rate : config.rate_grid) {
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ValidationError("rates must lie in [0, 1]");
      }
      const double expected = std::pow(static_cast<double>(config.q), n * rate);
      if (expected > config.max_expected_size) {
        throw BudgetError("expected code size " + std::to_string(expected) + " at n=" +
                          std::to_string(n) + ", rate=" + std::to_string(rate) +
                          " exceeds the memory cap");
      }
      const double per_trial = config.ell == 1 ? expected * expected / 2.0
                                               : binomial_coefficient(expected, config.L);
      work += per_trial * config.trials;
    }
  }
  if (work > config.work_budget) {
    throw BudgetError("sweep needs about " + std::to_string(work) +
                      " subset/pair checks, over the budget of " +
                      std::to_string(config.work_budget));
  }

  struct Job {
    int n;
    double rate;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n : config.n_list) {
    for (double rate : config.rate_grid) {
      for (int t = 0; t < config.trials; ++t) {
        jobs.push_back({n, rate, t});
      }
    }
  }
  std::vector<char> outcome(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= jobs.size() || failed.load()) {
        return;
      }
      const Job& job = jobs[index];
      try {
        const RandomCodeSpec spec{job.n, job.rate, config.q,
                                  trial_seed(config.base_seed, job.n, job.rate, job.trial)};
        const RandomCode code = sample_random_code(spec, config.max_expected_size);
        outcome[index] = contains_bad_matrix(code, config.p, config.ell, config.L).found ? 1 : 0;
      } catch (...) {
        if (!failed.exchange(true)) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };
  const unsigned threads =
      std::min<std::size_t>(config.threads > 0 ? config.threads : default_thread_count(),
                            jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  SweepReport report;
  report.base_seed = config.base_seed;
  std::size_t index = 0;
  for (int n : config.n_list) {
    std::vector<double> fractions;
    for (double rate : config.rate_grid) {
      SweepRow row;
      row.n = n;
      row.rate = rate;
      row.trials = config.trials;
      row.seed = trial_seed(config.base_seed, n, rate, 0);
      for (int t = 0; t < config.trials; ++t) {
        row.satisfied += outcome[index++];
      }
      row.fraction = static_cast<double>(row.satisfied) / row.trials;
      fractions.push_back(row.fraction);
      report.rows.push_back(row);
    }
    report.crossings.emplace_back(n, crossing_rate(config.rate_grid, fractions));
  }
  return report;
}

} // namespace codethresh::sim

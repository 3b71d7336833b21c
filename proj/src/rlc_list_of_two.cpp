#include "codethresh/rlc_list_of_two.hpp"

#include "codethresh/core_math.hpp"
#include "codethresh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace codethresh::rlc {

namespace {

int parity(unsigned x) { return std::popcount(x) & 1; }

// Rank over F_2 of a set of bit vectors.
int gf2_rank(std::vector<unsigned> vectors) {
  int rank = 0;
  for (int bit = 7; bit >= 0; --bit) {
    const unsigned pivot_mask = 1U << bit;
    auto pivot = std::find_if(vectors.begin() + rank, vectors.end(),
                              [&](unsigned v) { return (v & pivot_mask) != 0; });
    if (pivot == vectors.end()) {
      continue;
    }
    std::iter_swap(vectors.begin() + rank, pivot);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (i != static_cast<std::size_t>(rank) && (vectors[i] & pivot_mask) != 0) {
        vectors[i] ^= vectors[static_cast<std::size_t>(rank)];
      }
    }
    ++rank;
  }
  return rank;
}

std::string vector_label(unsigned u, int bits) {
  std::string s;
  for (int b = bits - 1; b >= 0; --b) {
    s.push_back(((u >> b) & 1U) != 0 ? '1' : '0');
  }
  return s;
}

} // namespace

int BinaryMatrix::rank() const {
  return gf2_rank(std::vector<unsigned>(rows.begin(), rows.end()));
}

std::uint8_t BinaryMatrix::apply(std::uint8_t u) const {
  std::uint8_t image = 0;
  const int m = num_rows();
  for (int i = 0; i < m; ++i) {
    image = static_cast<std::uint8_t>(
        image | (parity(rows[static_cast<std::size_t>(i)] & u) << (m - 1 - i)));
  }
  return image;
}

std::uint8_t BinaryMatrix::kernel_mask() const {
  std::uint8_t mask = 0;
  for (unsigned u = 0; u < 8; ++u) {
    if (apply(static_cast<std::uint8_t>(u)) == 0) {
      mask = static_cast<std::uint8_t>(mask | (1U << u));
    }
  }
  return mask;
}

void validate(const BinaryDistribution3& tau) {
  double total = 0.0;
  for (double x : tau) {
    if (!(x >= 0.0)) {
      throw ValidationError("distribution over F_2^3 has a negative entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("distribution over F_2^3 does not sum to 1");
  }
}

std::vector<double> implied_distribution(const BinaryDistribution3& tau, const BinaryMatrix& a) {
  validate(tau);
  const int m = a.num_rows();
  if (m < 1 || m > 3) {
    throw ValidationError("implied map must have 1 to 3 rows");
  }
  for (auto row : a.rows) {
    if (row >= 8) {
      throw ValidationError("matrix rows must be 3-bit masks");
    }
  }
  if (a.rank() != m) {
    throw ValidationError("implied map matrix is rank deficient");
  }
  std::vector<double> out(std::size_t{1} << m, 0.0);
  for (unsigned u = 0; u < 8; ++u) {
    out[a.apply(static_cast<std::uint8_t>(u))] += tau[u];
  }
  return out;
}

int support_dimension(const std::vector<double>& dist) {
  std::vector<unsigned> support;
  for (std::size_t u = 0; u < dist.size(); ++u) {
    if (dist[u] > 0.0) {
      support.push_back(static_cast<unsigned>(u));
    }
  }
  return gf2_rank(std::move(support));
}

BinaryDistribution3 list_of_two_limit_type(double p) {
  if (!(p > 0.0 && p < 0.25)) {
    throw DomainError("the list-of-two limit type requires p in (0, 1/4)");
  }
  BinaryDistribution3 tau{};
  for (unsigned u = 0; u < 8; ++u) {
    tau[u] = (u == 0 || u == 7) ? (1.0 - 3.0 * p) / 2.0 : p / 2.0;
  }
  return tau;
}

std::vector<BinaryMatrix> full_rank_maps_by_kernel() {
  // Enumerate every full-rank m x 3 matrix and keep the first per kernel.
  std::map<std::uint8_t, BinaryMatrix> by_kernel;
  for (int m = 3; m >= 1; --m) {
    const unsigned combos = 1U << (3 * m);
    for (unsigned code = 0; code < combos; ++code) {
      BinaryMatrix a;
      for (int i = 0; i < m; ++i) {
        a.rows.push_back(static_cast<std::uint8_t>((code >> (3 * i)) & 7U));
      }
      if (a.rank() != m) {
        continue;
      }
      by_kernel.try_emplace(a.kernel_mask(), a);
    }
  }
  std::vector<BinaryMatrix> maps;
  for (auto& [kernel, a] : by_kernel) {
    maps.push_back(a);
  }
  // Identity first, then rank 2, then rank 1.
  std::stable_sort(maps.begin(), maps.end(), [](const BinaryMatrix& x, const BinaryMatrix& y) {
    return x.num_rows() > y.num_rows();
  });
  return maps;
}

std::string kernel_label(std::uint8_t kernel_mask) {
  std::string s = "ker{";
  bool first = true;
  for (unsigned u = 0; u < 8; ++u) {
    if ((kernel_mask >> u) & 1U) {
      if (!first) {
        s += ',';
      }
      s += vector_label(u, 3);
      first = false;
    }
  }
  return s + "}";
}

int curve_family(const BinaryMatrix& a) {
  const std::uint8_t kernel = a.kernel_mask();
  const bool has_all_ones = ((kernel >> 7) & 1U) != 0;
  switch (a.num_rows()) {
  case 3:
    return 0;
  case 2:
    return has_all_ones ? 1 : 2;
  default:
    return has_all_ones ? 3 : 4;
  }
}

ImpliedTypeScan implied_type_scan(double p) {
  const BinaryDistribution3 tau = list_of_two_limit_type(p);
  ImpliedTypeScan scan;
  for (const BinaryMatrix& a : full_rank_maps_by_kernel()) {
    const std::vector<double> implied = implied_distribution(tau, a);
    ImpliedTypeEntry entry;
    entry.map_label =
        "tau" + std::to_string(curve_family(a)) + ":" + kernel_label(a.kernel_mask());
    entry.matrix = a;
    entry.entropy = entropy_q(implied, 2).value;
    entry.dimension = support_dimension(implied);
    entry.ratio = entry.entropy / static_cast<double>(entry.dimension);
    scan.entries.push_back(std::move(entry));
  }
  auto best = std::min_element(scan.entries.begin(), scan.entries.end(),
                               [](const auto& x, const auto& y) { return x.ratio < y.ratio; });
  scan.argmin = static_cast<std::size_t>(best - scan.entries.begin());
  scan.min_ratio = best->ratio;
  return scan;
}

double rlc_list_of_two_threshold(double p) {
  if (!(p > 0.0 && p < 0.25)) {
    throw DomainError("rlc_list_of_two_threshold requires p in (0, 1/4)");
  }
  const double x = 3.0 * p;
  return 1.0 - (q_ary_entropy(x, 2) + x * std::log2(3.0)) / 2.0;
}

} // namespace codethresh::rlc

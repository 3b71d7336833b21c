#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace codethresh::rlc {

/// A distribution over F_2^3. Index bit 2 is the first coordinate, so index 6
/// is the vector 110.
using BinaryDistribution3 = std::array<double, 8>;

/// A binary m x 3 matrix; each row is a 3-bit mask with the same bit order as
/// BinaryDistribution3 indices.
struct BinaryMatrix {
  std::vector<std::uint8_t> rows;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int rank() const;
  /// Bitmask over the 8 vectors of F_2^3: bit u is set iff A u = 0.
  std::uint8_t kernel_mask() const;
  std::uint8_t apply(std::uint8_t u) const;
};

struct ImpliedTypeEntry {
  std::string map_label;
  BinaryMatrix matrix;
  double entropy = 0.0; // base 2
  int dimension = 0;
  double ratio = 0.0;
};

struct ImpliedTypeScan {
  std::vector<ImpliedTypeEntry> entries;
  double min_ratio = 0.0;
  std::size_t argmin = 0;
};

void validate(const BinaryDistribution3& tau);

/// Pushforward of tau under u -> A u, a distribution over F_2^m.
std::vector<double> implied_distribution(const BinaryDistribution3& tau, const BinaryMatrix& a);

/// Dimension of the span of the support of a distribution over F_2^m.
int support_dimension(const std::vector<double>& dist);

/// Limit of the entropy-maximizing bad type for list-of-two decoding:
/// (1 - 3p)/2 on 000 and 111, p/2 on each of the other six vectors.
BinaryDistribution3 list_of_two_limit_type(double p);

/// All full-rank maps F_2^3 -> F_2^m, m = 1..3, one per kernel.
std::vector<BinaryMatrix> full_rank_maps_by_kernel();

/// Name of a kernel, e.g. "ker{000,111}".
std::string kernel_label(std::uint8_t kernel_mask);

/// Which of the five curve families an implied type belongs to:
/// 0 identity, 1 kernel {000,111}, 2 rank 2 with another kernel,
/// 3 rank 1 with 111 in the kernel, 4 rank 1 without it.
int curve_family(const BinaryMatrix& a);

ImpliedTypeScan implied_type_scan(double p);

/// 1 - (h(3p) + 3p log 3) / 2, for p in (0, 1/4).
double rlc_list_of_two_threshold(double p);

} // namespace codethresh::rlc

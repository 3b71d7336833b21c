#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace codethresh {

using BigInt = boost::multiprecision::cpp_int;

/// Nonnegative real stored by its natural logarithm. Zero is represented by a
/// flag; `ln_magnitude` is meaningless when `is_zero` is set.
class LogReal {
public:
  constexpr LogReal() = default;

  static LogReal zero() { return LogReal{}; }
  static LogReal from_ln(double ln_magnitude);
  static LogReal from_value(double value);
  static LogReal from_bigint(const BigInt& value);

  bool is_zero() const { return is_zero_; }
  double ln() const { return ln_; }
  /// Logarithm in base q. Returns -inf for zero.
  double log_base(int q) const;
  double value() const;

  LogReal operator+(const LogReal& other) const;
  LogReal operator*(const LogReal& other) const;
  LogReal& operator+=(const LogReal& other) { return *this = *this + other; }

private:
  double ln_ = 0.0;
  bool is_zero_ = true;
};

/// Streaming sum of nonnegative terms given by natural logs. Keeps a running
/// maximum and a Neumaier-compensated sum of the rescaled terms.
class LogSumAccumulator {
public:
  void add_ln(double ln_term);
  void add(const LogReal& term);
  LogReal result() const;

private:
  double max_ln_ = 0.0;
  double sum_ = 0.0;
  double compensation_ = 0.0;
  bool empty_ = true;
};

struct EntropyValue {
  double value = 0.0;
  int base = 2;
};

double log_q(double x, int q);

/// -sum tau(x) log_q tau(x), with 0 log 0 = 0. Input must sum to 1 within 1e-9.
EntropyValue entropy_q(std::span<const double> dist, int q);

/// h_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x).
double q_ary_entropy(double x, int q);

/// Binary KL divergence D_q(s || r) in base q. s in [0,1], r in (0,1); the
/// s = 0 and s = 1 endpoints use the continuous extension.
double kl_q(double s, double r, int q);

/// L! / prod(parts_i!) in the log domain.
LogReal log_multinomial(int total, std::span<const int> parts);
BigInt multinomial_exact(int total, std::span<const int> parts);

BigInt ipow(int base, int exponent);
double to_double(const BigInt& value);

} // namespace codethresh

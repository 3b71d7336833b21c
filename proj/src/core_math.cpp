#include "codethresh/core_math.hpp"

#include "codethresh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace codethresh {

namespace {

void require_base(int q) {
  if (q < 2) {
    throw ValidationError("alphabet size q must be >= 2, got " + std::to_string(q));
  }
}

// x * ln(x) with the 0 ln 0 = 0 convention.
double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

} // namespace

LogReal LogReal::from_ln(double ln_magnitude) {
  if (std::isinf(ln_magnitude) && ln_magnitude < 0) {
    return zero();
  }
  LogReal r;
  r.ln_ = ln_magnitude;
  r.is_zero_ = false;
  return r;
}

LogReal LogReal::from_value(double value) {
  if (value < 0.0) {
    throw DomainError("LogReal holds nonnegative magnitudes only");
  }
  return value == 0.0 ? zero() : from_ln(std::log(value));
}

LogReal LogReal::from_bigint(const BigInt& value) {
  if (value < 0) {
    throw DomainError("LogReal holds nonnegative magnitudes only");
  }
  if (value == 0) {
    return zero();
  }
  // Keep the top 60 bits so the conversion to double never overflows.
  const auto bits = static_cast<long>(boost::multiprecision::msb(value)) + 1;
  const long shift = std::max(0L, bits - 60);
  const BigInt top = value >> shift;
  const double mantissa = top.convert_to<double>();
  return from_ln(std::log(mantissa) + static_cast<double>(shift) * std::log(2.0));
}

double LogReal::log_base(int q) const {
  if (is_zero_) {
    return -std::numeric_limits<double>::infinity();
  }
  return ln_ / std::log(static_cast<double>(q));
}

double LogReal::value() const { return is_zero_ ? 0.0 : std::exp(ln_); }

LogReal LogReal::operator+(const LogReal& other) const {
  if (is_zero_) {
    return other;
  }
  if (other.is_zero_) {
    return *this;
  }
  const double hi = std::max(ln_, other.ln_);
  const double lo = std::min(ln_, other.ln_);
  return from_ln(hi + std::log1p(std::exp(lo - hi)));
}

LogReal LogReal::operator*(const LogReal& other) const {
  if (is_zero_ || other.is_zero_) {
    return zero();
  }
  return from_ln(ln_ + other.ln_);
}

void LogSumAccumulator::add_ln(double ln_term) {
  if (std::isinf(ln_term) && ln_term < 0) {
    return;
  }
  if (empty_) {
    max_ln_ = ln_term;
    sum_ = 1.0;
    compensation_ = 0.0;
    empty_ = false;
    return;
  }
  double term = 0.0;
  if (ln_term > max_ln_) {
    const double scale = std::exp(max_ln_ - ln_term);
    sum_ *= scale;
    compensation_ *= scale;
    max_ln_ = ln_term;
    term = 1.0;
  } else {
    term = std::exp(ln_term - max_ln_);
  }
  // Neumaier summation.
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    compensation_ += (sum_ - t) + term;
  } else {
    compensation_ += (term - t) + sum_;
  }
  sum_ = t;
}

void LogSumAccumulator::add(const LogReal& term) {
  if (!term.is_zero()) {
    add_ln(term.ln());
  }
}

LogReal LogSumAccumulator::result() const {
  if (empty_) {
    return LogReal::zero();
  }
  return LogReal::from_ln(max_ln_ + std::log(sum_ + compensation_));
}

double log_q(double x, int q) { return std::log(x) / std::log(static_cast<double>(q)); }

EntropyValue entropy_q(std::span<const double> dist, int q) {
  require_base(q);
  if (dist.empty()) {
    throw ValidationError("entropy of an empty distribution is undefined");
  }
  double total = 0.0;
  for (double x : dist) {
    if (!(x >= 0.0)) {
      throw ValidationError("probability vector has a negative or NaN entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "probability vector is not normalized: sum deviates from 1 by " << (total - 1.0);
    throw ValidationError(msg.str());
  }
  double acc = 0.0;
  for (double x : dist) {
    acc -= xlnx(x);
  }
  return {std::max(0.0, acc / std::log(static_cast<double>(q))), q};
}

double q_ary_entropy(double x, int q) {
  require_base(q);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("q_ary_entropy requires x in [0,1]");
  }
  const double lnq = std::log(static_cast<double>(q));
  if (x == 0.0) {
    return 0.0;
  }
  const double spread = q > 2 ? x * std::log(static_cast<double>(q - 1)) : 0.0;
  return (spread - xlnx(x) - xlnx(1.0 - x)) / lnq;
}

double kl_q(double s, double r, int q) {
  require_base(q);
  if (!(r > 0.0 && r < 1.0)) {
    throw DomainError("kl_q requires r in (0,1)");
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("kl_q requires s in [0,1]");
  }
  const double lnq = std::log(static_cast<double>(q));
  double acc = 0.0;
  if (s > 0.0) {
    acc += s * std::log(s / r);
  }
  if (s < 1.0) {
    acc += (1.0 - s) * std::log((1.0 - s) / (1.0 - r));
  }
  return acc / lnq;
}

namespace {

void check_parts(int total, std::span<const int> parts) {
  if (total < 0) {
    throw ValidationError("multinomial total must be nonnegative");
  }
  long sum = 0;
  for (int part : parts) {
    if (part < 0) {
      throw ValidationError("multinomial parts must be nonnegative");
    }
    sum += part;
  }
  if (sum != total) {
    throw ValidationError("multinomial parts sum to " + std::to_string(sum) + ", expected " +
                          std::to_string(total));
  }
}

} // namespace

LogReal log_multinomial(int total, std::span<const int> parts) {
  check_parts(total, parts);
  double ln = std::lgamma(static_cast<double>(total) + 1.0);
  for (int part : parts) {
    ln -= std::lgamma(static_cast<double>(part) + 1.0);
  }
  return LogReal::from_ln(ln);
}

BigInt multinomial_exact(int total, std::span<const int> parts) {
  check_parts(total, parts);
  // Product of binomials C(running, part): every intermediate is an integer.
  BigInt result = 1;
  int running = 0;
  for (int part : parts) {
    for (int k = 1; k <= part; ++k) {
      ++running;
      result *= running;
      result /= k;
    }
  }
  return result;
}

BigInt ipow(int base, int exponent) {
  BigInt result = 1;
  for (int i = 0; i < exponent; ++i) {
    result *= base;
  }
  return result;
}

double to_double(const BigInt& value) { return value.convert_to<double>(); }

} // namespace codethresh

#pragma once

#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

namespace unmask::lds {

// Base of a radical-inverse expansion; always >= 2.
class RadixBase {
 public:
  explicit RadixBase(int value);
  int value() const noexcept { return value_; }

 private:
  int value_;
};

// Exact rational backend for unit tests; the float backend is used for bulk
// generation.
using Rational = boost::rational<long long>;

// Unreduced radical-inverse fraction: numerator / base^digits.
struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double to_double() const;
  bool operator==(const Fraction&) const = default;
};

// Digit-reversal radical inverse of a positive index. Throws
// std::invalid_argument for index 0.
Fraction radical_inverse_fraction(std::uint64_t index, RadixBase base);
double radical_inverse(std::uint64_t index, RadixBase base);
Rational radical_inverse_exact(std::uint64_t index, RadixBase base);

// Incremental radical-inverse generator: updates an integer fraction state
// in O(log i) per step and yields the same numerator/denominator pairs as
// digit reversal, so the two routes agree bitwise. First call yields the
// inverse of index 1.
class RadicalInverseStream {
 public:
  explicit RadicalInverseStream(RadixBase base) : base_(static_cast<std::uint64_t>(base.value())) {}

  Fraction next_fraction();
  double next() { return next_fraction().to_double(); }

 private:
  std::uint64_t base_;
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

struct HaltonPoint2D {
  double x = 0.0;  // base-2 axis
  double y = 0.0;  // base-3 axis
  bool operator==(const HaltonPoint2D&) const = default;
};

struct HaltonSequence2D {
  std::vector<HaltonPoint2D> points;
};

// First `count` points of the 2D Halton sequence with bases (2, 3),
// starting at index 1. Throws std::invalid_argument for count 0.
HaltonSequence2D halton_2d(std::size_t count);

}  // namespace unmask::lds

#include "unmask/lds.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "unmask/errors.hpp"

namespace unmask::lds {

namespace {
constexpr std::uint64_t kMaxExactDenominator = 1ull << 53;
}

RadixBase::RadixBase(int value) : value_(value) {
  if (value < 2) {
    throw std::invalid_argument("RadixBase: base must be >= 2, got " + std::to_string(value));
  }
}

double Fraction::to_double() const {
  if (denominator == 0 || denominator >= kMaxExactDenominator) {
    throw InternalError("radical inverse denominator exceeds exact double range");
  }
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

Fraction radical_inverse_fraction(std::uint64_t index, RadixBase base) {
  if (index == 0) {
    throw std::invalid_argument("radical_inverse: index must be >= 1");
  }
  const auto b = static_cast<std::uint64_t>(base.value());
  Fraction f;
  while (index > 0) {
    f.numerator = f.numerator * b + index % b;
    f.denominator *= b;
    index /= b;
  }
  return f;
}

double radical_inverse(std::uint64_t index, RadixBase base) {
  return radical_inverse_fraction(index, base).to_double();
}

Rational radical_inverse_exact(std::uint64_t index, RadixBase base) {
  const Fraction f = radical_inverse_fraction(index, base);
  return Rational(static_cast<long long>(f.numerator), static_cast<long long>(f.denominator));
}

Fraction RadicalInverseStream::next_fraction() {
  const std::uint64_t x = den_ - num_;
  if (x == 1) {
    num_ = 1;
    den_ *= base_;
  } else {
    std::uint64_t y = den_ / base_;
    while (y >= x) y /= base_;
    num_ = (base_ + 1) * y - x;
  }
  return Fraction{num_, den_};
}

HaltonSequence2D halton_2d(std::size_t count) {
  if (count == 0) {
    throw std::invalid_argument("halton_2d: count must be >= 1");
  }
  RadicalInverseStream base2{RadixBase(2)};
  RadicalInverseStream base3{RadixBase(3)};
  HaltonSequence2D seq;
  seq.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    seq.points.push_back(HaltonPoint2D{base2.next(), base3.next()});
  }
  return seq;
}

}  // namespace unmask::lds

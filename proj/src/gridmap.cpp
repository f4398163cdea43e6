#include "unmask/gridmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "unmask/errors.hpp"

namespace unmask {

void validate(const GridSpec& grid) {
  if (grid.height < 1 || grid.width < 1) {
    throw std::invalid_argument("GridSpec: height and width must be >= 1, got " +
                                std::to_string(grid.height) + "x" + std::to_string(grid.width));
  }
}

Coord discretize(lds::HaltonPoint2D point, const GridSpec& grid) {
  validate(grid);
  int col = static_cast<int>(std::floor(point.x * grid.width));
  int row = static_cast<int>(std::floor(point.y * grid.height));
  col = std::clamp(col, 0, grid.width - 1);
  row = std::clamp(row, 0, grid.height - 1);
  return Coord{row, col};
}

namespace {

Coord discretize_exact(const lds::Fraction& fx, const lds::Fraction& fy, const GridSpec& grid) {
  using u128 = unsigned __int128;
  const auto col = static_cast<int>(u128(fx.numerator) * u128(grid.width) / u128(fx.denominator));
  const auto row = static_cast<int>(u128(fy.numerator) * u128(grid.height) / u128(fy.denominator));
  return Coord{row, col};
}

}  // namespace

TokenOrder halton_token_order(const GridSpec& grid, NumericMode mode) {
  validate(grid);
  const int n = grid.cell_count();
  const std::uint64_t cap = 1'000'000ull * static_cast<std::uint64_t>(n);

  TokenOrder order{grid, {}};
  order.coords.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);

  lds::RadicalInverseStream base2{lds::RadixBase(2)};
  lds::RadicalInverseStream base3{lds::RadixBase(3)};

  int found = 0;
  std::uint64_t produced = 0;
  while (found < n) {
    if (produced >= cap) {
      throw InternalError("halton_token_order: coverage cap exceeded");
    }
    const lds::Fraction fx = base2.next_fraction();
    const lds::Fraction fy = base3.next_fraction();
    ++produced;

    const Coord c = mode == NumericMode::Rational
                        ? discretize_exact(fx, fy, grid)
                        : discretize(lds::HaltonPoint2D{fx.to_double(), fy.to_double()}, grid);
    const int rank = grid.rank(c);
    if (!seen[static_cast<std::size_t>(rank)]) {
      seen[static_cast<std::size_t>(rank)] = 1;
      order.coords.push_back(c);
      ++found;
    }
  }
  return order;
}

}  // namespace unmask

#pragma once

#include <compare>
#include <vector>

#include "unmask/lds.hpp"

namespace unmask {

// One cell of the token grid. Ordering is row-major (row first, then col),
// which is the tie-break and canonicalization order used throughout.
struct Coord {
  int row = 0;
  int col = 0;
  auto operator<=>(const Coord&) const = default;
};

struct GridSpec {
  int height = 0;
  int width = 0;

  int cell_count() const { return height * width; }
  bool contains(Coord c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  int rank(Coord c) const { return c.row * width + c.col; }
  Coord coord_at(int rank) const { return Coord{rank / width, rank % width}; }
  bool operator==(const GridSpec&) const = default;
};

// Throws std::invalid_argument unless height >= 1 and width >= 1.
void validate(const GridSpec& grid);

// A permutation of all grid cells, in visiting order.
struct TokenOrder {
  GridSpec grid;
  std::vector<Coord> coords;
};

// Numeric backend for the sequence-to-grid pipeline. Float discretizes the
// double-valued points; Rational floors exact integer fractions and is
// immune to boundary rounding (e.g. 1/3 on a height-3 grid).
enum class NumericMode { Float, Rational };

// Maps a unit-square point onto a cell: col = floor(x * width),
// row = floor(y * height). x (base-2 axis) indexes columns, y (base-3 axis)
// indexes rows.
Coord discretize(lds::HaltonPoint2D point, const GridSpec& grid);

// Generates Halton points until every cell has been hit, keeping the first
// occurrence of each cell in sequence order. Deterministic; the result is a
// full permutation of the grid.
TokenOrder halton_token_order(const GridSpec& grid, NumericMode mode = NumericMode::Float);

}  // namespace unmask
